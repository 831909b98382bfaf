#include "radtherm/measurement_models.hpp"

#include <cmath>

#include "radtherm/errors.hpp"
#include "radtherm/planck.hpp"

namespace radtherm {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::A: return "A";
    case ModelKind::B: return "B";
    case ModelKind::C: return "C";
    case ModelKind::D: return "D";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "A" || text == "a") return ModelKind::A;
  if (text == "B" || text == "b") return ModelKind::B;
  if (text == "C" || text == "c") return ModelKind::C;
  if (text == "D" || text == "d") return ModelKind::D;
  throw DomainError("unknown model kind '" + std::string(text) + "' (expected A, B, C or D)");
}

void FurnaceScene::validate(ModelKind kind) const {
  auto positive = [](double t) { return t > 0.0 && std::isfinite(t); };
  if (!positive(tube_temp)) throw DomainError("scene: tube temperature must be positive");
  if (kind >= ModelKind::C && !positive(wall_temp)) {
    throw DomainError("scene: wall temperature must be positive");
  }
  if (kind >= ModelKind::B) {
    const auto [lo, hi] = emissivity.bounds();
    if (lo < 0.0 || hi > 1.0) throw DomainError("scene: emissivity must lie in [0, 1]");
  }
  if (kind == ModelKind::D) {
    if (!positive(gas_temp)) throw DomainError("scene: gas temperature must be positive");
    if (!(path_length >= 0.0) || !std::isfinite(path_length)) {
      throw DomainError("scene: path length must be non-negative");
    }
    const auto [lo, hi] = absorption.bounds();
    if (lo < 0.0 || !(path_length * hi < 1.0)) {
      throw DomainError("scene: effective absorption l*alpha must lie in [0, 1)");
    }
  }
}

namespace {

// Per-node factors shared by every model; the kinds differ only in which
// factors are forced to one or zero, so reductions between models hold
// bit-for-bit under the same quadrature.
struct NodeTerms {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weighted_r;  // w * R
  Eigen::ArrayXd eps;
  Eigen::ArrayXd transmit;    // 1 - l*alpha
  Eigen::ArrayXd gas_emit;    // l*alpha
};

NodeTerms node_terms(ModelKind kind, const FurnaceScene& scene, const QuadratureConfig& q) {
  const auto rule = band_rule(scene.band, q);
  NodeTerms t;
  t.nodes = rule.nodes;
  t.weighted_r = rule.weights * scene.responsivity(rule.nodes);
  const auto n = rule.nodes.size();
  t.eps = kind >= ModelKind::B ? scene.emissivity(rule.nodes) : Eigen::ArrayXd::Ones(n);
  if (kind == ModelKind::D) {
    t.gas_emit = scene.path_length * scene.absorption(rule.nodes);
    t.transmit = 1.0 - t.gas_emit;
  } else {
    t.gas_emit = Eigen::ArrayXd::Zero(n);
    t.transmit = Eigen::ArrayXd::Ones(n);
  }
  return t;
}

SignalDecomposition components(ModelKind kind, const FurnaceScene& scene, const QuadratureConfig& q) {
  scene.validate(kind);
  const NodeTerms t = node_terms(kind, scene, q);
  SignalDecomposition d;
  d.g_emit_prime = (t.weighted_r * t.transmit * t.eps * planck_radiance(t.nodes, scene.tube_temp)).sum();
  if (kind >= ModelKind::C) {
    d.g_reflect_prime =
        (t.weighted_r * t.transmit * (1.0 - t.eps) * planck_radiance(t.nodes, scene.wall_temp)).sum();
  }
  if (kind == ModelKind::D) {
    d.g_gas = (t.weighted_r * t.gas_emit * planck_radiance(t.nodes, scene.gas_temp)).sum();
  }
  d.g_sensor = d.g_emit_prime + d.g_reflect_prime + d.g_gas;
  return d;
}

}  // namespace

double forward_signal(ModelKind kind, const FurnaceScene& scene, const QuadratureConfig& q) {
  return components(kind, scene, q).g_sensor;
}

SignalDecomposition decompose(const FurnaceScene& scene, const QuadratureConfig& q) {
  return components(ModelKind::D, scene, q);
}

}  // namespace radtherm
