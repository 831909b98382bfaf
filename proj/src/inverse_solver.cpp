#include "radtherm/inverse_solver.hpp"

#include <algorithm>
#include <cmath>

#include "radtherm/errors.hpp"

namespace radtherm {

void SolverConfig::validate() const {
  if (!(bracket_lo > 0.0) || !(bracket_hi > bracket_lo) || !std::isfinite(bracket_hi)) {
    throw DomainError("solver: require 0 < bracket_lo < bracket_hi");
  }
  if (!(tolerance > 0.0)) throw DomainError("solver: tolerance must be positive");
  if (max_iterations < 20) throw DomainError("solver: max_iterations must be >= 20");
}

int SolverConfig::required_iterations() const {
  return std::max(0, static_cast<int>(std::ceil(std::log2((bracket_hi - bracket_lo) / tolerance))));
}

std::string_view to_string(InversionStatus status) {
  switch (status) {
    case InversionStatus::converged: return "converged";
    case InversionStatus::out_of_bracket: return "out_of_bracket";
    case InversionStatus::not_converged: return "not_converged";
    case InversionStatus::invalid_input: return "invalid_input";
  }
  return "?";
}

InversionResult invert_signal(ModelKind kind, const FurnaceScene& assumed, double measured,
                              const SolverConfig& cfg, const QuadratureConfig& q) {
  cfg.validate();
  if (!std::isfinite(measured)) throw DomainError("invert_signal: measured signal must be finite");

  FurnaceScene scene = assumed;
  auto signal_at = [&](double t) {
    scene.tube_temp = t;
    return forward_signal(kind, scene, q);
  };

  double lo = cfg.bracket_lo;
  double hi = cfg.bracket_hi;
  const double s_lo = signal_at(lo);
  const double s_hi = signal_at(hi);
  if (measured < s_lo || measured > s_hi) {
    throw BracketError("invert_signal: measured signal " + std::to_string(measured) + " outside [" +
                       std::to_string(s_lo) + ", " + std::to_string(s_hi) +
                       "]; assumed scene parameters are inconsistent with the measurement");
  }

  InversionResult result;
  while (hi - lo > cfg.tolerance) {
    if (result.iterations >= cfg.max_iterations) {
      throw ConvergenceError("invert_signal: no convergence within " + std::to_string(cfg.max_iterations) +
                             " iterations");
    }
    const double mid = 0.5 * (lo + hi);
    if (signal_at(mid) < measured) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++result.iterations;
  }
  result.tube_temp = 0.5 * (lo + hi);
  result.residual = signal_at(result.tube_temp) - measured;
  result.converged = true;
  result.status = InversionStatus::converged;
  return result;
}

std::vector<InversionResult> invert_batch(ModelKind kind, std::span<const FurnaceScene> assumed,
                                          std::span<const double> measured, const SolverConfig& cfg,
                                          const QuadratureConfig& q) {
  if (assumed.size() != measured.size()) {
    throw DomainError("invert_batch: parameter and signal sequences differ in length");
  }
  std::vector<InversionResult> out(assumed.size());
  for (std::size_t i = 0; i < assumed.size(); ++i) {
    try {
      out[i] = invert_signal(kind, assumed[i], measured[i], cfg, q);
    } catch (const BracketError& e) {
      out[i].status = InversionStatus::out_of_bracket;
      out[i].message = e.what();
    } catch (const ConvergenceError& e) {
      out[i].status = InversionStatus::not_converged;
      out[i].message = e.what();
    } catch (const DomainError& e) {
      out[i].status = InversionStatus::invalid_input;
      out[i].message = e.what();
    }
    if (!out[i].converged) out[i].tube_temp = std::nan("");
  }
  return out;
}

}  // namespace radtherm
