// Acceptance run: one PASS/FAIL line per criterion at full scale.
//
//   acceptance [--expect-fail id,id,...] [--only id,id,...] [--list]
//
// A criterion listed in --expect-fail is reported as XFAIL when it fails and
// XPASS when it passes; neither affects the exit status. Any other FAIL makes
// the exit status 1.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "radtherm/frame.hpp"
#include "radtherm/inverse_solver.hpp"
#include "radtherm/measurement_models.hpp"
#include "radtherm/sensitivity.hpp"
#include "radtherm/surrogate.hpp"
#include "radtherm/units.hpp"

using namespace radtherm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  std::string id;
  bool pass = false;
  std::string detail;
};

using Check = std::function<std::vector<Outcome>()>;

struct Criterion {
  std::string id;
  Check run;
};

// Uniform sample of the sampling ranges as a surrogate feature row, plus a
// tube temperature.
struct RandomScene {
  FurnaceScene scene;
  Eigen::RowVectorXd features;
};

RandomScene random_scene(std::mt19937_64& rng, const ParameterRanges& r = {}) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(kFeatureCount));
  row[kSignal] = 0.0;
  for (int f = 1; f < kFeatureCount; ++f) row[f] = r.feature(f).denormalize(u(rng));
  const double tube = r.tube_temp.denormalize(u(rng));
  return {scene_from_features(row, tube), row};
}

// ---------------------------------------------------------------------------

std::vector<Outcome> reductions() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst_b = 0.0, worst_c = 0.0, worst_d = 0.0;
  for (int i = 0; i < 200; ++i) {
    const FurnaceScene s = random_scene(rng).scene;
    const double a = forward_signal(ModelKind::A, s);

    FurnaceScene b = s;
    b.emissivity = SpectralCurve::constant(1.0);
    worst_b = std::max(worst_b, std::abs(forward_signal(ModelKind::B, b) - a) / a);

    FurnaceScene c = s;
    c.wall_temp = s.tube_temp;
    worst_c = std::max(worst_c, std::abs(forward_signal(ModelKind::C, c) - a) / a);

    FurnaceScene d = s;
    d.absorption = SpectralCurve::constant(0.0);
    const double sc = forward_signal(ModelKind::C, s);
    worst_d = std::max(worst_d, std::abs(forward_signal(ModelKind::D, d) - sc) / sc);
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst_b <= 1e-12 && worst_c <= 1e-12 && worst_d <= 1e-12 && elapsed < 10.0;
  return {{"reductions", ok,
           fmt("200 scenes; max rel diff B(eps=1)-A %.2e, C(Tw=Ts)-A %.2e, D(alpha=0)-C %.2e (limit 1e-12); %.2f s (limit 10 s)",
               worst_b, worst_c, worst_d, elapsed)}};
}

std::vector<Outcome> round_trip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const FurnaceScene s = random_scene(rng).scene;
    try {
      const InversionResult r = invert_signal(ModelKind::D, s, forward_signal(ModelKind::D, s));
      if (!r.converged) {
        ++failures;
        continue;
      }
      worst = std::max(worst, std::abs(r.tube_temp - s.tube_temp));
    } catch (const std::exception&) {
      ++failures;
    }
  }
  const double elapsed = seconds_since(t0);
  const bool ok = failures == 0 && worst <= 0.01 && elapsed < 30.0;
  return {{"round_trip", ok,
           fmt("1000 model-D scenes; max |error| %.2e K (limit 0.01); %d non-convergences; %.2f s (limit 30 s)", worst,
               failures, elapsed)}};
}

// Pearson correlation of delta_T against the parameter value, per tube
// temperature row; returns the extreme values over rows.
std::pair<double, double> correlation_range(const SweepResult& s) {
  double lo = 1.0, hi = -1.0;
  const auto n = static_cast<Eigen::Index>(s.grid.size());
  const Eigen::Map<const Eigen::VectorXd> x(s.grid.data(), n);
  for (Eigen::Index r = 0; r < s.delta_T.rows(); ++r) {
    const Eigen::VectorXd y = s.delta_T.row(r).transpose();
    const Eigen::VectorXd dx = x.array() - x.mean();
    const Eigen::VectorXd dy = y.array() - y.mean();
    const double c = dx.dot(dy) / std::sqrt(dx.squaredNorm() * dy.squaredNorm());
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return {lo, hi};
}

// Envelope bounds carry a 20% allowance on each edge.
constexpr double kEnvelopeAllowance = 1.2;

std::vector<Outcome> sensitivity() {
  std::vector<Outcome> out;
  const double nominal_tube = celsius_to_kelvin(950.0);
  const std::vector<double> temps = reference_tube_temps();
  const NominalSet nominals;

  const SweepResult b_lambda =
      perturbation_sweep(ModelKind::B, ParameterSpec::reference(Parameter::wavelength), temps, nominals);
  const SweepResult b_eps =
      perturbation_sweep(ModelKind::B, ParameterSpec::reference(Parameter::emissivity), temps, nominals);

  {
    const double lo = b_lambda.delta_T.minCoeff(), hi = b_lambda.delta_T.maxCoeff();
    const double lim = 5.0 * kEnvelopeAllowance;
    out.push_back({"sensitivity.b_wavelength_envelope", b_lambda.failures == 0 && lo >= -lim && hi <= lim,
                   fmt("model B wavelength sweep dT in [%.3f, %.3f] K (allowed [%.1f, %.1f])", lo, hi, -lim, lim)});
  }
  {
    const double lo = b_eps.delta_T.minCoeff(), hi = b_eps.delta_T.maxCoeff();
    const auto [c_lo, c_hi] = correlation_range(b_eps);
    const bool ok = b_eps.failures == 0 && lo >= -50.0 * kEnvelopeAllowance && hi <= 60.0 * kEnvelopeAllowance &&
                    c_hi < 0.0;
    out.push_back({"sensitivity.b_emissivity_envelope", ok,
                   fmt("model B emissivity sweep dT in [%.3f, %.3f] K (allowed [%.1f, %.1f]); correlation in "
                       "[%.4f, %.4f] (must be < 0)",
                       lo, hi, -50.0 * kEnvelopeAllowance, 60.0 * kEnvelopeAllowance, c_lo, c_hi)});
  }
  {
    const std::vector<double> at{nominal_tube};
    const double u_eps = uncertainty_for_parameter(
        perturbation_sweep(ModelKind::B, ParameterSpec::reference(Parameter::emissivity), at, nominals), nominal_tube);
    const double u_lambda = uncertainty_for_parameter(
        perturbation_sweep(ModelKind::B, ParameterSpec::reference(Parameter::wavelength), at, nominals), nominal_tube);
    out.push_back({"sensitivity.b_uncertainty_ratio", u_eps / u_lambda >= 5.0,
                   fmt("model B at 950 C: u_eps %.3f K, u_lambda %.3f K, ratio %.3f (limit >= 5)", u_eps, u_lambda,
                       u_eps / u_lambda)});
  }
  {
    const SweepResult c_eps =
        perturbation_sweep(ModelKind::C, ParameterSpec::reference(Parameter::emissivity), temps, nominals);
    const SweepResult c_wall =
        perturbation_sweep(ModelKind::C, ParameterSpec::reference(Parameter::wall_temp), temps, nominals);
    const auto [e_lo, e_hi] = correlation_range(c_eps);
    const auto [w_lo, w_hi] = correlation_range(c_wall);
    const bool ok = c_eps.failures == 0 && c_wall.failures == 0 && e_lo > 0.0 && w_hi < 0.0;
    out.push_back({"sensitivity.c_correlation_signs", ok,
                   fmt("model C emissivity correlation in [%.4f, %.4f] (must be > 0); wall correlation in [%.4f, "
                       "%.4f] (must be < 0)",
                       e_lo, e_hi, w_lo, w_hi)});
  }
  {
    double worst = 0.0;
    int failures = 0;
    for (double t : temps) {
      NominalSet equal = nominals;
      equal.wall_temp = t;
      const SweepResult s =
          perturbation_sweep(ModelKind::C, ParameterSpec::reference(Parameter::emissivity), {t}, equal);
      failures += s.failures;
      worst = std::max(worst, s.delta_T.cwiseAbs().maxCoeff());
    }
    out.push_back({"sensitivity.c_isothermal_emissivity", failures == 0 && worst <= 0.02,
                   fmt("model C emissivity sweep with Tw = Ts: max |dT| %.3e K (limit 0.02)", worst)});
  }
  {
    const std::vector<double> at{nominal_tube};
    const auto sweeps = sweep_model(ModelKind::D, at, nominals);
    double u_max_small = 0.0, u_min_large = 1e300;
    std::string parts;
    for (const auto& s : sweeps) {
      const double u = uncertainty_for_parameter(s, nominal_tube);
      const Parameter p = s.parameter.name;
      if (p == Parameter::emissivity || p == Parameter::wall_temp) {
        u_min_large = std::min(u_min_large, u);
      } else {
        u_max_small = std::max(u_max_small, u);
      }
      parts += fmt("%s %.3f K, ", std::string(to_string(p)).c_str(), u);
    }
    parts.resize(parts.size() - 2);
    out.push_back({"sensitivity.d_budget_split", u_max_small < 10.0 && u_min_large >= 15.0,
                   "model D at 950 C: " + parts + " (wavelength, absorption, gas < 10; emissivity, wall >= 15)"});
  }
  return out;
}

std::vector<Outcome> budget_arithmetic() {
  const UncertaintyBudget b = combine_budget({{"a", 3.0}, {"b", 4.0}}, 1.96);
  bool ok = b.combined_uc == 5.0 && b.expanded_U == 1.96 * b.combined_uc;

  // Root-sum-square of every real budget row.
  double worst = 0.0;
  for (ModelKind kind : {ModelKind::B, ModelKind::C, ModelKind::D}) {
    const auto sweeps = sweep_model(kind, reference_tube_temps());
    for (const TubeBudget& tb : budgets_from_sweeps(sweeps, 1.96)) {
      long double ss = 0.0L;
      for (const auto& [name, u] : tb.budget.per_parameter) ss += static_cast<long double>(u) * u;
      const double rss = static_cast<double>(std::sqrt(ss));
      worst = std::max(worst, std::abs(tb.budget.combined_uc - rss) / rss);
      ok = ok && tb.budget.expanded_U == 1.96 * tb.budget.combined_uc;
    }
  }
  ok = ok && worst <= 4.0 * std::numeric_limits<double>::epsilon();
  return {{"budget_arithmetic", ok,
           fmt("u_c(3,4) = %.17g, U = %.17g (k = 1.96); max rel deviation from root-sum-square over B-D budgets "
               "%.2e (limit 4 eps)",
               b.combined_uc, b.expanded_U, worst)}};
}

std::vector<Outcome> surrogate_structure() {
  std::array<Range, kFeatureCount> norm;
  const ParameterRanges ranges;
  const LabeledDataset d = generate_dataset(10, {}, 17);
  norm[kSignal] = {d.inputs.col(kSignal).minCoeff(), d.inputs.col(kSignal).maxCoeff()};
  for (int f = 1; f < kFeatureCount; ++f) norm[f] = ranges.feature(f);
  const MlpModel model = MlpModel::initialized(norm, ranges.tube_temp, 17);
  const Eigen::MatrixXd x = model.normalize_inputs(d.inputs);
  Eigen::RowVectorXd t(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) t[i] = model.output_norm().normalize(d.targets[i]);

  auto same_pattern = [&](const MlpModel& a, const MlpModel& b) {
    const auto pa = a.hidden_activations(x), pb = b.hidden_activations(x);
    return ((pa[0].array() > 0.0) == (pb[0].array() > 0.0)).all() &&
           ((pa[1].array() > 0.0) == (pb[1].array() > 0.0)).all();
  };
  // Every weight, step 1e-4. Where the step moves a ReLU across its kink the
  // difference quotient is meaningless, and the weight is rechecked at 1e-7.
  const LossGradient analytic = loss_and_gradient(model, x, t);
  double worst = 0.0;
  int checked = 0, kinks = 0;
  for (std::size_t l = 0; l < MlpTopology::layer_count; ++l) {
    const auto& w = model.weights()[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        double h = 1e-4;
        MlpModel plus = model, minus = model;
        plus.mutable_weights()[l](i, j) += h;
        minus.mutable_weights()[l](i, j) -= h;
        if (!same_pattern(plus, minus)) {
          ++kinks;
          h = 1e-7;
          plus = model;
          minus = model;
          plus.mutable_weights()[l](i, j) += h;
          minus.mutable_weights()[l](i, j) -= h;
        }
        const double numeric = (loss_and_gradient(plus, x, t).loss - loss_and_gradient(minus, x, t).loss) / (2 * h);
        const double a = analytic.gradient[l](i, j);
        worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
        ++checked;
      }
    }
  }
  const std::size_t n = model.parameter_count();
  return {{"surrogate_structure", n == 12989 && checked == 12989 && worst < 1e-3,
           fmt("%zu parameters (expected 12989); full-network central differences on a 10-sample batch, step 1e-4: "
               "max relative error %.2e (limit 1e-3); %d weights crossed a ReLU kink and were rechecked at 1e-7",
               n, worst, kinks)}};
}

// The full-scale dataset and model are shared by the accuracy and speedup
// criteria.
struct TrainedSurrogate {
  LabeledDataset data;
  TrainedModel trained;
  double generate_seconds = 0.0;
};

const TrainedSurrogate& full_scale_surrogate() {
  static const TrainedSurrogate s = [] {
    const auto t0 = Clock::now();
    LabeledDataset data = generate_dataset(120000, {}, 7);
    const double generate_seconds = seconds_since(t0);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 7;
    cfg.validation_rows = 20000;
    TrainedModel trained = train(data, cfg);
    return TrainedSurrogate{std::move(data), std::move(trained), generate_seconds};
  }();
  return s;
}

std::vector<Outcome> surrogate_accuracy() {
  const TrainedSurrogate& s = full_scale_surrogate();
  const auto& rep = s.trained.report;
  const Eigen::Index n = s.data.size();
  const Eigen::MatrixXd held_out = s.data.inputs.bottomRows(rep.validation_rows);
  const BenchResult b = bench(s.trained.model, held_out);
  const double total = s.generate_seconds + rep.wall_time_s + b.bisection_seconds + b.surrogate_seconds;
  const bool ok = rep.train_rows == 100000 && rep.validation_rows == 20000 && n == 120000 &&
                  rep.validation_rms <= 1.0 && b.median_abs_diff <= 2.0 && b.solver_failures == 0 &&
                  total <= 1800.0;
  const Eigen::MatrixXd first_1000 = held_out.topRows(1000);
  const BenchResult b1000 = bench(s.trained.model, first_1000);
  std::vector<Outcome> out;
  out.push_back({"surrogate_accuracy", ok,
           fmt("%lld train / %lld held out, %d epochs: validation RMS %.3f K (limit 1.0); median |surrogate - "
               "bisection| %.3f K (limit 2.0), p95 %.3f K; %d solver failures; %.0f s (limit 1800 s)",
               static_cast<long long>(rep.train_rows), static_cast<long long>(rep.validation_rows), rep.epochs,
               rep.validation_rms, b.median_abs_diff, b.p95_abs_diff, b.solver_failures, total)});
  out.push_back({"surrogate_accuracy.p95_1000", b1000.solver_failures == 0 && b1000.p95_abs_diff <= 5.0,
                 fmt("1000 held-out rows: p95 |surrogate - bisection| %.3f K (limit 5.0)", b1000.p95_abs_diff)});
  return out;
}

std::vector<Outcome> surrogate_speedup() {
  const TrainedSurrogate& s = full_scale_surrogate();
  const Eigen::MatrixXd batch = s.data.inputs.bottomRows(10000);
  const BenchResult b = bench(s.trained.model, batch);
  return {{"surrogate_speedup", b.speedup >= 5.0,
           fmt("10000 rows: surrogate %.2f ms, bisection %.2f ms, speedup %.1fx (limit >= 5x)",
               1e3 * b.surrogate_seconds, 1e3 * b.bisection_seconds, b.speedup)}};
}

SceneSpec pipeline_scene() {
  SceneSpec spec;
  spec.camera_id = "acceptance";
  spec.width = 64;
  spec.height = 48;
  spec.timestamp_ms = 1700000000000;
  PixelParameters left;
  left.eps_height = 0.75;
  left.eps_mean = 3.6;
  left.eps_sigma = 0.9;
  left.wall_temp = celsius_to_kelvin(1150.0);
  left.gas_temp = celsius_to_kelvin(950.0);
  left.alpha_height = 0.12;
  left.alpha_mean = 4.1;
  left.alpha_sigma = 0.5;
  PixelParameters right = left;
  right.eps_height = 0.9;
  right.eps_mean = 4.3;
  right.wall_temp = celsius_to_kelvin(1050.0);
  right.alpha_height = 0.0;
  spec.regions.push_back({{{-0.5, -0.5}, {30.5, -0.5}, {25.5, 47.5}, {-0.5, 47.5}}, left});
  spec.regions.push_back({{{40.5, 5.5}, {63.5, 5.5}, {63.5, 40.5}, {50.5, 45.5}}, right});
  spec.tubes = {{12.0, 24.0, 5.0, celsius_to_kelvin(900.0), 0.8},
                {32.0, 24.0, 6.0, celsius_to_kelvin(960.0), -0.5},
                {52.0, 24.0, 4.5, celsius_to_kelvin(1010.0), 0.3}};
  return spec;
}

// Independent even-odd test: a horizontal ray to +x crosses an edge when the
// edge straddles the scanline (lower end inclusive) right of the point.
bool oracle_inside(const Polygon& poly, double px, double py) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector2d& a = poly[k];
    const Eigen::Vector2d& b = poly[(k + 1) % n];
    if ((a.y() > py) == (b.y() > py)) continue;
    const double x_cross = a.x() + (py - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
    if (px < x_cross) inside = !inside;
  }
  return inside;
}

std::vector<Outcome> frame_pipeline() {
  std::vector<Outcome> out;
  const SceneSpec spec = pipeline_scene();
  const ThermalFrame raw = render_synthetic_frame(spec);
  const ThermalFrame fixed = correct_frame(raw, spec.generating_mask(), CorrectionMethod::bisection);
  const FrameValues truth = spec.ground_truth();
  const double worst = (fixed.values - truth).abs().maxCoeff();
  const bool finite = fixed.values.isFinite().all();
  out.push_back({"frame_pipeline.correction", finite && fixed.error_count == 0 && worst <= 0.01,
                 fmt("%dx%d frame, 3 mask regions incl. defaults: max |corrected - truth| %.2e K (limit 0.01); %d "
                     "failed pixels",
                     spec.width, spec.height, worst, fixed.error_count)});

  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ux(0.0, spec.width - 1.0), uy(0.0, spec.height - 1.0);
  std::uniform_int_distribution<int> nv(3, 9);
  int mismatches = 0;
  std::size_t pixels = 0;
  for (int g = 0; g < 50; ++g) {
    RoiGeometry geom{RoiKind::polygon, {}};
    const int n = nv(rng);
    for (int k = 0; k < n; ++k) geom.vertices.emplace_back(ux(rng), uy(rng));
    const RoiStats stats = roi_stats(fixed, geom);

    std::vector<Eigen::Vector2i> expect_px;
    std::vector<double> expect_vals;
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        if (oracle_inside(geom.vertices, x, y)) {
          expect_px.emplace_back(x, y);
          expect_vals.push_back(fixed.values(y, x));
        }
      }
    }
    pixels += expect_px.size();
    const RoiSummary e = summarize(expect_vals);
    const RoiSummary& a = stats.summary;
    const bool same = stats.pixels == expect_px && stats.values == expect_vals && a.count == e.count &&
                      a.invalid == e.invalid && a.min == e.min && a.max == e.max && a.mean == e.mean &&
                      a.std == e.std && a.p5 == e.p5 && a.p25 == e.p25 && a.p50 == e.p50 && a.p75 == e.p75 &&
                      a.p95 == e.p95;
    if (!same) ++mismatches;
  }
  out.push_back({"frame_pipeline.roi_oracle", mismatches == 0,
                 fmt("50 random polygons (%zu pixels total): %d differ from the point-in-polygon oracle", pixels,
                     mismatches)});
  return out;
}

// Needs the full-scale model, so it runs apart from the solver-only pipeline.
std::vector<Outcome> frame_surrogate() {
  const TrainedSurrogate& s = full_scale_surrogate();
  const SceneSpec spec = pipeline_scene();
  const ThermalFrame raw = render_synthetic_frame(spec);
  const ParameterMask mask = spec.generating_mask();
  const ThermalFrame solver = correct_frame(raw, mask, CorrectionMethod::bisection);
  const ThermalFrame fast = correct_frame(raw, mask, CorrectionMethod::surrogate, &s.trained.model);
  std::vector<double> diffs;
  for (Eigen::Index i = 0; i < solver.values.size(); ++i) {
    diffs.push_back(std::abs(fast.values.data()[i] - solver.values.data()[i]));
  }
  const double median = percentile(diffs, 50.0), p95 = percentile(diffs, 95.0);
  return {{"frame_pipeline.surrogate_median", median <= 2.0,
           fmt("surrogate vs bisection correction of the pipeline frame: median |diff| %.3f K (limit 2.0)", median)},
          {"frame_pipeline.surrogate_p95", p95 <= 5.0,
           fmt("surrogate vs bisection correction of the pipeline frame: p95 |diff| %.3f K (limit 5.0)", p95)}};
}

std::vector<Outcome> determinism() {
  auto dataset_bytes = [] {
    std::ostringstream s;
    write_dataset_csv(s, generate_dataset(120000, {}, 7));
    return s.str();
  };
  const std::string d1 = dataset_bytes(), d2 = dataset_bytes();

  const LabeledDataset small = generate_dataset(4000, {}, 9);
  auto model_bytes = [&] {
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 9;
    cfg.validation_rows = 500;
    std::ostringstream s;
    write_model(s, train(small, cfg).model);
    return s.str();
  };
  const std::string m1 = model_bytes(), m2 = model_bytes();

  const SceneSpec spec = pipeline_scene();
  auto corrected_bytes = [&](CorrectionMethod method, const MlpModel* model) {
    return encode_frame(correct_frame(render_synthetic_frame(spec), spec.generating_mask(), method, model));
  };
  std::istringstream model_in(m1);
  const MlpModel model = read_model(model_in);
  const std::string c1 = corrected_bytes(CorrectionMethod::bisection, nullptr);
  const std::string c2 = corrected_bytes(CorrectionMethod::bisection, nullptr);
  const std::string s1 = corrected_bytes(CorrectionMethod::surrogate, &model);
  const std::string s2 = corrected_bytes(CorrectionMethod::surrogate, &model);

  const bool ok = d1 == d2 && m1 == m2 && c1 == c2 && s1 == s2;
  return {{"determinism", ok,
           fmt("dataset 120000 rows %s (%zu bytes); training 4000 rows x 5 epochs %s (%zu bytes); correction "
               "bisection %s, surrogate %s",
               d1 == d2 ? "identical" : "DIFFERS", d1.size(), m1 == m2 ? "identical" : "DIFFERS", m1.size(),
               c1 == c2 ? "identical" : "DIFFERS", s1 == s2 ? "identical" : "DIFFERS")}};
}

std::set<std::string> split_ids(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string id;
  while (std::getline(ss, id, ',')) {
    if (!id.empty()) out.insert(id);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-scale acceptance run"};
  std::string expect_fail, only;
  bool list = false;
  app.add_option("--expect-fail", expect_fail, "Comma-separated criterion ids known to fail");
  app.add_option("--only", only, "Comma-separated criterion groups to run");
  app.add_flag("--list", list, "List criterion groups and exit");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"reductions", reductions},
      {"round_trip", round_trip},
      {"sensitivity", sensitivity},
      {"budget_arithmetic", budget_arithmetic},
      {"surrogate_structure", surrogate_structure},
      {"surrogate_accuracy", surrogate_accuracy},
      {"surrogate_speedup", surrogate_speedup},
      {"frame_pipeline", frame_pipeline},
      {"frame_surrogate", frame_surrogate},
      {"determinism", determinism},
  };
  if (list) {
    for (const auto& c : criteria) std::printf("%s\n", c.id.c_str());
    return 0;
  }
  const std::set<std::string> expected = split_ids(expect_fail);
  const std::set<std::string> selected = split_ids(only);

  int failed = 0, xfail = 0, xpass = 0, passed = 0;
  std::set<std::string> seen;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    std::vector<Outcome> outcomes;
    try {
      outcomes = c.run();
    } catch (const std::exception& e) {
      outcomes = {{c.id, false, std::string("exception: ") + e.what()}};
    }
    for (const auto& o : outcomes) {
      seen.insert(o.id);
      const bool listed = expected.count(o.id) > 0;
      const char* tag = o.pass ? (listed ? "XPASS" : "PASS") : (listed ? "XFAIL" : "FAIL");
      (o.pass ? (listed ? xpass : passed) : (listed ? xfail : failed))++;
      std::printf("%-5s %-38s %s\n", tag, o.id.c_str(), o.detail.c_str());
      std::fflush(stdout);
    }
  }
  for (const auto& id : expected) {
    if (!seen.count(id) && selected.empty()) {
      std::printf("FAIL  %-38s listed in --expect-fail but no such criterion\n", id.c_str());
      ++failed;
    }
  }
  std::printf("summary: %d passed, %d failed, %d expected failures, %d unexpected passes\n", passed, failed, xfail,
              xpass);
  return failed == 0 ? 0 : 1;
}
