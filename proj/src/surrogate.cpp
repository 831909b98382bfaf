#include "radtherm/surrogate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "radtherm/errors.hpp"

namespace radtherm {

const Range& ParameterRanges::feature(int f) const {
  switch (f) {
    case kWallTemp: return wall_temp;
    case kGasTemp: return gas_temp;
    case kEmissivityHeight: return eps_height;
    case kEmissivityMean: return eps_mean;
    case kEmissivitySigma: return eps_sigma;
    case kAbsorptionHeight: return alpha_height;
    case kAbsorptionMean: return alpha_mean;
    case kAbsorptionSigma: return alpha_sigma;
    default: throw DomainError("ParameterRanges::feature: no fixed range for feature " + std::to_string(f));
  }
}

FurnaceScene scene_from_features(const Eigen::Ref<const Eigen::RowVectorXd>& row, double tube_temp) {
  if (row.size() != kFeatureCount) throw DomainError("scene_from_features: expected 9 features");
  FurnaceScene s;
  s.tube_temp = tube_temp;
  s.wall_temp = row[kWallTemp];
  s.gas_temp = row[kGasTemp];
  s.emissivity = SpectralCurve::bell(row[kEmissivityHeight], row[kEmissivityMean], row[kEmissivitySigma]);
  s.absorption = SpectralCurve::bell(row[kAbsorptionHeight], row[kAbsorptionMean], row[kAbsorptionSigma]);
  s.path_length = 1.0;
  s.responsivity = SpectralCurve::constant(1.0);
  s.band = Band(3.7, 4.2);
  return s;
}

// ---------------------------------------------------------------------------
// Model

MlpModel::MlpModel(Weights weights, std::array<Range, kFeatureCount> input_norm, Range output_norm,
                   std::uint64_t seed)
    : weights_(std::move(weights)), input_norm_(input_norm), output_norm_(output_norm), seed_(seed) {
  for (int l = 0; l < MlpTopology::layer_count; ++l) {
    const auto& w = weights_[static_cast<std::size_t>(l)];
    const int rows = MlpTopology::layer_sizes[static_cast<std::size_t>(l) + 1];
    const int cols = MlpTopology::layer_sizes[static_cast<std::size_t>(l)];
    if (w.rows() != rows || w.cols() != cols) {
      throw ShapeError("layer " + std::to_string(l) + ": weight shape " + std::to_string(w.rows()) + "x" +
                           std::to_string(w.cols()) + " does not match topology " + std::to_string(rows) + "x" +
                           std::to_string(cols),
                       0);
    }
  }
  for (const auto& r : input_norm_) {
    if (!(r.hi > r.lo)) throw DomainError("MlpModel: input normalisation range needs lo < hi");
  }
  if (!(output_norm_.hi > output_norm_.lo)) throw DomainError("MlpModel: output normalisation range needs lo < hi");
  if (parameter_count() != MlpTopology::parameter_count()) {
    throw ShapeError("MlpModel: parameter count mismatch", 0);
  }
}

MlpModel MlpModel::initialized(std::array<Range, kFeatureCount> input_norm, Range output_norm,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Weights w;
  for (int l = 0; l < MlpTopology::layer_count; ++l) {
    const int fan_in = MlpTopology::layer_sizes[static_cast<std::size_t>(l)];
    const int fan_out = MlpTopology::layer_sizes[static_cast<std::size_t>(l) + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto& m = w[static_cast<std::size_t>(l)];
    m.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) m(r, c) = dist(rng);
    }
  }
  return MlpModel(std::move(w), input_norm, output_norm, seed);
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights_) n += static_cast<std::size_t>(w.size());
  return n;
}

Eigen::MatrixXd MlpModel::normalize_inputs(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  if (inputs.cols() != kFeatureCount) {
    throw DomainError("surrogate: expected " + std::to_string(kFeatureCount) + " input columns, got " +
                      std::to_string(inputs.cols()));
  }
  Eigen::MatrixXd x(kFeatureCount, inputs.rows());
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto& r = input_norm_[static_cast<std::size_t>(f)];
    x.row(f) = ((inputs.col(f).array() - r.lo) / (r.hi - r.lo)).matrix().transpose();
  }
  return x;
}

Eigen::RowVectorXd MlpModel::forward_normalized(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  const Eigen::MatrixXd h1 = (weights_[0] * x).cwiseMax(0.0);
  const Eigen::MatrixXd h2 = (weights_[1] * h1).cwiseMax(0.0);
  return weights_[2] * h2;
}

std::array<Eigen::MatrixXd, 2> MlpModel::hidden_activations(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  Eigen::MatrixXd h1 = (weights_[0] * x).cwiseMax(0.0);
  Eigen::MatrixXd h2 = (weights_[1] * h1).cwiseMax(0.0);
  return {std::move(h1), std::move(h2)};
}

Eigen::VectorXd predict(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  const Eigen::RowVectorXd y = model.forward_normalized(model.normalize_inputs(inputs));
  const Range& out = model.output_norm();
  return (out.lo + y.array() * (out.hi - out.lo)).matrix().transpose();
}

LossGradient loss_and_gradient(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::RowVectorXd>& target) {
  const auto& w = model.weights();
  const double batch = static_cast<double>(x.cols());

  const Eigen::MatrixXd z1 = w[0] * x;
  const Eigen::MatrixXd h1 = z1.cwiseMax(0.0);
  const Eigen::MatrixXd z2 = w[1] * h1;
  const Eigen::MatrixXd h2 = z2.cwiseMax(0.0);
  const Eigen::RowVectorXd y = w[2] * h2;

  const Eigen::RowVectorXd diff = y - target;
  LossGradient out;
  out.loss = diff.squaredNorm() / batch;

  const Eigen::RowVectorXd dy = (2.0 / batch) * diff;
  out.gradient[2] = dy * h2.transpose();
  const Eigen::MatrixXd dz2 = ((w[2].transpose() * dy).array() * (z2.array() > 0.0).cast<double>()).matrix();
  out.gradient[1] = dz2 * h1.transpose();
  const Eigen::MatrixXd dz1 = ((w[1].transpose() * dz2).array() * (z1.array() > 0.0).cast<double>()).matrix();
  out.gradient[0] = dz1 * x.transpose();
  return out;
}

double rms_error(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                 const Eigen::Ref<const Eigen::VectorXd>& targets) {
  if (inputs.rows() == 0) return 0.0;
  const Eigen::VectorXd p = predict(model, inputs);
  return std::sqrt((p - targets).squaredNorm() / static_cast<double>(targets.size()));
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
  if (epochs < 1) throw DomainError("train: epochs must be >= 1");
  if (batch_size < 1) throw DomainError("train: batch_size must be >= 1");
  if (!(adam.learning_rate > 0.0)) throw DomainError("train: learning rate must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw DomainError("train: validation_fraction must lie in [0, 1)");
  }
  if (validation_rows < 0) throw DomainError("train: validation_rows must be >= 0");
}

TrainedModel train(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = data.size();
  if (n == 0) throw DomainError("train: empty dataset");
  if (data.inputs.cols() != kFeatureCount || data.targets.size() != n) {
    throw DomainError("train: dataset shape mismatch");
  }
  const auto start = std::chrono::steady_clock::now();

  Eigen::Index n_val = cfg.validation_rows > 0
                           ? cfg.validation_rows
                           : static_cast<Eigen::Index>(std::llround(cfg.validation_fraction * static_cast<double>(n)));
  if (n_val >= n) n_val = n == 1 ? 0 : n - 1;
  const Eigen::Index n_train = n - n_val;

  // Signal range from the data, everything else from the sampling ranges.
  std::array<Range, kFeatureCount> input_norm;
  {
    const auto s = data.inputs.col(kSignal);
    double lo = s.minCoeff();
    double hi = s.maxCoeff();
    if (!(hi > lo)) {
      const double pad = std::max(std::abs(lo) * 1e-3, 1e-9);
      lo -= pad;
      hi += pad;
    }
    input_norm[kSignal] = {lo, hi};
    for (int f = 1; f < kFeatureCount; ++f) input_norm[static_cast<std::size_t>(f)] = cfg.ranges.feature(f);
  }
  const Range output_norm = cfg.ranges.tube_temp;
  MlpModel model = MlpModel::initialized(input_norm, output_norm, cfg.seed);

  const Eigen::MatrixXd x_all = model.normalize_inputs(data.inputs.topRows(n_train));
  const Eigen::RowVectorXd t_all =
      ((data.targets.head(n_train).array() - output_norm.lo) / (output_norm.hi - output_norm.lo)).matrix().transpose();

  MlpModel::Weights m1, m2;
  for (int l = 0; l < MlpTopology::layer_count; ++l) {
    const auto& w = model.weights()[static_cast<std::size_t>(l)];
    m1[static_cast<std::size_t>(l)] = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    m2[static_cast<std::size_t>(l)] = Eigen::MatrixXd::Zero(w.rows(), w.cols());
  }

  std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  TrainingReport report;
  const auto& adam = cfg.adam;
  long long step = 0;
  Eigen::MatrixXd xb;
  Eigen::RowVectorXd tb;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (Eigen::Index begin = 0; begin < n_train; begin += cfg.batch_size) {
      const Eigen::Index size = std::min<Eigen::Index>(cfg.batch_size, n_train - begin);
      xb.resize(kFeatureCount, size);
      tb.resize(size);
      for (Eigen::Index j = 0; j < size; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(begin + j)];
        xb.col(j) = x_all.col(src);
        tb[j] = t_all[src];
      }
      const LossGradient lg = loss_and_gradient(model, xb, tb);
      if (!std::isfinite(lg.loss)) throw TrainingError("train: loss diverged", epoch);
      epoch_loss += lg.loss * static_cast<double>(size);

      ++step;
      const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(step));
      auto& weights = model.mutable_weights();
      for (std::size_t l = 0; l < weights.size(); ++l) {
        const auto& g = lg.gradient[l];
        m1[l] = adam.beta1 * m1[l] + (1.0 - adam.beta1) * g;
        m2[l] = adam.beta2 * m2[l] + (1.0 - adam.beta2) * g.cwiseProduct(g);
        weights[l].array() -= adam.learning_rate * (m1[l].array() / bc1) /
                              ((m2[l].array() / bc2).sqrt() + adam.epsilon);
      }
    }
    epoch_loss /= static_cast<double>(n_train);
    if (!std::isfinite(epoch_loss)) throw TrainingError("train: loss diverged", epoch);
    report.loss_history.push_back(epoch_loss);
    if (cfg.verbose && (epoch == 1 || epoch % 10 == 0 || epoch == cfg.epochs)) {
      const double rms_k = std::sqrt(epoch_loss) * (output_norm.hi - output_norm.lo);
      std::fprintf(stderr, "epoch %4d  train loss %.3e  (~%.3f K rms)\n", epoch, epoch_loss, rms_k);
    }
  }

  report.epochs = cfg.epochs;
  report.train_rows = n_train;
  report.validation_rows = n_val;
  report.train_rms = rms_error(model, data.inputs.topRows(n_train), data.targets.head(n_train));
  report.validation_rms =
      n_val > 0 ? rms_error(model, data.inputs.bottomRows(n_val), data.targets.tail(n_val)) : report.train_rms;
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(model), std::move(report)};
}

// ---------------------------------------------------------------------------
// Benchmark

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("percentile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BenchResult bench(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch, const SolverConfig& cfg,
                  const QuadratureConfig& q) {
  using clock = std::chrono::steady_clock;
  if (batch.cols() != kFeatureCount) throw DomainError("bench: expected 9 input columns");
  BenchResult r;

  predict(model, batch.topRows(std::min<Eigen::Index>(batch.rows(), 16)));  // warm-up
  auto t0 = clock::now();
  r.surrogate = predict(model, batch);
  r.surrogate_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  t0 = clock::now();
  std::vector<FurnaceScene> scenes;
  scenes.reserve(static_cast<std::size_t>(batch.rows()));
  for (Eigen::Index i = 0; i < batch.rows(); ++i) scenes.push_back(scene_from_features(batch.row(i)));
  const Eigen::VectorXd signals = batch.col(kSignal);
  const auto results =
      invert_batch(ModelKind::D, scenes, std::span<const double>(signals.data(), static_cast<std::size_t>(signals.size())),
                   cfg, q);
  r.bisection_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  r.speedup = r.surrogate_seconds > 0.0 ? r.bisection_seconds / r.surrogate_seconds : 0.0;

  r.bisection.resize(batch.rows());
  std::vector<double> diffs;
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const auto& res = results[static_cast<std::size_t>(i)];
    r.bisection[i] = res.tube_temp;
    if (!res.converged) {
      ++r.solver_failures;
      continue;
    }
    diffs.push_back(std::abs(r.surrogate[i] - res.tube_temp));
  }
  if (!diffs.empty()) {
    r.median_abs_diff = percentile(diffs, 50.0);
    r.p95_abs_diff = percentile(diffs, 95.0);
  }
  return r;
}

}  // namespace radtherm
