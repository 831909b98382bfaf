#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radtherm/inverse_solver.hpp"

namespace radtherm {

/// Surrogate inputs, in column order: measured signal, then the eight assumed
/// scene parameters. Temperatures in kelvin, wavelengths in um.
enum Feature : int {
  kSignal = 0,
  kWallTemp,
  kGasTemp,
  kEmissivityHeight,
  kEmissivityMean,
  kEmissivitySigma,
  kAbsorptionHeight,
  kAbsorptionMean,
  kAbsorptionSigma,
  kFeatureCount
};

inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "signal", "wall_temp_K", "gas_temp_K", "eps_h", "eps_mu", "eps_sigma", "alpha_h", "alpha_mu", "alpha_sigma"};

/// Closed interval used for sampling and min-max normalisation.
struct Range {
  double lo = 0.0;
  double hi = 1.0;

  double normalize(double x) const { return (x - lo) / (hi - lo); }
  double denormalize(double y) const { return lo + y * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Range&) const = default;
};

/// Sampling ranges of the eight scene parameters plus the tube temperature.
struct ParameterRanges {
  Range tube_temp{1073.15, 1473.15};
  Range wall_temp{1073.15, 1573.15};
  Range gas_temp{773.15, 1273.15};
  Range eps_height{0.65, 0.95};
  Range eps_mean{3.3, 4.6};
  Range eps_sigma{0.2, 1.8};
  Range alpha_height{0.0, 0.2};
  Range alpha_mean{3.3, 4.6};
  Range alpha_sigma{0.2, 1.8};

  /// Range of feature `f` (ignored for kSignal).
  const Range& feature(int f) const;
};

/// Scene assumed by the thermometer for one feature row (signal ignored):
/// bell-shaped emissivity and absorption, unit responsivity on 3.7-4.2 um.
FurnaceScene scene_from_features(const Eigen::Ref<const Eigen::RowVectorXd>& row, double tube_temp = 1223.15);

/// Fixed network shape 9 -> 96 -> 125 -> 1, ReLU hidden layers, linear
/// output, no bias terms.
struct MlpTopology {
  static constexpr std::array<int, 4> layer_sizes = {9, 96, 125, 1};
  static constexpr int layer_count = 3;
  static constexpr std::size_t parameter_count() {
    std::size_t n = 0;
    for (int i = 0; i < layer_count; ++i) n += static_cast<std::size_t>(layer_sizes[i] * layer_sizes[i + 1]);
    return n;
  }
};
static_assert(MlpTopology::parameter_count() == 12989);

class MlpModel {
 public:
  using Weights = std::array<Eigen::MatrixXd, MlpTopology::layer_count>;  // (out x in) per layer

  /// Throws ShapeError if any weight matrix disagrees with the topology.
  MlpModel(Weights weights, std::array<Range, kFeatureCount> input_norm, Range output_norm, std::uint64_t seed);

  /// Uniform +-sqrt(6 / (fan_in + fan_out)) initialisation.
  static MlpModel initialized(std::array<Range, kFeatureCount> input_norm, Range output_norm, std::uint64_t seed);

  const Weights& weights() const { return weights_; }
  Weights& mutable_weights() { return weights_; }
  const std::array<Range, kFeatureCount>& input_norm() const { return input_norm_; }
  const Range& output_norm() const { return output_norm_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t parameter_count() const;

  /// Feature-major normalised batch (kFeatureCount x n) from row-major raw inputs (n x kFeatureCount).
  Eigen::MatrixXd normalize_inputs(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;
  /// Network output on normalised inputs (1 x n).
  Eigen::RowVectorXd forward_normalized(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
  /// Hidden-layer activations for inspection.
  std::array<Eigen::MatrixXd, 2> hidden_activations(const Eigen::Ref<const Eigen::MatrixXd>& x) const;

 private:
  Weights weights_;
  std::array<Range, kFeatureCount> input_norm_;
  Range output_norm_;
  std::uint64_t seed_;
};

/// Tube temperatures (K) for an n x 9 batch of raw inputs.
Eigen::VectorXd predict(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs);

/// Mean-squared error on a normalised batch and its gradient per layer.
struct LossGradient {
  double loss = 0.0;
  MlpModel::Weights gradient;
};
LossGradient loss_and_gradient(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::RowVectorXd>& target);

struct LabeledDataset {
  Eigen::MatrixXd inputs;   // n x 9
  Eigen::VectorXd targets;  // n, tube temperature in K
  std::uint64_t seed = 0;

  Eigen::Index size() const { return inputs.rows(); }
};

/// Uniform independent samples of the nine scene quantities; the signal
/// column is the model-D forward signal of the sampled scene.
LabeledDataset generate_dataset(Eigen::Index n, const ParameterRanges& ranges = {}, std::uint64_t seed = 7,
                                const QuadratureConfig& q = {});

void write_dataset_csv(std::ostream& out, const LabeledDataset& data);
LabeledDataset read_dataset_csv(std::istream& in);
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  int epochs = 200;
  AdamConfig adam;
  int batch_size = 256;
  std::uint64_t seed = 7;
  /// Fraction of rows held out for validation when `validation_rows` is 0.
  double validation_fraction = 0.1;
  /// Explicit number of held-out rows (taken from the end of the dataset).
  Eigen::Index validation_rows = 0;
  ParameterRanges ranges;
  bool verbose = false;

  void validate() const;
};

struct TrainingReport {
  double validation_rms = 0.0;  // K
  double train_rms = 0.0;       // K
  double wall_time_s = 0.0;
  int epochs = 0;
  Eigen::Index train_rows = 0;
  Eigen::Index validation_rows = 0;
  std::vector<double> loss_history;  // mean normalised MSE per epoch
};

struct TrainedModel {
  MlpModel model;
  TrainingReport report;
};

/// Adam on mean-squared error of normalised outputs. Deterministic for a
/// given dataset and seed. Throws TrainingError when the loss diverges.
TrainedModel train(const LabeledDataset& data, const TrainConfig& cfg = {});

/// Root-mean-square error in kelvin of `model` on the given rows.
double rms_error(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                 const Eigen::Ref<const Eigen::VectorXd>& targets);

struct BenchResult {
  double surrogate_seconds = 0.0;
  double bisection_seconds = 0.0;
  double speedup = 0.0;
  int solver_failures = 0;
  Eigen::VectorXd surrogate;  // K
  Eigen::VectorXd bisection;  // K, NaN where the solver failed
  double median_abs_diff = 0.0;
  double p95_abs_diff = 0.0;
};

/// Times predict() against per-row bisection on the same inputs.
BenchResult bench(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& batch,
                  const SolverConfig& cfg = {}, const QuadratureConfig& q = {});

// Binary model file, little-endian:
//   "MLPT", u32 version, u32 layer count,
//   per layer: u32 rows, u32 cols, rows*cols f64 (row-major),
//   10 x (f64 lo, f64 hi) normalisation pairs (9 inputs, then output),
//   u64 seed.
inline constexpr std::uint32_t kModelFileVersion = 1;

void write_model(std::ostream& out, const MlpModel& model);
MlpModel read_model(std::istream& in);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

/// Percentile with linear interpolation between order statistics (p in [0, 100]).
double percentile(std::vector<double> values, double p);

}  // namespace radtherm
