#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "radtherm/inverse_solver.hpp"

namespace radtherm {

enum class Parameter { wavelength, emissivity, absorption, wall_temp, gas_temp };

std::string_view to_string(Parameter p);
Parameter parse_parameter(std::string_view text);

/// Whether the model uses the parameter at all (wavelength: all models,
/// emissivity: B-D, wall temperature: C-D, absorption and gas temperature: D).
bool applies_to(Parameter p, ModelKind kind);

/// Parameters the given model depends on, in canonical order.
std::vector<Parameter> model_parameters(ModelKind kind);

/// One perturbed parameter. Temperatures in kelvin, wavelength in um.
struct ParameterSpec {
  Parameter name = Parameter::emissivity;
  double nominal = 0.82;
  double range_lo = 0.72;
  double range_hi = 0.92;
  int grid_points = 41;

  void validate() const;
  std::vector<double> grid() const;

  /// Nominal value and range from the steam-reformer operating point.
  static ParameterSpec reference(Parameter p, int grid_points = 41);
};

/// Nominal operating point of the sensitivity study. The sensor band is
/// `band_width` wide, centred on `wavelength`.
struct NominalSet {
  double wavelength = 3.95;  // um, band centre
  double band_width = 0.5;   // um
  double emissivity = 0.82;
  double absorption = 0.05;
  double wall_temp = 1378.15;  // K
  double gas_temp = 1253.15;   // K
  double path_length = 1.0;

  FurnaceScene scene(double tube_temp) const;
  /// Same scene with one parameter replaced by `value`.
  FurnaceScene perturbed(double tube_temp, Parameter p, double value) const;
};

/// Tube temperatures (K) at which the sweeps are reported: 880-1030 degC.
std::vector<double> reference_tube_temps();

struct SweepResult {
  ModelKind model = ModelKind::B;
  ParameterSpec parameter;
  std::vector<double> tube_temps;  // K
  std::vector<double> grid;        // parameter units
  Eigen::MatrixXd delta_T;         // tube_temps x grid, K; NaN where inversion failed
  int failures = 0;
};

/// For every tube temperature: the true scene stays nominal, the thermometer
/// assumes the perturbed parameter value, and delta_T = recovered - true.
SweepResult perturbation_sweep(ModelKind kind, const ParameterSpec& spec, const std::vector<double>& tube_temps,
                               const NominalSet& nominals = {}, const SolverConfig& cfg = {},
                               const QuadratureConfig& q = {});

/// max over the grid of |delta_T| for the row of `tube_temp`.
double uncertainty_for_parameter(const SweepResult& sweep, double tube_temp);

struct UncertaintyBudget {
  std::vector<std::pair<std::string, double>> per_parameter;  // K
  double combined_uc = 0.0;  // K
  double coverage_k = 1.0;
  double expanded_U = 0.0;   // K
};

UncertaintyBudget combine_budget(std::vector<std::pair<std::string, double>> us, double coverage_k);

/// Budget for one tube temperature, labelled for reporting.
struct TubeBudget {
  ModelKind model = ModelKind::B;
  double tube_temp = 0.0;  // K
  UncertaintyBudget budget;
};

/// One budget per tube temperature shared by all `sweeps` (same model).
std::vector<TubeBudget> budgets_from_sweeps(const std::vector<SweepResult>& sweeps, double coverage_k);

/// All applicable parameters of `kind` swept over their reference ranges.
std::vector<SweepResult> sweep_model(ModelKind kind, const std::vector<double>& tube_temps,
                                     const NominalSet& nominals = {}, int grid_points = 41,
                                     const SolverConfig& cfg = {}, const QuadratureConfig& q = {});

// CSV reports. Numbers are rendered with 6 significant digits; temperatures
// in degC.
inline constexpr std::string_view kSweepCsvHeader = "model,parameter,tube_temp_C,param_value,delta_T_C";
inline constexpr std::string_view kBudgetCsvHeader = "model,tube_temp_C,parameter,u_C,u_c_C,k,U_C";

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& sweeps);
void write_budget_csv(std::ostream& out, const std::vector<TubeBudget>& budgets);

struct SweepCsvRow {
  std::string model;
  std::string parameter;
  double tube_temp_C;
  double param_value;
  double delta_T_C;
};
struct BudgetCsvRow {
  std::string model;
  double tube_temp_C;
  std::string parameter;
  double u_C;
  double u_c_C;
  double k;
  double U_C;
};

std::vector<SweepCsvRow> read_sweep_csv(std::istream& in);
std::vector<BudgetCsvRow> read_budget_csv(std::istream& in);

/// Writes <dir>/sweeps.csv and <dir>/budget.csv. Throws std::runtime_error
/// when the directory cannot be written.
void emit_sweep_report(const std::vector<SweepResult>& sweeps, const std::vector<TubeBudget>& budgets,
                       const std::filesystem::path& dir);

/// Value formatting used by the reports.
std::string format_6g(double v);

}  // namespace radtherm
