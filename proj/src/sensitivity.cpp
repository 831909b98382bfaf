#include "radtherm/sensitivity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "radtherm/errors.hpp"
#include "radtherm/units.hpp"

namespace radtherm {

std::string_view to_string(Parameter p) {
  switch (p) {
    case Parameter::wavelength: return "wavelength";
    case Parameter::emissivity: return "emissivity";
    case Parameter::absorption: return "absorption";
    case Parameter::wall_temp: return "wall_temp";
    case Parameter::gas_temp: return "gas_temp";
  }
  return "?";
}

Parameter parse_parameter(std::string_view text) {
  for (auto p : {Parameter::wavelength, Parameter::emissivity, Parameter::absorption, Parameter::wall_temp,
                 Parameter::gas_temp}) {
    if (text == to_string(p)) return p;
  }
  throw DomainError("unknown parameter '" + std::string(text) +
                    "' (expected wavelength, emissivity, absorption, wall_temp or gas_temp)");
}

bool applies_to(Parameter p, ModelKind kind) {
  switch (p) {
    case Parameter::wavelength: return true;
    case Parameter::emissivity: return kind >= ModelKind::B;
    case Parameter::wall_temp: return kind >= ModelKind::C;
    case Parameter::absorption:
    case Parameter::gas_temp: return kind == ModelKind::D;
  }
  return false;
}

std::vector<Parameter> model_parameters(ModelKind kind) {
  std::vector<Parameter> out;
  for (auto p : {Parameter::wavelength, Parameter::emissivity, Parameter::wall_temp, Parameter::absorption,
                 Parameter::gas_temp}) {
    if (applies_to(p, kind)) out.push_back(p);
  }
  return out;
}

void ParameterSpec::validate() const {
  if (!(range_lo <= nominal && nominal <= range_hi)) {
    throw DomainError("parameter spec: nominal outside [range_lo, range_hi]");
  }
  if (grid_points < 3) throw DomainError("parameter spec: grid_points must be >= 3");
}

std::vector<double> ParameterSpec::grid() const {
  validate();
  std::vector<double> g(static_cast<std::size_t>(grid_points));
  const double step = (range_hi - range_lo) / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) g[static_cast<std::size_t>(i)] = range_lo + step * i;
  g.back() = range_hi;
  return g;
}

ParameterSpec ParameterSpec::reference(Parameter p, int grid_points) {
  switch (p) {
    case Parameter::wavelength: return {p, 3.95, 3.7, 4.2, grid_points};
    case Parameter::emissivity: return {p, 0.82, 0.72, 0.92, grid_points};
    case Parameter::absorption: return {p, 0.05, 0.0, 0.1, grid_points};
    case Parameter::wall_temp:
      return {p, celsius_to_kelvin(1105.0), celsius_to_kelvin(1030.0), celsius_to_kelvin(1180.0), grid_points};
    case Parameter::gas_temp:
      return {p, celsius_to_kelvin(980.0), celsius_to_kelvin(880.0), celsius_to_kelvin(1080.0), grid_points};
  }
  throw DomainError("unknown parameter");
}

FurnaceScene NominalSet::scene(double tube_temp) const {
  FurnaceScene s;
  s.tube_temp = tube_temp;
  s.wall_temp = wall_temp;
  s.gas_temp = gas_temp;
  s.emissivity = SpectralCurve::constant(emissivity);
  s.absorption = SpectralCurve::constant(absorption);
  s.path_length = path_length;
  s.responsivity = SpectralCurve::constant(1.0);
  s.band = Band::centered(wavelength, band_width);
  return s;
}

FurnaceScene NominalSet::perturbed(double tube_temp, Parameter p, double value) const {
  FurnaceScene s = scene(tube_temp);
  switch (p) {
    case Parameter::wavelength: s.band = Band::centered(value, band_width); break;
    case Parameter::emissivity: s.emissivity = s.emissivity.with_height(value); break;
    case Parameter::absorption: s.absorption = s.absorption.with_height(value); break;
    case Parameter::wall_temp: s.wall_temp = value; break;
    case Parameter::gas_temp: s.gas_temp = value; break;
  }
  return s;
}

std::vector<double> reference_tube_temps() {
  std::vector<double> out;
  for (double c = 880.0; c <= 1030.0; c += 30.0) out.push_back(celsius_to_kelvin(c));
  return out;
}

SweepResult perturbation_sweep(ModelKind kind, const ParameterSpec& spec, const std::vector<double>& tube_temps,
                               const NominalSet& nominals, const SolverConfig& cfg, const QuadratureConfig& q) {
  if (!applies_to(spec.name, kind)) {
    throw DomainError("perturbation_sweep: parameter '" + std::string(to_string(spec.name)) +
                      "' is not part of model " + std::string(to_string(kind)));
  }
  SweepResult r;
  r.model = kind;
  r.parameter = spec;
  r.tube_temps = tube_temps;
  r.grid = spec.grid();
  r.delta_T.resize(static_cast<Eigen::Index>(tube_temps.size()), static_cast<Eigen::Index>(r.grid.size()));
  for (std::size_t i = 0; i < tube_temps.size(); ++i) {
    const double truth = tube_temps[i];
    const double measured = forward_signal(kind, nominals.scene(truth), q);
    for (std::size_t j = 0; j < r.grid.size(); ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      try {
        const auto inv = invert_signal(kind, nominals.perturbed(truth, spec.name, r.grid[j]), measured, cfg, q);
        r.delta_T(ii, jj) = inv.tube_temp - truth;
      } catch (const BracketError&) {
        r.delta_T(ii, jj) = std::nan("");
        ++r.failures;
      } catch (const ConvergenceError&) {
        r.delta_T(ii, jj) = std::nan("");
        ++r.failures;
      }
    }
  }
  return r;
}

double uncertainty_for_parameter(const SweepResult& sweep, double tube_temp) {
  const auto it = std::find_if(sweep.tube_temps.begin(), sweep.tube_temps.end(),
                               [tube_temp](double t) { return std::abs(t - tube_temp) <= 1e-9; });
  if (it == sweep.tube_temps.end()) {
    throw NotFoundError("uncertainty_for_parameter: tube temperature " + std::to_string(tube_temp) +
                        " K not in sweep");
  }
  const auto row = static_cast<Eigen::Index>(it - sweep.tube_temps.begin());
  return sweep.delta_T.row(row).cwiseAbs().maxCoeff();
}

UncertaintyBudget combine_budget(std::vector<std::pair<std::string, double>> us, double coverage_k) {
  if (!(coverage_k > 0.0)) throw DomainError("combine_budget: coverage factor must be positive");
  double sum_sq = 0.0;
  for (const auto& [name, u] : us) {
    if (!(u >= 0.0)) throw DomainError("combine_budget: uncertainty for '" + name + "' is negative");
    sum_sq += u * u;
  }
  UncertaintyBudget b;
  b.per_parameter = std::move(us);
  b.combined_uc = std::sqrt(sum_sq);
  b.coverage_k = coverage_k;
  b.expanded_U = coverage_k * b.combined_uc;
  return b;
}

std::vector<TubeBudget> budgets_from_sweeps(const std::vector<SweepResult>& sweeps, double coverage_k) {
  std::vector<TubeBudget> out;
  if (sweeps.empty()) return out;
  for (double t : sweeps.front().tube_temps) {
    std::vector<std::pair<std::string, double>> us;
    for (const auto& s : sweeps) {
      us.emplace_back(std::string(to_string(s.parameter.name)), uncertainty_for_parameter(s, t));
    }
    out.push_back({sweeps.front().model, t, combine_budget(std::move(us), coverage_k)});
  }
  return out;
}

std::vector<SweepResult> sweep_model(ModelKind kind, const std::vector<double>& tube_temps,
                                     const NominalSet& nominals, int grid_points, const SolverConfig& cfg,
                                     const QuadratureConfig& q) {
  std::vector<SweepResult> out;
  for (Parameter p : model_parameters(kind)) {
    out.push_back(perturbation_sweep(kind, ParameterSpec::reference(p, grid_points), tube_temps, nominals, cfg, q));
  }
  return out;
}

std::string format_6g(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

bool is_temperature(Parameter p) { return p == Parameter::wall_temp || p == Parameter::gas_temp; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& s, std::size_t offset) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("invalid number '" + s + "'", offset);
  return v;
}

template <typename Row, typename Fn>
std::vector<Row> read_rows(std::istream& in, std::string_view header, std::size_t columns, Fn&& make) {
  std::vector<Row> rows;
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line) || line != header) throw ParseError("missing or unexpected CSV header", 0);
  offset += line.size() + 1;
  while (std::getline(in, line)) {
    if (line.empty()) {
      offset += 1;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != columns) throw ParseError("expected " + std::to_string(columns) + " columns", offset);
    rows.push_back(make(f, offset));
    offset += line.size() + 1;
  }
  return rows;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& sweeps) {
  out << kSweepCsvHeader << '\n';
  for (const auto& s : sweeps) {
    const bool temp = is_temperature(s.parameter.name);
    for (std::size_t i = 0; i < s.tube_temps.size(); ++i) {
      for (std::size_t j = 0; j < s.grid.size(); ++j) {
        const double p = temp ? kelvin_to_celsius(s.grid[j]) : s.grid[j];
        out << to_string(s.model) << ',' << to_string(s.parameter.name) << ','
            << format_6g(kelvin_to_celsius(s.tube_temps[i])) << ',' << format_6g(p) << ','
            << format_6g(s.delta_T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
      }
    }
  }
}

void write_budget_csv(std::ostream& out, const std::vector<TubeBudget>& budgets) {
  out << kBudgetCsvHeader << '\n';
  for (const auto& tb : budgets) {
    for (const auto& [name, u] : tb.budget.per_parameter) {
      out << to_string(tb.model) << ',' << format_6g(kelvin_to_celsius(tb.tube_temp)) << ',' << name << ','
          << format_6g(u) << ',' << format_6g(tb.budget.combined_uc) << ',' << format_6g(tb.budget.coverage_k)
          << ',' << format_6g(tb.budget.expanded_U) << '\n';
    }
  }
}

std::vector<SweepCsvRow> read_sweep_csv(std::istream& in) {
  return read_rows<SweepCsvRow>(in, kSweepCsvHeader, 5, [](const auto& f, std::size_t off) {
    return SweepCsvRow{f[0], f[1], parse_number(f[2], off), parse_number(f[3], off), parse_number(f[4], off)};
  });
}

std::vector<BudgetCsvRow> read_budget_csv(std::istream& in) {
  return read_rows<BudgetCsvRow>(in, kBudgetCsvHeader, 7, [](const auto& f, std::size_t off) {
    return BudgetCsvRow{f[0],
                        parse_number(f[1], off),
                        f[2],
                        parse_number(f[3], off),
                        parse_number(f[4], off),
                        parse_number(f[5], off),
                        parse_number(f[6], off)};
  });
}

void emit_sweep_report(const std::vector<SweepResult>& sweeps, const std::vector<TubeBudget>& budgets,
                       const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
  };
  {
    auto f = open(dir / "sweeps.csv");
    write_sweep_csv(f, sweeps);
    if (!f) throw std::runtime_error("write failed: " + (dir / "sweeps.csv").string());
  }
  {
    auto f = open(dir / "budget.csv");
    write_budget_csv(f, budgets);
    if (!f) throw std::runtime_error("write failed: " + (dir / "budget.csv").string());
  }
}

}  // namespace radtherm
