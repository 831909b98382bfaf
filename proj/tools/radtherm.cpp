// radtherm: command-line entry points for the radiation-thermometry toolkit.
//
// Exit codes: 0 success, 1 domain or I/O error, 2 usage error.

#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "json_config.hpp"
#include "radtherm/errors.hpp"
#include "radtherm/frame_store.hpp"
#include "radtherm/json_codec.hpp"
#include "radtherm/sensitivity.hpp"
#include "radtherm/service.hpp"
#include "radtherm/surrogate.hpp"
#include "radtherm/units.hpp"

namespace fs = std::filesystem;
using namespace radtherm;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

constexpr const char* kDataDirEnv = "RADTHERM_DATA_DIR";

fs::path default_data_dir() {
  if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env != '\0') return env;
  return "radtherm-data";
}

// "950", "950C" and "950c" are Celsius, "1223.15K" is kelvin.
std::optional<double> parse_temperature(std::string text) {
  if (text.empty()) return std::nullopt;
  bool kelvin = false;
  const char last = text.back();
  if (last == 'C' || last == 'c') {
    text.pop_back();
  } else if (last == 'K' || last == 'k') {
    kelvin = true;
    text.pop_back();
  }
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) return std::nullopt;
  return kelvin ? v : celsius_to_kelvin(v);
}

const CLI::Validator kTemperature(
    [](std::string& s) { return parse_temperature(s) ? std::string{} : "expected a temperature like 950C or 1223.15K"; },
    "TEMP");

double kelvin_of(const std::string& text) { return *parse_temperature(text); }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
  if (!f) throw std::runtime_error("write failed for " + out);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SceneFlags {
  std::string model = "D";
  std::string wall = "1105C";
  std::string gas = "980C";
  double eps = 0.82;
  std::optional<double> eps_mean, eps_sigma;
  double alpha = 0.05;
  std::optional<double> alpha_mean, alpha_sigma;
  double length = 1.0;
  double band_lo = 3.7;
  double band_hi = 4.2;
  int nodes = 64;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", model, "Measurement model A, B, C or D")
        ->check(CLI::IsMember({"A", "B", "C", "D", "a", "b", "c", "d"}))
        ->capture_default_str();
    cmd->add_option("--tw", wall, "Wall temperature")->check(kTemperature)->capture_default_str();
    cmd->add_option("--tg", gas, "Gas temperature")->check(kTemperature)->capture_default_str();
    cmd->add_option("--eps", eps, "Emissivity (height when --eps-mean is given)")->capture_default_str();
    cmd->add_option("--eps-mean", eps_mean, "Emissivity bell centre, um");
    cmd->add_option("--eps-sigma", eps_sigma, "Emissivity bell width, um");
    cmd->add_option("--alpha", alpha, "Gas absorption coefficient (height when --alpha-mean is given)")
        ->capture_default_str();
    cmd->add_option("--alpha-mean", alpha_mean, "Absorption bell centre, um");
    cmd->add_option("--alpha-sigma", alpha_sigma, "Absorption bell width, um");
    cmd->add_option("--length", length, "Gas path length")->capture_default_str();
    cmd->add_option("--band-lo", band_lo, "Sensor band lower edge, um")->capture_default_str();
    cmd->add_option("--band-hi", band_hi, "Sensor band upper edge, um")->capture_default_str();
    cmd->add_option("--nodes", nodes, "Quadrature nodes")->capture_default_str();
  }

  ModelKind kind() const { return parse_model_kind(std::string(1, static_cast<char>(std::toupper(model[0])))); }

  FurnaceScene scene(double tube_temp) const {
    FurnaceScene s;
    s.tube_temp = tube_temp;
    s.wall_temp = kelvin_of(wall);
    s.gas_temp = kelvin_of(gas);
    s.emissivity = (eps_mean || eps_sigma) ? SpectralCurve::bell(eps, eps_mean.value_or(3.95), eps_sigma.value_or(1.0))
                                           : SpectralCurve::constant(eps);
    s.absorption = (alpha_mean || alpha_sigma)
                       ? SpectralCurve::bell(alpha, alpha_mean.value_or(3.95), alpha_sigma.value_or(1.0))
                       : SpectralCurve::constant(alpha);
    s.path_length = length;
    s.band = Band(band_lo, band_hi);
    return s;
  }

  QuadratureConfig quadrature() const {
    QuadratureConfig q;
    q.node_count = nodes;
    q.validate();
    return q;
  }
};

std::string format_budget_line(const std::vector<TubeBudget>& budgets) {
  std::ostringstream ss;
  write_budget_csv(ss, budgets);
  return ss.str();
}

std::atomic<FrameService*> g_service{nullptr};

void on_signal(int) {
  if (FrameService* s = g_service.load()) s->stop();
}

int run(int argc, char** argv) {
  CLI::App app{"Radiation thermometry toolkit: forward models, inversion, sensitivity, surrogate and frame service"};
  app.name("radtherm");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", "radtherm 1.0");

  app.fallthrough();
  app.set_config("--config", "", "JSON file supplying any flag of the command");
  app.config_formatter(std::make_shared<cli::JsonConfig>(&app));
  std::function<void()> action;

  // forward -----------------------------------------------------------------
  SceneFlags fwd;
  std::string fwd_ts = "950C", fwd_out;
  auto* forward = app.add_subcommand("forward", "Band-integrated signal of a scene");
  fwd.add_to(forward);
  forward->add_option("--ts", fwd_ts, "Tube temperature")->check(kTemperature)->capture_default_str();
  forward->add_option("--out", fwd_out, "Write the result to a file");
  forward->callback([&] {
    action = [&] {
      const double s = forward_signal(fwd.kind(), fwd.scene(kelvin_of(fwd_ts)), fwd.quadrature());
      emit(fmt17(s) + "\n", fwd_out);
    };
  });

  // invert ------------------------------------------------------------------
  SceneFlags inv;
  double inv_signal = 0.0;
  std::string inv_unit = "C", inv_out;
  SolverConfig inv_cfg;
  auto* invert = app.add_subcommand("invert", "Tube temperature that reproduces a measured signal");
  inv.add_to(invert);
  invert->add_option("--signal", inv_signal, "Measured band-integrated signal")->required();
  invert->add_option("--unit", inv_unit, "Output unit C or K")->check(CLI::IsMember({"C", "K"}))->capture_default_str();
  invert->add_option("--tol", inv_cfg.tolerance, "Bracket tolerance, K")->capture_default_str();
  invert->add_option("--out", inv_out, "Write the result to a file");
  invert->callback([&] {
    action = [&] {
      const auto r = invert_signal(inv.kind(), inv.scene(inv_cfg.bracket_lo), inv_signal, inv_cfg, inv.quadrature());
      const double t = inv_unit == "K" ? r.tube_temp : kelvin_to_celsius(r.tube_temp);
      emit(fmt17(t) + "\n", inv_out);
    };
  });

  // sweep -------------------------------------------------------------------
  std::string sw_model = "B", sw_param = "all", sw_out;
  int sw_points = 41;
  auto* sweep = app.add_subcommand("sweep", "Perturbation sweep CSV");
  sweep->add_option("--model", sw_model, "Measurement model")->check(CLI::IsMember({"A", "B", "C", "D"}))->capture_default_str();
  sweep->add_option("--param", sw_param, "wavelength, emissivity, absorption, wall_temp, gas_temp or all")
      ->capture_default_str();
  sweep->add_option("--grid-points", sw_points, "Grid points per parameter")->capture_default_str();
  sweep->add_option("--out", sw_out, "Write the CSV to a file");
  sweep->callback([&] {
    action = [&] {
      const ModelKind kind = parse_model_kind(sw_model);
      std::vector<SweepResult> results;
      if (sw_param == "all") {
        results = sweep_model(kind, reference_tube_temps(), {}, sw_points);
      } else {
        const Parameter p = parse_parameter(sw_param);
        if (!applies_to(p, kind)) {
          throw DomainError("parameter " + sw_param + " does not enter model " + std::string(to_string(kind)));
        }
        results.push_back(perturbation_sweep(kind, ParameterSpec::reference(p, sw_points), reference_tube_temps()));
      }
      std::ostringstream ss;
      write_sweep_csv(ss, results);
      emit(ss.str(), sw_out);
    };
  });

  // budget ------------------------------------------------------------------
  std::string bu_model = "D", bu_out, bu_sweeps_out;
  double bu_k = 1.96;
  int bu_points = 41;
  auto* budget = app.add_subcommand("budget", "Uncertainty budget CSV from all parameter sweeps");
  budget->add_option("--model", bu_model, "Measurement model")->check(CLI::IsMember({"A", "B", "C", "D"}))->capture_default_str();
  budget->add_option("--k", bu_k, "Coverage factor")->capture_default_str();
  budget->add_option("--grid-points", bu_points, "Grid points per parameter")->capture_default_str();
  budget->add_option("--out", bu_out, "Write the budget CSV to a file");
  budget->add_option("--sweeps-out", bu_sweeps_out, "Also write the underlying sweep CSV");
  budget->callback([&] {
    action = [&] {
      const auto sweeps = sweep_model(parse_model_kind(bu_model), reference_tube_temps(), {}, bu_points);
      if (!bu_sweeps_out.empty()) {
        std::ostringstream ss;
        write_sweep_csv(ss, sweeps);
        emit(ss.str(), bu_sweeps_out);
      }
      emit(format_budget_line(budgets_from_sweeps(sweeps, bu_k)), bu_out);
    };
  });

  // dataset -----------------------------------------------------------------
  Eigen::Index ds_n = 100000;
  std::uint64_t ds_seed = 7;
  std::string ds_out;
  auto* dataset = app.add_subcommand("dataset", "Generate a labelled training set (CSV)");
  dataset->add_option("--n", ds_n, "Rows")->check(CLI::PositiveNumber)->capture_default_str();
  dataset->add_option("--seed", ds_seed, "RNG seed")->capture_default_str();
  dataset->add_option("--out", ds_out, "Output CSV (default: <data dir>/dataset.csv)");
  dataset->callback([&] {
    action = [&] {
      const fs::path out = ds_out.empty() ? default_data_dir() / "dataset.csv" : fs::path(ds_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      save_dataset(generate_dataset(ds_n, {}, ds_seed), out);
      std::cout << "wrote " << ds_n << " rows to " << out.string() << "\n";
    };
  });

  // train -------------------------------------------------------------------
  TrainConfig tr_cfg;
  std::string tr_data, tr_out;
  Eigen::Index tr_val_rows = 0;
  auto* train_cmd = app.add_subcommand("train", "Train the surrogate network");
  train_cmd->add_option("--data", tr_data, "Dataset CSV (default: <data dir>/dataset.csv)");
  train_cmd->add_option("--epochs", tr_cfg.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--lr", tr_cfg.adam.learning_rate, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--batch", tr_cfg.batch_size, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--seed", tr_cfg.seed, "Initialisation and shuffling seed")->capture_default_str();
  train_cmd->add_option("--validation-rows", tr_val_rows, "Held-out rows from the end of the dataset");
  train_cmd->add_flag("--verbose", tr_cfg.verbose, "Print the loss of every epoch to stderr");
  train_cmd->add_option("--out", tr_out, "Model file (default: <data dir>/model.mlpt)");
  train_cmd->callback([&] {
    action = [&] {
      const fs::path data = tr_data.empty() ? default_data_dir() / "dataset.csv" : fs::path(tr_data);
      const fs::path out = tr_out.empty() ? default_data_dir() / "model.mlpt" : fs::path(tr_out);
      tr_cfg.validation_rows = tr_val_rows;
      const TrainedModel trained = train(load_dataset(data), tr_cfg);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      save_model(trained.model, out);
      const auto& r = trained.report;
      const Json report = {{"model_file", out.string()},
                           {"epochs", r.epochs},
                           {"train_rows", r.train_rows},
                           {"validation_rows", r.validation_rows},
                           {"train_rms_K", r.train_rms},
                           {"validation_rms_K", r.validation_rms},
                           {"wall_time_s", r.wall_time_s}};
      std::cout << report.dump(2) << "\n";
    };
  });

  // bench -------------------------------------------------------------------
  std::string be_model, be_out;
  Eigen::Index be_n = 10000;
  std::uint64_t be_seed = 11;
  auto* bench_cmd = app.add_subcommand("bench", "Time the surrogate against bisection");
  bench_cmd->add_option("--model-file", be_model, "Model file (default: <data dir>/model.mlpt)");
  bench_cmd->add_option("--n", be_n, "Batch rows")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--seed", be_seed, "Seed of the benchmark batch")->capture_default_str();
  bench_cmd->add_option("--out", be_out, "Write the JSON report to a file");
  bench_cmd->callback([&] {
    action = [&] {
      const MlpModel model = load_model(be_model.empty() ? default_data_dir() / "model.mlpt" : fs::path(be_model));
      const LabeledDataset batch = generate_dataset(be_n, {}, be_seed);
      const BenchResult r = bench(model, batch.inputs);
      const Json report = {{"rows", be_n},
                           {"surrogate_seconds", r.surrogate_seconds},
                           {"bisection_seconds", r.bisection_seconds},
                           {"speedup", r.speedup},
                           {"solver_failures", r.solver_failures},
                           {"median_abs_diff_K", r.median_abs_diff},
                           {"p95_abs_diff_K", r.p95_abs_diff}};
      emit(report.dump(2) + "\n", be_out);
    };
  });

  // render ------------------------------------------------------------------
  std::string re_scene, re_out, re_meta;
  auto* render = app.add_subcommand("render", "Render a synthetic raw frame from a scene JSON");
  render->add_option("--scene", re_scene, "Scene JSON file")->required()->check(CLI::ExistingFile);
  render->add_option("--out", re_out, "Frame file (default: stdout)");
  render->add_option("--meta-out", re_meta, "Also write the frame metadata JSON");
  render->callback([&] {
    action = [&] {
      const SceneSpec spec = scene_from_json(Json::parse(slurp(re_scene)));
      ThermalFrame frame = render_synthetic_frame(spec);
      emit(encode_frame(frame), re_out);
      if (!re_meta.empty()) emit(frame_meta_json(frame).dump(2) + "\n", re_meta);
    };
  });

  // correct -----------------------------------------------------------------
  std::string co_frame, co_mask, co_method = "bisection", co_model, co_out;
  auto* correct = app.add_subcommand("correct", "Correct a raw frame file under a parameter mask");
  correct->add_option("--frame", co_frame, "Raw frame file")->required()->check(CLI::ExistingFile);
  correct->add_option("--mask", co_mask, "Mask JSON (default: default parameters everywhere)");
  correct->add_option("--method", co_method, "bisection or surrogate")
      ->check(CLI::IsMember({"bisection", "surrogate"}))
      ->capture_default_str();
  correct->add_option("--model-file", co_model, "Model file for the surrogate method");
  correct->add_option("--out", co_out, "Corrected frame file (default: stdout)");
  correct->callback([&] {
    action = [&] {
      const ThermalFrame raw = decode_frame(slurp(co_frame));
      const ParameterMask mask = co_mask.empty() ? ParameterMask{} : mask_from_json(Json::parse(slurp(co_mask)));
      mask.validate();
      std::optional<MlpModel> model;
      if (!co_model.empty()) model = load_model(co_model);
      const ThermalFrame out =
          correct_frame(raw, mask, parse_correction_method(co_method), model ? &*model : nullptr);
      emit(encode_frame(out), co_out);
      if (out.error_count > 0) std::cerr << out.error_count << " pixel(s) failed to invert\n";
    };
  });

  // serve -------------------------------------------------------------------
  std::string sv_host = "127.0.0.1", sv_dir, sv_model, sv_method = "bisection";
  int sv_port = 8080;
  bool sv_auto = false;
  auto* serve = app.add_subcommand("serve", "Run the frame service");
  serve->add_option("--host", sv_host, "Listen address")->capture_default_str();
  serve->add_option("--port", sv_port, "Listen port (0 picks a free port)")->capture_default_str();
  serve->add_option("--data-dir", sv_dir, "Store directory")->envname(kDataDirEnv);
  serve->add_option("--model-file", sv_model, "Surrogate model file");
  serve->add_flag("--auto-correct", sv_auto, "Correct every ingested frame");
  serve->add_option("--auto-method", sv_method, "Method for automatic correction")
      ->check(CLI::IsMember({"bisection", "surrogate"}))
      ->capture_default_str();
  serve->callback([&] {
    action = [&] {
      FrameStore store(sv_dir.empty() ? default_data_dir() : fs::path(sv_dir));
      std::shared_ptr<const MlpModel> model;
      if (!sv_model.empty()) model = std::make_shared<const MlpModel>(load_model(sv_model));
      ServiceOptions opts;
      opts.auto_correct = sv_auto;
      opts.auto_method = parse_correction_method(sv_method);
      FrameService service(store, model, opts);
      const int port = service.bind(sv_host, sv_port);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << sv_host << ":" << port << " (data: " << store.root().string() << ")"
                << std::endl;
      service.listen();
      g_service = nullptr;
    };
  });

  for (CLI::App* sub : app.get_subcommands({})) sub->allow_config_extras(CLI::config_extras_mode::error);
  app.allow_config_extras(CLI::config_extras_mode::error);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    action();
  } catch (const std::exception& e) {
    std::cerr << "radtherm: " << e.what() << "\n";
    return kExitDomain;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
