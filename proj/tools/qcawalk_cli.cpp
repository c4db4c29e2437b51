// qcawalk: run / report / calibrate / validate experiment configs.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "qcawalk/errors.hpp"
#include "qcawalk/experiment.hpp"
#include "qcawalk/noise.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, failure = 1, bad_config = 2, resource = 3 };

fs::path output_dir_for(const qcaw::ExperimentConfig& cfg, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return fs::path("out") / cfg.name;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int workers_flag) {
  const auto cfg = qcaw::load_config(config_path);
  const int workers = workers_flag > 0 ? workers_flag : qcaw::workers_from_env();
  const auto dir = output_dir_for(cfg, out_dir);
  const auto out = qcaw::run_experiment(cfg, workers);
  qcaw::write_outputs(dir, out);
  if (cfg.write_csv) qcaw::emit_report(dir);
  std::cout << "wrote " << (dir / "results.json").string() << " (" << out.results["runs"].size()
            << " runs, config " << out.results["config_hash"].get<std::string>() << ")\n";
  return ok;
}

int cmd_report(const std::string& dir) {
  const auto files = qcaw::emit_report(dir);
  std::cout << "wrote " << files.series.size() << " series CSVs, " << files.sweep.string() << ", "
            << files.summary.string() << "\n";
  return ok;
}

int cmd_calibrate(double ratio, double tolerance) {
  qcaw::NoiseModel templ;
  templ.relaxation_rate = ratio;
  templ.dephasing_rate = 1.0;
  const auto res = qcaw::calibrate_rates(qcaw::reference_gate_fidelities(), templ, tolerance);
  std::cout << qcaw::calibration_json(res).dump(2) << "\n";
  return res.within_tolerance ? ok : failure;
}

int cmd_validate(const std::string& config_path) {
  const auto cfg = qcaw::load_config(config_path);
  const auto points = qcaw::expand_points(cfg);
  std::cout << "ok: " << cfg.runs.size() << " runs, " << points.size() << " points, config "
            << qcaw::config_hash(cfg) << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QCA quantum walk and walk-search simulator"};
  app.set_version_flag("--version", QCAWALK_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 0;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "output directory (default: config output_dir or out/<name>)");
  run->add_option("-j,--workers", workers,
                  std::string("worker threads (default: $") + qcaw::kWorkersEnv + " or 1)")
      ->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "CSV series, sweep table and summary from a run directory");
  report->add_option("dir", report_dir, "directory containing results.json")->required()->check(CLI::ExistingDirectory);

  double ratio = 1.0;
  double tolerance = 1e-3;
  auto* calibrate = app.add_subcommand("calibrate", "fit (K, delta) to the reference gate fidelities");
  calibrate->add_option("--ratio", ratio, "K:delta ratio to fit along")->check(CLI::NonNegativeNumber);
  calibrate->add_option("--tolerance", tolerance, "allowed |fidelity residual|")->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", validate_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_dir, workers);
    if (*report) return cmd_report(report_dir);
    if (*calibrate) return cmd_calibrate(ratio, tolerance);
    if (*validate) return cmd_validate(validate_path);
  } catch (const qcaw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bad_config;
  } catch (const qcaw::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return resource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return failure;
}
