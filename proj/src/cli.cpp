#include "agsf/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "agsf/config.hpp"
#include "agsf/errors.hpp"

namespace agsf {

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
  std::string format = "csv";
  int jobs = 0;  // 0: resolve from AGSF_JOBS, else 1
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path, "config file path");
  if (config_required) opt->required();
  cmd->add_option("--seed", args.seed, "base random seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--format", args.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", args.jobs, "parallel seed workers");
}

int resolve_jobs(int cli_jobs) {
  if (cli_jobs > 0) return cli_jobs;
  if (const char* env = std::getenv("AGSF_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

ReportFormat to_format(const std::string& f) {
  return f == "json" ? ReportFormat::Json : ReportFormat::Csv;
}

ExperimentConfig load_with_overrides(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment_config(args.config_path);
  if (args.seed_given) cfg.base_seed = args.seed;
  cfg.jobs = resolve_jobs(args.jobs);
  return cfg;
}

int do_simulate(const CommonArgs& args) {
  const ExperimentConfig cfg = load_with_overrides(args);
  const StateSpaceModel model = build_model(cfg);
  RngStream rng(trajectory_seed(cfg.base_seed, 0));
  const Trajectory traj = simulate(model, cfg.horizon, rng);
  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  if (to_format(args.format) == ReportFormat::Csv) {
    write_trajectory_csv(traj, dir / "trajectory.csv");
    std::cout << (dir / "trajectory.csv").string() << "\n";
  } else {
    write_trajectory_jsonl(traj, dir / "trajectory.jsonl");
    std::cout << (dir / "trajectory.jsonl").string() << "\n";
  }
  return 0;
}

int do_run(const CommonArgs& args, bool require_sweep) {
  ExperimentConfig cfg = load_with_overrides(args);
  if (require_sweep && cfg.filters.empty()) {
    throw ConfigError("sweep requires a sweep section in the config");
  }
  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  if (cfg.emit_diagnostics) cfg.diagnostics_dir = dir;

  const std::vector<ResultRecord> records = run_experiment(cfg);
  const ReportFormat format = to_format(args.format);
  const std::filesystem::path report =
      dir / (format == ReportFormat::Csv ? "report.csv" : "report.json");
  emit_report(records, format, report);
  std::cout << report.string() << "\n";

  for (const ResultRecord& r : records) {
    const RecordSummary s = summarize(r);
    if (s.diverged_frac >= 1.0) return 2;
  }
  return 0;
}

int do_rho_trace(const CommonArgs& args) {
  const ExperimentConfig cfg = load_with_overrides(args);
  const FilterConfig* chosen = nullptr;
  for (const FilterConfig& f : cfg.filters) {
    const bool adaptive =
        f.update_policy.kind == AugmentationPolicy::Kind::AdaptiveProportional ||
        f.predict_policy.kind == AugmentationPolicy::Kind::AdaptiveProportional;
    if (is_agsf(f.algorithm) && adaptive) {
      chosen = &f;
      break;
    }
  }
  if (!chosen) {
    throw ConfigError("rho-trace needs an AGSF filter with an adaptive policy");
  }
  const RhoTrace trace = collect_rho_trace(cfg, *chosen, 0);
  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  const ReportFormat format = to_format(args.format);
  const std::filesystem::path path =
      dir / (format == ReportFormat::Csv ? "rho_trace.csv" : "rho_trace.jsonl");
  write_rho_trace(trace, format, path);
  std::cout << path.string() << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Gaussian, particle, and augmented Gaussian sum filtering"};
  app.require_subcommand(1);

  CommonArgs sim_args, run_args, sweep_args, rho_args;
  CLI::App* sim = app.add_subcommand("simulate", "simulate a trajectory");
  add_common(sim, sim_args, true);
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  add_common(run, run_args, true);
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep, sweep_args, true);
  CLI::App* rho = app.add_subcommand("rho-trace", "emit adaptive rho series");
  add_common(rho, rho_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (sim->parsed()) return do_simulate(sim_args);
    if (run->parsed()) return do_run(run_args, false);
    if (sweep->parsed()) return do_run(sweep_args, true);
    if (rho->parsed()) return do_rho_trace(rho_args);
  } catch (const AgsfError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace agsf
