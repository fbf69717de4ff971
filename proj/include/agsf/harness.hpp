#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agsf/filters.hpp"
#include "agsf/models.hpp"

namespace agsf {

enum class ModelKind { Tracking, Switching };
enum class ReportFormat { Csv, Json };

struct ExperimentConfig {
  ModelKind model_kind = ModelKind::Tracking;
  TrackingModelConfig tracking;
  SwitchingModelConfig switching;
  std::vector<FilterConfig> filters;
  int horizon = 200;
  int n_sims = 10;
  std::uint64_t base_seed = 1;
  bool compute_mse = true;
  bool compute_lpe = true;
  // Evaluate the log-probability metric on the posterior mixture instead
  // of the predictive one.
  bool lpe_on_posterior = false;
  bool emit_diagnostics = false;
  std::filesystem::path diagnostics_dir;  // destination for per-run JSONL streams
  int jobs = 1;

  void validate() const;
};

StateSpaceModel build_model(const ExperimentConfig& cfg);

struct ResultRecord {
  std::string algorithm;
  std::string params;
  std::vector<double> mse_per_seed;
  std::vector<double> lpe_per_seed;
  std::vector<double> runtime_per_seed;  // seconds
  std::vector<bool> diverged;

  int n_seeds() const { return static_cast<int>(diverged.size()); }
};

// Aggregates over non-diverged seeds; diverged runs are reported only
// through diverged_frac.
struct RecordSummary {
  double mse_mean, mse_std;
  double lpe_mean, lpe_std;
  double runtime_mean;
  double diverged_frac;
};
RecordSummary summarize(const ResultRecord& record);

// Per-step adaptive trace of one run (the switching-model figure data).
struct RhoTrace {
  std::vector<int> steps;
  std::vector<double> inputs;  // empty when the model has no input
  std::vector<double> rho_mean, rho_min, rho_max;
};

// One shared trajectory per seed, every filter consuming the identical
// observation sequence; seeds fan out over a worker pool and results are
// reduced in seed order.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg);

// Deterministic seed scheme shared by the harness and the acceptance
// tests: one stream per simulated trajectory and one per filter run.
std::uint64_t trajectory_seed(std::uint64_t base_seed, int sim_index);
std::uint64_t filter_seed(std::uint64_t base_seed, int sim_index,
                          int filter_index);

void emit_report(const std::vector<ResultRecord>& records, ReportFormat format,
                 const std::filesystem::path& path);
std::vector<ResultRecord> read_records_json(const std::filesystem::path& path);

// Runs one seed of the configured experiment with the given filter and
// collects its per-step update rhos.
RhoTrace collect_rho_trace(const ExperimentConfig& cfg,
                           const FilterConfig& filter, int sim_index);

void write_rho_trace(const RhoTrace& trace, ReportFormat format,
                     const std::filesystem::path& path);

// Formats with 6 significant digits, scientific from 1e6 upward.
std::string format_metric(double v);

}  // namespace agsf
