#include "agsf/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "agsf/errors.hpp"
#include "agsf/metrics.hpp"

namespace agsf {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNan;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_sims < 1) throw ConfigError("n_sims must be at least 1");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (filters.empty()) throw ConfigError("no filters configured");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  for (const FilterConfig& f : filters) f.validate();
}

StateSpaceModel build_model(const ExperimentConfig& cfg) {
  if (cfg.model_kind == ModelKind::Tracking) {
    TrackingModelConfig tc = cfg.tracking;
    tc.horizon = cfg.horizon;  // regime boundaries follow the experiment horizon
    return make_tracking_model(tc);
  }
  return make_switching_model(cfg.switching);
}

std::uint64_t trajectory_seed(std::uint64_t base_seed, int sim_index) {
  return RngStream::derive(RngStream::derive(base_seed, sim_index + 1), 0);
}

std::uint64_t filter_seed(std::uint64_t base_seed, int sim_index,
                          int filter_index) {
  return RngStream::derive(RngStream::derive(base_seed, sim_index + 1),
                           filter_index + 1);
}

RecordSummary summarize(const ResultRecord& record) {
  std::vector<double> mse_ok, lpe_ok, rt_ok;
  for (int i = 0; i < record.n_seeds(); ++i) {
    if (record.diverged[i]) continue;
    if (i < static_cast<int>(record.mse_per_seed.size()))
      mse_ok.push_back(record.mse_per_seed[i]);
    if (i < static_cast<int>(record.lpe_per_seed.size()))
      lpe_ok.push_back(record.lpe_per_seed[i]);
    if (i < static_cast<int>(record.runtime_per_seed.size()))
      rt_ok.push_back(record.runtime_per_seed[i]);
  }
  int n_div = 0;
  for (bool d : record.diverged) n_div += d ? 1 : 0;
  RecordSummary s;
  s.mse_mean = mean_of(mse_ok);
  s.mse_std = sample_std(mse_ok);
  s.lpe_mean = mean_of(lpe_ok);
  s.lpe_std = sample_std(lpe_ok);
  s.runtime_mean = mean_of(rt_ok);
  s.diverged_frac = record.n_seeds() > 0
                        ? static_cast<double>(n_div) / record.n_seeds()
                        : 0.0;
  return s;
}

namespace {

struct SeedOutcome {
  double mse = kNan;
  double lpe = kNan;
  double runtime = 0.0;
  bool diverged = false;
};

SeedOutcome run_one(const StateSpaceModel& model, const Trajectory& traj,
                    const ExperimentConfig& cfg, const FilterConfig& filter,
                    std::uint64_t seed, std::ostream* diag) {
  SeedOutcome outcome;
  std::vector<Eigen::VectorXd> estimates;
  estimates.reserve(traj.length());
  double neg_log_acc = 0.0;

  const auto start = std::chrono::steady_clock::now();
  try {
    run_filter_each(
        model, traj, filter, seed,
        [&](int t, const FilterStepOutput& step) {
          if (cfg.compute_mse) {
            estimates.push_back(mixture_moments(step.posterior).mean);
          }
          if (cfg.compute_lpe) {
            const GaussianMixture& mix =
                cfg.lpe_on_posterior ? step.posterior : step.predictive;
            double log_p = mixture_log_pdf(mix, traj.states[t - 1]);
            if (!(log_p >= kLogDensityFloor)) log_p = kLogDensityFloor;
            neg_log_acc -= log_p;
          }
          if (diag) {
            write_step_diagnostics_jsonl(*diag, filter.label(), t, step);
          }
        });
  } catch (const AgsfError&) {
    outcome.diverged = true;
  }
  const auto stop = std::chrono::steady_clock::now();
  outcome.runtime = std::chrono::duration<double>(stop - start).count();

  if (!outcome.diverged) {
    if (cfg.compute_mse) {
      outcome.mse = mse(estimates, traj.states);
      if (!std::isfinite(outcome.mse)) outcome.diverged = true;
    }
    if (cfg.compute_lpe) {
      outcome.lpe = neg_log_acc / traj.length();
      if (!std::isfinite(outcome.lpe)) outcome.diverged = true;
    }
  }
  return outcome;
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const StateSpaceModel model = build_model(cfg);
  const int n_filters = static_cast<int>(cfg.filters.size());

  std::vector<ResultRecord> records(n_filters);
  for (int f = 0; f < n_filters; ++f) {
    records[f].algorithm = cfg.filters[f].label();
    records[f].params = cfg.filters[f].params();
    records[f].mse_per_seed.assign(cfg.n_sims, kNan);
    records[f].lpe_per_seed.assign(cfg.n_sims, kNan);
    records[f].runtime_per_seed.assign(cfg.n_sims, 0.0);
    records[f].diverged.assign(cfg.n_sims, false);
  }

  std::atomic<int> next_seed{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const int i = next_seed.fetch_add(1);
      if (i >= cfg.n_sims || failed.load()) return;
      try {
        RngStream sim_rng(trajectory_seed(cfg.base_seed, i));
        const Trajectory traj = simulate(model, cfg.horizon, sim_rng);
        for (int f = 0; f < n_filters; ++f) {
          std::ofstream diag_file;
          std::ostream* diag = nullptr;
          if (cfg.emit_diagnostics) {
            // one diagnostics stream per (filter, seed)
            const std::string name = "diagnostics_f" + std::to_string(f) +
                                     "_seed" + std::to_string(i) + ".jsonl";
            diag_file.open(cfg.diagnostics_dir.empty()
                               ? std::filesystem::path(name)
                               : cfg.diagnostics_dir / name);
            if (diag_file) diag = &diag_file;
          }
          const SeedOutcome outcome =
              run_one(model, traj, cfg, cfg.filters[f],
                      filter_seed(cfg.base_seed, i, f), diag);
          records[f].mse_per_seed[i] = outcome.mse;
          records[f].lpe_per_seed[i] = outcome.lpe;
          records[f].runtime_per_seed[i] = outcome.runtime;
          records[f].diverged[i] = outcome.diverged;
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure = e.what();
        failed.store(true);
        return;
      }
    }
  };

  const int n_workers = std::min(cfg.jobs, cfg.n_sims);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failed.load()) {
    throw AgsfError("experiment aborted: " + failure);
  }
  return records;
}

std::string format_metric(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void emit_report(const std::vector<ResultRecord>& records, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open report for writing: " + path.string());

  if (format == ReportFormat::Csv) {
    out << "algorithm,params,mse_mean,mse_std,lpe_mean,lpe_std,runtime_mean,"
           "diverged_frac\n";
    for (const ResultRecord& r : records) {
      const RecordSummary s = summarize(r);
      out << r.algorithm << ',' << r.params << ',' << format_metric(s.mse_mean)
          << ',' << format_metric(s.mse_std) << ',' << format_metric(s.lpe_mean)
          << ',' << format_metric(s.lpe_std) << ','
          << format_metric(s.runtime_mean) << ','
          << format_metric(s.diverged_frac) << '\n';
    }
    return;
  }

  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRecord& r : records) {
    const RecordSummary s = summarize(r);
    nlohmann::json rec;
    rec["algorithm"] = r.algorithm;
    rec["params"] = r.params;
    auto set_or_null = [&rec](const char* key, double v) {
      if (std::isfinite(v))
        rec[key] = v;
      else
        rec[key] = nullptr;
    };
    set_or_null("mse_mean", s.mse_mean);
    set_or_null("mse_std", s.mse_std);
    set_or_null("lpe_mean", s.lpe_mean);
    set_or_null("lpe_std", s.lpe_std);
    set_or_null("runtime_mean", s.runtime_mean);
    rec["diverged_frac"] = s.diverged_frac;
    auto per_seed = [](const std::vector<double>& v) {
      nlohmann::json a = nlohmann::json::array();
      for (double x : v) {
        if (std::isfinite(x))
          a.push_back(x);
        else
          a.push_back(nullptr);
      }
      return a;
    };
    rec["mse_per_seed"] = per_seed(r.mse_per_seed);
    rec["lpe_per_seed"] = per_seed(r.lpe_per_seed);
    rec["runtime_per_seed"] = per_seed(r.runtime_per_seed);
    rec["diverged"] = std::vector<bool>(r.diverged.begin(), r.diverged.end());
    arr.push_back(rec);
  }
  out << arr.dump(2) << '\n';
}

std::vector<ResultRecord> read_records_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report for reading: " + path.string());
  nlohmann::json arr = nlohmann::json::parse(in, nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) {
    throw IoError("malformed JSON report: " + path.string());
  }
  std::vector<ResultRecord> records;
  for (const nlohmann::json& rec : arr) {
    ResultRecord r;
    r.algorithm = rec.at("algorithm").get<std::string>();
    r.params = rec.at("params").get<std::string>();
    auto read_per_seed = [&rec](const char* key) {
      std::vector<double> v;
      for (const nlohmann::json& x : rec.at(key)) {
        v.push_back(x.is_null() ? kNan : x.get<double>());
      }
      return v;
    };
    r.mse_per_seed = read_per_seed("mse_per_seed");
    r.lpe_per_seed = read_per_seed("lpe_per_seed");
    r.runtime_per_seed = read_per_seed("runtime_per_seed");
    for (const nlohmann::json& d : rec.at("diverged")) {
      r.diverged.push_back(d.get<bool>());
    }
    records.push_back(std::move(r));
  }
  return records;
}

RhoTrace collect_rho_trace(const ExperimentConfig& cfg,
                           const FilterConfig& filter, int sim_index) {
  const StateSpaceModel model = build_model(cfg);
  RngStream sim_rng(trajectory_seed(cfg.base_seed, sim_index));
  const Trajectory traj = simulate(model, cfg.horizon, sim_rng);

  RhoTrace trace;
  run_filter_each(
      model, traj, filter, filter_seed(cfg.base_seed, sim_index, 0),
      [&](int t, const FilterStepOutput& step) {
        trace.steps.push_back(t);
        if (!traj.inputs.empty()) trace.inputs.push_back(traj.inputs[t - 1]);
        const std::vector<double>& rho = step.diagnostics.adaptive_rho;
        if (rho.empty()) {
          trace.rho_mean.push_back(kNan);
          trace.rho_min.push_back(kNan);
          trace.rho_max.push_back(kNan);
          return;
        }
        double lo = rho[0], hi = rho[0], acc = 0.0;
        for (double v : rho) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          acc += v;
        }
        trace.rho_mean.push_back(acc / static_cast<double>(rho.size()));
        trace.rho_min.push_back(lo);
        trace.rho_max.push_back(hi);
      });
  return trace;
}

void write_rho_trace(const RhoTrace& trace, ReportFormat format,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open trace for writing: " + path.string());
  if (format == ReportFormat::Csv) {
    out << "t,u,rho2_mean,rho2_min,rho2_max\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      out << trace.steps[i] << ',';
      if (!trace.inputs.empty()) out << format_metric(trace.inputs[i]);
      out << ',' << format_metric(trace.rho_mean[i]) << ','
          << format_metric(trace.rho_min[i]) << ','
          << format_metric(trace.rho_max[i]) << '\n';
    }
    return;
  }
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    nlohmann::json rec;
    rec["t"] = trace.steps[i];
    if (!trace.inputs.empty()) rec["u"] = trace.inputs[i];
    rec["rho2_mean"] = trace.rho_mean[i];
    rec["rho2_min"] = trace.rho_min[i];
    rec["rho2_max"] = trace.rho_max[i];
    out << rec.dump() << '\n';
  }
}

}  // namespace agsf
