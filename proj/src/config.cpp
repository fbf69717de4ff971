#include "agsf/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "agsf/errors.hpp"

namespace agsf {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& known,
                  const std::string& ctx) {
  if (!obj.is_object()) throw ConfigError(ctx + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + ctx);
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

Eigen::VectorXd to_vector(const json& arr, const std::string& ctx) {
  if (!arr.is_array()) throw ConfigError(ctx + " must be an array");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

Eigen::MatrixXd to_matrix(const json& rows, const std::string& ctx) {
  if (!rows.is_array() || rows.empty()) {
    throw ConfigError(ctx + " must be a nested array");
  }
  const std::size_t n = rows.size();
  Eigen::MatrixXd m(n, rows[0].size());
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != static_cast<std::size_t>(m.cols())) {
      throw ConfigError(ctx + " rows differ in length");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

AugmentationPolicy parse_policy(const json& obj, const std::string& ctx) {
  require_keys(obj, {"kind", "rho", "delta"}, ctx);
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "proportional") {
    return AugmentationPolicy::proportional(obj.at("rho").get<double>());
  }
  if (kind == "adaptive") {
    return AugmentationPolicy::adaptive();
  }
  if (kind == "fixed") {
    return AugmentationPolicy::fixed(to_matrix(obj.at("delta"), ctx + ".delta"));
  }
  throw ConfigError("unknown policy kind '" + kind + "' in " + ctx);
}

FilterConfig parse_filter(const json& obj, const std::string& ctx) {
  require_keys(obj,
               {"algorithm", "M", "N", "L", "predict_policy", "update_policy",
                "init_policy", "ess_threshold", "unscented", "pf_resampling",
                "pf_always_resample", "agsf_resample"},
               ctx);
  FilterConfig f;
  f.algorithm = algorithm_from_name(obj.at("algorithm").get<std::string>());
  f.num_components = get_or(obj, "M", 1);
  f.predict_splits = get_or(obj, "N", 1);
  f.update_splits = get_or(obj, "L", 1);
  if (obj.contains("predict_policy")) {
    f.predict_policy = parse_policy(obj["predict_policy"], ctx + ".predict_policy");
  }
  if (obj.contains("update_policy")) {
    f.update_policy = parse_policy(obj["update_policy"], ctx + ".update_policy");
  }
  if (obj.contains("init_policy")) {
    f.init_policy = parse_policy(obj["init_policy"], ctx + ".init_policy");
  }
  f.ess_threshold = get_or(obj, "ess_threshold", 0.5);
  if (obj.contains("unscented")) {
    const json& u = obj["unscented"];
    require_keys(u, {"alpha", "beta", "kappa"}, ctx + ".unscented");
    f.unscented.alpha = get_or(u, "alpha", 1.0);
    f.unscented.beta = get_or(u, "beta", 2.0);
    if (u.contains("kappa") && !u["kappa"].is_null()) {
      f.unscented.kappa = u["kappa"].get<double>();
    }
  }
  if (obj.contains("pf_resampling")) {
    const std::string scheme = obj["pf_resampling"].get<std::string>();
    if (scheme == "multinomial") {
      f.pf_resampling = ResampleScheme::Multinomial;
    } else if (scheme == "systematic") {
      f.pf_resampling = ResampleScheme::Systematic;
    } else {
      throw ConfigError("unknown resampling scheme '" + scheme + "'");
    }
  }
  f.pf_always_resample = get_or(obj, "pf_always_resample", false);
  f.agsf_resample = get_or(obj, "agsf_resample", true);
  f.validate();
  return f;
}

TrackingModelConfig parse_tracking(const json& obj) {
  require_keys(obj,
               {"kind", "a", "sigma2", "dt", "initial_state",
                "initial_cov_diag", "frozen_turn_rate_jacobian"},
               "model");
  TrackingModelConfig tc;
  tc.turn_acceleration = get_or(obj, "a", tc.turn_acceleration);
  tc.obs_noise_var = get_or(obj, "sigma2", tc.obs_noise_var);
  tc.dt = get_or(obj, "dt", tc.dt);
  if (obj.contains("initial_state")) {
    const Eigen::VectorXd v = to_vector(obj["initial_state"], "initial_state");
    if (v.size() != 4) throw ConfigError("initial_state must have 4 entries");
    tc.initial_state = v;
  }
  if (obj.contains("initial_cov_diag")) {
    const Eigen::VectorXd v =
        to_vector(obj["initial_cov_diag"], "initial_cov_diag");
    if (v.size() != 4) throw ConfigError("initial_cov_diag must have 4 entries");
    tc.initial_cov_diag = v;
  }
  tc.frozen_turn_rate_jacobian =
      get_or(obj, "frozen_turn_rate_jacobian", false);
  return tc;
}

SwitchingModelConfig parse_switching(const json& obj) {
  require_keys(obj,
               {"kind", "dim", "phi", "beta", "sigma", "process_var",
                "obs_var", "noise_mean", "switch_period"},
               "model");
  SwitchingModelConfig sc;
  sc.dim = get_or(obj, "dim", sc.dim);
  sc.phi = get_or(obj, "phi", sc.phi);
  sc.beta = get_or(obj, "beta", sc.beta);
  sc.sigma = get_or(obj, "sigma", sc.sigma);
  sc.process_var = get_or(obj, "process_var", sc.process_var);
  sc.obs_var = get_or(obj, "obs_var", sc.obs_var);
  sc.noise_mean = get_or(obj, "noise_mean", sc.noise_mean);
  sc.switch_period = get_or(obj, "switch_period", sc.switch_period);
  return sc;
}

// Cartesian sweep over filter parameters, expanding one FilterConfig
// per grid point.
std::vector<FilterConfig> expand_sweep(const json& obj) {
  require_keys(obj, {"filter", "axes"}, "sweep");
  const FilterConfig base = parse_filter(obj.at("filter"), "sweep.filter");
  const json& axes = obj.at("axes");
  require_keys(axes, {"M", "N", "L", "rho1", "rho2", "ess_threshold"},
               "sweep.axes");

  std::vector<FilterConfig> grid{base};
  auto expand = [&grid](const json& values, auto apply) {
    std::vector<FilterConfig> next;
    for (const FilterConfig& f : grid) {
      for (const json& v : values) {
        FilterConfig g = f;
        apply(g, v);
        next.push_back(std::move(g));
      }
    }
    grid = std::move(next);
  };
  if (axes.contains("M")) {
    expand(axes["M"],
           [](FilterConfig& f, const json& v) { f.num_components = v.get<int>(); });
  }
  if (axes.contains("N")) {
    expand(axes["N"],
           [](FilterConfig& f, const json& v) { f.predict_splits = v.get<int>(); });
  }
  if (axes.contains("L")) {
    expand(axes["L"],
           [](FilterConfig& f, const json& v) { f.update_splits = v.get<int>(); });
  }
  if (axes.contains("rho1")) {
    expand(axes["rho1"], [](FilterConfig& f, const json& v) {
      if (f.predict_policy.kind != AugmentationPolicy::Kind::Proportional) {
        throw ConfigError("rho1 sweep requires a proportional predict policy");
      }
      f.predict_policy = AugmentationPolicy::proportional(v.get<double>());
    });
  }
  if (axes.contains("rho2")) {
    expand(axes["rho2"], [](FilterConfig& f, const json& v) {
      if (f.update_policy.kind != AugmentationPolicy::Kind::Proportional) {
        throw ConfigError("rho2 sweep requires a proportional update policy");
      }
      f.update_policy = AugmentationPolicy::proportional(v.get<double>());
    });
  }
  if (axes.contains("ess_threshold")) {
    expand(axes["ess_threshold"], [](FilterConfig& f, const json& v) {
      f.ess_threshold = v.get<double>();
    });
  }
  for (FilterConfig& f : grid) f.validate();
  return grid;
}

ExperimentConfig parse_config_json(const json& root) {
  require_keys(root,
               {"model", "horizon", "n_sims", "base_seed", "metrics",
                "lpe_on_posterior", "emit_diagnostics", "filters", "sweep"},
               "config");
  ExperimentConfig cfg;

  const json& model = root.at("model");
  if (!model.contains("kind")) throw ConfigError("model.kind is required");
  const std::string kind = model["kind"].get<std::string>();
  if (kind == "tracking") {
    cfg.model_kind = ModelKind::Tracking;
    cfg.tracking = parse_tracking(model);
  } else if (kind == "switching") {
    cfg.model_kind = ModelKind::Switching;
    cfg.switching = parse_switching(model);
  } else {
    throw ConfigError("unknown model kind '" + kind + "'");
  }

  cfg.horizon = get_or(root, "horizon", cfg.horizon);
  cfg.n_sims = get_or(root, "n_sims", cfg.n_sims);
  cfg.base_seed = get_or<std::uint64_t>(root, "base_seed", cfg.base_seed);
  if (root.contains("metrics")) {
    cfg.compute_mse = false;
    cfg.compute_lpe = false;
    for (const json& m : root["metrics"]) {
      const std::string name = m.get<std::string>();
      if (name == "mse") {
        cfg.compute_mse = true;
      } else if (name == "lpe") {
        cfg.compute_lpe = true;
      } else {
        throw ConfigError("unknown metric '" + name + "'");
      }
    }
  }
  cfg.lpe_on_posterior = get_or(root, "lpe_on_posterior", false);
  cfg.emit_diagnostics = get_or(root, "emit_diagnostics", false);

  if (root.contains("filters")) {
    int i = 0;
    for (const json& f : root["filters"]) {
      cfg.filters.push_back(parse_filter(f, "filters[" + std::to_string(i) + "]"));
      ++i;
    }
  }
  if (root.contains("sweep")) {
    for (FilterConfig& f : expand_sweep(root["sweep"])) {
      cfg.filters.push_back(std::move(f));
    }
  }
  // A filterless config is still valid for `simulate`; run_experiment
  // rejects it through ExperimentConfig::validate.
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("malformed JSON config");
  try {
    return parse_config_json(root);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_experiment_config(text);
}

}  // namespace agsf
