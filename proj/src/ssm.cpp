#include "agsf/ssm.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "agsf/errors.hpp"

namespace agsf {

void Trajectory::validate() const {
  if (observations.size() != states.size()) {
    throw ModelError("trajectory state/observation length mismatch");
  }
  if (!inputs.empty() && inputs.size() != states.size()) {
    throw ModelError("trajectory input length mismatch");
  }
}

Trajectory simulate(const StateSpaceModel& model, int horizon, RngStream& rng) {
  if (horizon < 1) throw ConfigError("simulation horizon must be at least 1");
  Trajectory traj;
  traj.states.reserve(horizon);
  traj.observations.reserve(horizon);

  Eigen::VectorXd x = sample_one(model.initial_belief, rng);
  for (int t = 1; t <= horizon; ++t) {
    const Transform f = model.dynamics(t);
    Eigen::VectorXd next = f.apply(x) + f.noise_mean_or_zero();
    if (model.process_noise_factor) {
      const Eigen::MatrixXd factor = model.process_noise_factor(t);
      next += factor * rng.normals(static_cast<int>(factor.cols()));
    } else {
      next += sample_one(
          Gaussian{Eigen::VectorXd::Zero(model.state_dim), f.noise_cov_at(x)},
          rng);
    }
    x = next;

    const Transform g = model.observation(t);
    const Eigen::VectorXd y = sample_one(
        Gaussian{g.apply(x) + g.noise_mean_or_zero(), g.noise_cov_at(x)}, rng);

    traj.states.push_back(x);
    traj.observations.push_back(y);
    if (model.input) traj.inputs.push_back(model.input(t));
  }
  return traj;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void write_number(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj,
                          const std::filesystem::path& path) {
  traj.validate();
  std::ofstream out = open_output(path);
  const int dx = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
  const int dy =
      traj.observations.empty() ? 0 : static_cast<int>(traj.observations[0].size());
  out << "t";
  for (int i = 1; i <= dx; ++i) out << ",x" << i;
  for (int i = 1; i <= dy; ++i) out << ",y" << i;
  out << ",u\n";
  for (int t = 0; t < traj.length(); ++t) {
    out << (t + 1);
    for (int i = 0; i < dx; ++i) {
      out << ',';
      write_number(out, traj.states[t][i]);
    }
    for (int i = 0; i < dy; ++i) {
      out << ',';
      write_number(out, traj.observations[t][i]);
    }
    out << ',';
    if (!traj.inputs.empty()) write_number(out, traj.inputs[t]);
    out << '\n';
  }
}

void write_trajectory_jsonl(const Trajectory& traj,
                            const std::filesystem::path& path) {
  traj.validate();
  std::ofstream out = open_output(path);
  for (int t = 0; t < traj.length(); ++t) {
    nlohmann::json rec;
    rec["t"] = t + 1;
    rec["x"] = std::vector<double>(traj.states[t].begin(), traj.states[t].end());
    rec["y"] = std::vector<double>(traj.observations[t].begin(),
                                   traj.observations[t].end());
    if (!traj.inputs.empty()) rec["u"] = traj.inputs[t];
    out << rec.dump() << '\n';
  }
}

Trajectory read_trajectory_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      throw IoError("malformed JSON line in " + path.string());
    }
    const std::vector<double> x = rec.at("x").get<std::vector<double>>();
    const std::vector<double> y = rec.at("y").get<std::vector<double>>();
    traj.states.push_back(
        Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()));
    traj.observations.push_back(
        Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()));
    if (rec.contains("u")) traj.inputs.push_back(rec["u"].get<double>());
  }
  traj.validate();
  return traj;
}

}  // namespace agsf
