#include "hypo/simulate.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hypo {

long ObservationDesign::stride() const {
  const double ratio = delta / fine_delta;
  const long s = std::lround(ratio);
  if (s < 1 || std::abs(ratio - static_cast<double>(s)) > 1e-12 * ratio)
    throw ConfigError("fine_delta " + std::to_string(fine_delta) + " does not divide delta " + std::to_string(delta));
  return s;
}

void ObservationDesign::validate() const {
  if (!(delta > 0.0)) throw ConfigError("design.delta must be positive");
  if (!(fine_delta > 0.0)) throw ConfigError("design.fine_delta must be positive");
  if (!(burn_in >= 0.0)) throw ConfigError("design.burn_in must be non-negative");
  if (n() < 2) throw ConfigError("design needs n >= 2 observations (t_horizon / delta)");
  (void)stride();
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer spreads nearby seeds apart
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::seed_seq seq{mix(seed), mix(stream ^ 0x5bd1e995ULL), mix(seed + 3 * stream + 1)};
  return std::mt19937_64(seq);
}

ObservationSet subsample(const RowMatrixXd& fine, const ObservationDesign& design) {
  const long stride = design.stride();
  ObservationSet obs;
  obs.design = design;
  const long rows = (static_cast<long>(fine.rows()) - 1) / stride + 1;
  obs.states.resize(rows, fine.cols());
  for (long i = 0; i < rows; ++i) obs.states.row(i) = fine.row(i * stride);
  obs.design.t_horizon = static_cast<double>(rows - 1) * design.delta;
  return obs;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sidecar_path(const std::string& csv) {
  const auto dot = csv.rfind(".csv");
  return (dot == std::string::npos ? csv : csv.substr(0, dot)) + ".json";
}

}  // namespace

void write_observations_csv(const ObservationSet& obs, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << "t";
  for (Eigen::Index j = 0; j < obs.states.cols(); ++j) f << ",x" << j + 1;
  f << '\n';
  for (Eigen::Index i = 0; i < obs.states.rows(); ++i) {
    f << fmt17(static_cast<double>(i) * obs.design.delta);
    for (Eigen::Index j = 0; j < obs.states.cols(); ++j) f << ',' << fmt17(obs.states(i, j));
    f << '\n';
  }
  if (!f) throw Error("write failed: " + path);
}

void write_observations_sidecar(const ObservationSet& obs, const std::string& path) {
  nlohmann::ordered_json j;
  j["model_id"] = obs.model_id;
  j["seed"] = obs.design.seed;
  j["design"] = {{"delta", obs.design.delta},
                 {"n", obs.n()},
                 {"t_horizon", obs.design.t_horizon},
                 {"fine_delta", obs.design.fine_delta},
                 {"burn_in", obs.design.burn_in},
                 {"initial_state", obs.design.initial_state}};
  if (obs.true_theta) {
    j["true_theta"] = {{"names", obs.true_theta->names}, {"values", obs.true_theta->values}};
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(2) << '\n';
}

ObservationSet read_observations(const std::string& csv_path) {
  std::ifstream f(csv_path);
  if (!f) throw ConfigError("cannot open data file " + csv_path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("t,", 0) != 0) throw ConfigError("bad CSV header in " + csv_path);
  const long cols = static_cast<long>(std::count(line.begin(), line.end(), ','));
  std::vector<double> vals;
  std::vector<double> times;
  long rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    long c = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = std::stod(cell);
      if (c == 0)
        times.push_back(v);
      else
        vals.push_back(v);
      ++c;
    }
    if (c != cols + 1) throw ConfigError("row " + std::to_string(rows + 1) + " of " + csv_path + " has wrong width");
    ++rows;
  }
  if (rows < 2) throw ConfigError("data file " + csv_path + " needs at least two rows");
  ObservationSet obs;
  obs.states = Eigen::Map<RowMatrixXd>(vals.data(), rows, cols);
  obs.design.delta = times[1] - times[0];
  obs.design.t_horizon = times.back() - times.front();

  std::ifstream side(sidecar_path(csv_path));
  if (side) {
    const auto j = nlohmann::json::parse(side);
    obs.model_id = j.value("model_id", "");
    obs.design.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("design")) {
      const auto& d = j["design"];
      obs.design.delta = d.value("delta", obs.design.delta);
      obs.design.t_horizon = d.value("t_horizon", obs.design.t_horizon);
      obs.design.fine_delta = d.value("fine_delta", obs.design.fine_delta);
      obs.design.burn_in = d.value("burn_in", obs.design.burn_in);
    }
    if (j.contains("true_theta")) {
      ParamVector pv;
      pv.names = j["true_theta"]["names"].get<std::vector<std::string>>();
      pv.values = j["true_theta"]["values"].get<std::vector<double>>();
      obs.true_theta = pv;
    }
  }
  return obs;
}

}  // namespace hypo
