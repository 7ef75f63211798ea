#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypo/estimate.hpp"
#include "hypo/kalman.hpp"
#include "hypo/simulate.hpp"

namespace hypo {

inline constexpr const char* kVersion = "0.1.0";

enum class ObservationMode { kComplete, kPartialFhn };

struct OptimizerConfig {
  enum class Method { kAdam, kNelderMead } method = Method::kAdam;
  AdamConfig adam;
  NelderMeadConfig nelder_mead;
};

struct SimulateConfig {
  std::string model_id;
  std::vector<double> true_theta;
  ObservationDesign design;
  int replications = 1;
  std::uint64_t base_seed = 0;
};

struct EstimateConfig {
  std::string model_id;
  std::string data;
  int p = 2;
  ObservationMode mode = ObservationMode::kComplete;
  std::optional<std::vector<double>> theta0;  // default: box midpoint
  std::optional<Box> box;                     // default: model box
  OptimizerConfig optimizer;
  KalmanPrior prior;
  bool standard_errors = false;
  int workers = 1;
};

struct ExperimentConfig {
  std::string model_id;
  std::vector<double> true_theta;
  std::optional<Box> box;
  ObservationDesign design;
  std::vector<int> p_list;
  int replications = 1;
  std::uint64_t base_seed = 0;
  OptimizerConfig optimizer;
  ObservationMode mode = ObservationMode::kComplete;
  std::optional<std::vector<double>> theta0;
  KalmanPrior prior;
};

struct ValidateConfig {
  std::string model_id;
  std::optional<std::vector<double>> theta;  // default: model default
  int points = 100;
  std::uint64_t seed = 1;
};

struct PrecisionConfig {
  std::string model_id;
  std::vector<double> theta;
  int p = 2;
  std::optional<std::string> data;      // stationary sample; otherwise simulated from design
  ObservationDesign design;
};

// Strict parsers: unknown keys and missing required fields raise ConfigError naming the field.
SimulateConfig parse_simulate_config(const nlohmann::json& j);
EstimateConfig parse_estimate_config(const nlohmann::json& j);
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ValidateConfig parse_validate_config(const nlohmann::json& j);
PrecisionConfig parse_precision_config(const nlohmann::json& j);

nlohmann::ordered_json to_json(const OptimizerConfig& o);

std::uint64_t fnv1a64(const std::string& s);

struct ReplicationRow {
  int replication = 0;
  std::uint64_t seed = 0;
  int p = 0;
  std::string status;  // ok, simulation_failed, estimation_failed
  std::vector<double> theta_hat;
  std::vector<double> error;  // theta_hat - true_theta
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  double runtime = 0.0;  // sidecar only
  std::string message;
};

struct SummaryRow {
  int p = 0;
  int effective_m = 0;  // rows with status ok
  int converged = 0;
  std::vector<double> mean;
  std::vector<double> sd;
};

struct ExperimentReport {
  std::string model_id;
  std::vector<std::string> names;
  std::vector<double> true_theta;
  std::vector<double> theta0;
  std::vector<ReplicationRow> rows;  // replication-major, then p in p_list order
  std::vector<SummaryRow> summary;
};

// Runs M replications concurrently (up to `jobs`); output is independent of jobs.
ExperimentReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);
std::vector<SummaryRow> summarize(const std::vector<ReplicationRow>& rows, const std::vector<int>& p_list,
                                  std::size_t dim);
std::string report_csv(const ExperimentReport& r);
std::string summary_csv(const ExperimentReport& r);

// Parses argv and executes a subcommand. Exit codes: 0 success, 2 config error, 3 runtime failure.
int run_cli(int argc, const char* const* argv);

}  // namespace hypo
