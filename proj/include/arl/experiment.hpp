#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arl/environments.hpp"
#include "arl/evaluation.hpp"

namespace arl {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { kArrlc, kArUcbh, kOracle };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm alg);

struct PerturbRequest {
  PerturbKind kind = PerturbKind::kNone;
  double p = 0.0;
};

// "fixed:0.2", "random:0.1", "none"
PerturbRequest parse_perturb_request(const std::string& text);

struct ExperimentConfig {
  std::string env = "cliff";
  int H = 0;  // 0: environment default (cliff 100, otherwise 5)
  Algorithm algorithm = Algorithm::kArrlc;
  int K = 1000;
  double rho = 0.2;
  double delta = 0.05;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;  // fan-out; overrides `seed` when non-empty
  int jobs = 1;
  std::vector<PerturbRequest> eval;  // empty: fixed/random x {0.1, 0.2}
  int n_trajectories = kDefaultTrajectories;
  std::string adversary = "auto";  // auto | down | minimax | path to policy JSON
  std::string policy_file;
  std::string policy_name;
  std::string output_dir = ".";

  int horizon() const;
};

// Fields of `j` override `base`. Unknown keys are a UsageError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

// Oracle sweeps above this many S*S*A*H transition entries are refused.
inline constexpr double kMaxOracleEntries = 2e8;

struct SolveSummary {
  double v_star;
  std::optional<double> v_star_raw;
  std::string path;
};

// Writes <out>/solution.json and prints one summary line.
SolveSummary cmd_solve(const ExperimentConfig& cfg, std::ostream& log);

struct TrainSummary {
  std::uint64_t seed;
  std::string csv_path;
  std::string policy_path;
  double final_best_width;
  std::optional<double> cumulative_regret;
};

// Writes <out>/episodes.csv and <out>/pi_out.json (per-seed subdirectories
// seed_<n>/ when several seeds are given).
std::vector<TrainSummary> cmd_train(const ExperimentConfig& cfg, std::ostream& log);

struct EvaluateRow {
  PerturbationSpec spec;
  EvaluationReport report;
};

// Writes <out>/evaluation.csv.
std::vector<EvaluateRow> cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log);

struct DualityRow {
  double rho;
  DualityReport report;
};

std::vector<DualityRow> cmd_duality_check(const ExperimentConfig& cfg,
                                          const std::vector<double>& rhos,
                                          std::ostream& log);

nlohmann::json policy_document(const DeterministicPolicy& pi, const ExperimentConfig& cfg,
                               std::uint64_t seed);

// Loads the "actions" (train output) or "pi_star" (solve output) table.
DeterministicPolicy load_policy(const std::string& path);

// Exit codes: 0 success, 2 usage, 3 resource, 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace arl
