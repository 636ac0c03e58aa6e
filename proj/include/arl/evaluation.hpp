#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "arl/learner.hpp"
#include "arl/mdp.hpp"
#include "arl/planner.hpp"

namespace arl {

enum class PerturbKind { kNone, kUniformRandom, kFixedPolicy };

std::string to_string(PerturbKind kind);

// Test-time perturbation: with probability p the chosen action is replaced by
// a uniform draw over all actions or by the fixed adversary's action.
struct PerturbationSpec {
  PerturbKind kind = PerturbKind::kNone;
  double p = 0.0;
  std::optional<DeterministicPolicy> adversary;  // required for kFixedPolicy

  static PerturbationSpec none() { return {}; }
  static PerturbationSpec uniform_random(double p) {
    return {PerturbKind::kUniformRandom, p, std::nullopt};
  }
  static PerturbationSpec fixed(DeterministicPolicy adversary, double p) {
    return {PerturbKind::kFixedPolicy, p, std::move(adversary)};
  }
};

inline constexpr int kDefaultTrajectories = 100;

struct EvaluationReport {
  double mean_return_raw = 0.0;
  double mean_return_normalized = 0.0;
  double std_error = 0.0;      // normalized units
  double std_error_raw = 0.0;  // raw units
  int n_trajectories = 0;
  std::vector<double> per_trajectory_returns;  // normalized
};

// Monte Carlo returns of `policy` executed under `spec`. Trajectory i draws
// from streams split(i) of the "perturb" and "env" roles of `seed`, so the
// report does not depend on the thread count.
EvaluationReport rollout_perturbed(const TabularMDP& mdp,
                                   const DeterministicPolicy& policy,
                                   const PerturbationSpec& spec, int n_trajectories,
                                   std::uint64_t seed,
                                   std::optional<RewardScale> scale = std::nullopt);

namespace serial {
EvaluationReport rollout_perturbed(const TabularMDP& mdp,
                                   const DeterministicPolicy& policy,
                                   const PerturbationSpec& spec, int n_trajectories,
                                   std::uint64_t seed,
                                   std::optional<RewardScale> scale = std::nullopt);
}  // namespace serial

struct RegretRecord {
  int episode = 0;
  double v_star = 0.0;
  double v_pi_bar = 0.0;
  double increment = 0.0;
  double cumulative = 0.0;
};

// Exact robust value of per-episode policies against the oracle optimum.
// Policies identical to the previous one reuse its value. With thinning on,
// only every 10th episode is evaluated and the last value carried forward.
class RegretTracker {
 public:
  enum class Thinning { kAuto, kOff, kOn };

  RegretTracker(const TabularMDP& mdp, double rho, Thinning thinning = Thinning::kAuto);

  RegretRecord record(int episode, const DeterministicPolicy& policy);

  double v_star() const { return v_star_; }
  double cumulative() const { return cumulative_; }
  const RobustSolution& solution() const { return solution_; }
  bool thinned() const { return thin_; }

  // Tables with more S*A*H entries than this are thinned under kAuto.
  static constexpr long kThinningThreshold = 10'000;

 private:
  const TabularMDP& mdp_;
  double rho_;
  RobustSolution solution_;
  double v_star_;
  bool thin_;
  std::optional<DeterministicPolicy> last_policy_;
  double last_value_ = 0.0;
  double cumulative_ = 0.0;
};

std::vector<RegretRecord> compute_regret_curve(
    const TabularMDP& mdp, double rho,
    std::span<const DeterministicPolicy> per_episode_policies);

inline constexpr double kSandwichTolerance = 1e-9;

// True when the certificate fails to bracket [V^pi, V*].
inline bool sandwich_violated(const Certificate& cert, double v_pi, double v_star) {
  return cert.lower > v_pi + kSandwichTolerance ||
         cert.upper < v_star - kSandwichTolerance;
}

struct SandwichAudit {
  int violations = 0;
  int episodes = 0;
  double fraction() const {
    return episodes == 0 ? 0.0 : static_cast<double>(violations) / episodes;
  }
};

SandwichAudit sandwich_audit(const TabularMDP& mdp, double rho,
                             std::span<const Certificate> certificates,
                             std::span<const DeterministicPolicy> per_episode_policies);

std::string format_double(double x);

// Per-episode learner log:
// episode,cert_lo,cert_hi,epsilon,delta,true_value_pi_bar,regret_increment,cum_regret,seed
class EpisodeCsvWriter {
 public:
  EpisodeCsvWriter(std::ostream& out, std::uint64_t seed);
  // `regret` empty when no oracle is available; the true-value columns are
  // then left blank.
  void write(const Certificate& cert, double best_width,
             const std::optional<RegretRecord>& regret);

  static constexpr const char* kHeader =
      "episode,cert_lo,cert_hi,epsilon,delta,true_value_pi_bar,regret_increment,"
      "cum_regret,seed";

 private:
  std::ostream& out_;
  std::uint64_t seed_;
};

// policy_name,perturb_kind,p,n,mean_raw,mean_norm,stderr
void write_evaluation_csv_header(std::ostream& out);
void write_evaluation_csv_row(std::ostream& out, const std::string& policy_name,
                              const PerturbationSpec& spec,
                              const EvaluationReport& report);

}  // namespace arl
