#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arl/rng.hpp"

#define ARL_CHECK(cond, msg)                                   \
  do {                                                         \
    if (!(cond)) throw std::logic_error(std::string("check failed: ") + (msg)); \
  } while (0)

namespace arl {

// Steps are 0-based in code: h in [0, H). Value tables carry an extra
// terminal row h = H that is identically zero.

// Dense [h][s] table with H+1 rows.
class ValueTable {
 public:
  ValueTable() = default;
  ValueTable(int horizon, int num_states, double fill = 0.0)
      : horizon_(horizon),
        num_states_(num_states),
        data_(static_cast<std::size_t>(horizon + 1) * num_states, fill) {
    for (int s = 0; s < num_states; ++s) (*this)(horizon, s) = 0.0;
  }

  double& operator()(int h, int s) { return data_[index(h, s)]; }
  double operator()(int h, int s) const { return data_[index(h, s)]; }

  std::span<double> row(int h) {
    return {data_.data() + index(h, 0), static_cast<std::size_t>(num_states_)};
  }
  std::span<const double> row(int h) const {
    return {data_.data() + index(h, 0), static_cast<std::size_t>(num_states_)};
  }

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int h, int s) const {
    return static_cast<std::size_t>(h) * num_states_ + s;
  }
  int horizon_ = 0;
  int num_states_ = 0;
  std::vector<double> data_;
};

// Dense [h][s][a] table, h in [0, H).
class QTable {
 public:
  QTable() = default;
  QTable(int horizon, int num_states, int num_actions, double fill = 0.0)
      : horizon_(horizon),
        num_states_(num_states),
        num_actions_(num_actions),
        data_(static_cast<std::size_t>(horizon) * num_states * num_actions, fill) {}

  double& operator()(int h, int s, int a) { return data_[index(h, s, a)]; }
  double operator()(int h, int s, int a) const { return data_[index(h, s, a)]; }

  std::span<double> row(int h, int s) {
    return {data_.data() + index(h, s, 0), static_cast<std::size_t>(num_actions_)};
  }
  std::span<const double> row(int h, int s) const {
    return {data_.data() + index(h, s, 0), static_cast<std::size_t>(num_actions_)};
  }

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * num_states_ + s) * num_actions_ + a;
  }
  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> data_;
};

// Lowest index attaining the max / min.
int argmax(std::span<const double> values);
int argmin(std::span<const double> values);

class DeterministicPolicy {
 public:
  DeterministicPolicy() = default;
  DeterministicPolicy(int horizon, int num_states, int fill = 0)
      : horizon_(horizon),
        num_states_(num_states),
        actions_(static_cast<std::size_t>(horizon) * num_states, fill) {}

  int operator()(int h, int s) const { return actions_[index(h, s)]; }
  int& operator()(int h, int s) { return actions_[index(h, s)]; }

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  const std::vector<int>& actions() const { return actions_; }

  bool operator==(const DeterministicPolicy&) const = default;

 private:
  std::size_t index(int h, int s) const {
    return static_cast<std::size_t>(h) * num_states_ + s;
  }
  int horizon_ = 0;
  int num_states_ = 0;
  std::vector<int> actions_;
};

enum class RewardNoise { kDeterministic, kBernoulli };

// Finite-horizon tabular MDP. Immutable after construction; safe to share
// read-only across threads.
class TabularMDP {
 public:
  // `transitions` is laid out [h][s][a][s'], `rewards` [h][s][a].
  TabularMDP(int num_states, int num_actions, int horizon,
             std::vector<double> transitions, std::vector<double> rewards,
             int initial_state = 0,
             RewardNoise noise = RewardNoise::kDeterministic);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  int initial_state() const { return initial_state_; }
  RewardNoise reward_noise() const { return noise_; }

  std::span<const double> transition(int h, int s, int a) const {
    return {transitions_.data() + pair_index(h, s, a) * num_states_,
            static_cast<std::size_t>(num_states_)};
  }
  double reward(int h, int s, int a) const { return rewards_[pair_index(h, s, a)]; }

  // Next states with positive probability, ascending.
  std::span<const int> support(int h, int s, int a) const {
    const std::size_t i = pair_index(h, s, a);
    return {support_.data() + support_offsets_[i],
            support_offsets_[i + 1] - support_offsets_[i]};
  }

  const std::vector<double>& transitions() const { return transitions_; }
  const std::vector<double>& rewards() const { return rewards_; }

  TabularMDP with_reward_noise(RewardNoise noise) const;

 private:
  std::size_t pair_index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * num_states_ + s) * num_actions_ + a;
  }

  int num_states_;
  int num_actions_;
  int horizon_;
  int initial_state_;
  RewardNoise noise_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
  std::vector<int> support_;
  std::vector<std::size_t> support_offsets_;
};

struct ValidationResult {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline constexpr double kSimplexTolerance = 1e-9;

// Checks simplex rows, reward range and index ranges. Messages use 1-based
// steps, e.g. "row (1,0,0) sums to 0.9".
ValidationResult validate_mdp(const TabularMDP& mdp);

// Affine map between raw and [0,1] rewards: normalized = (raw - offset) / scale.
struct RewardScale {
  double scale = 1.0;
  double offset = 0.0;

  double to_normalized(double raw) const { return (raw - offset) / scale; }
  double to_raw(double normalized) const { return normalized * scale + offset; }
};

struct NormalizedRewards {
  std::vector<double> values;
  RewardScale scale;
};

NormalizedRewards normalize_rewards(std::span<const double> raw, double r_min,
                                    double r_max);

struct StepOutcome {
  double reward;
  int next_state;
};

StepOutcome sample_step(const TabularMDP& mdp, int h, int s, int a, Rng& rng);

// Behaviour under pi~ = (1 - rho) agent + rho adversary.
struct ExecutionModel {
  DeterministicPolicy agent;
  DeterministicPolicy adversary;
  double rho = 0.0;
};

struct ExecutedAction {
  int action;
  bool adversarial;
};

ExecutedAction sample_executed_action(const ExecutionModel& exec, int h, int s,
                                      Rng& rng);

struct TrajectoryStep {
  int h;
  int state;
  int action;
  double reward;
  int next_state;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double episode_return = 0.0;
};

// Value C[h][s] and action value D[h][s][a] of the mixed execution of a fixed
// (agent, adversary) pair.
struct ExactEvaluation {
  ValueTable C;
  QTable D;
};

ExactEvaluation evaluate_policy_pair_exact(const TabularMDP& mdp,
                                           const DeterministicPolicy& agent,
                                           const DeterministicPolicy& adversary,
                                           double rho);

// E_{a~dist} q(a)
double apply_D_operator(std::span<const double> dist, std::span<const double> q_row);

// E_p[v^2] - (E_p[v])^2, clamped at zero.
double apply_V_operator(std::span<const double> p_row, std::span<const double> v);

double dot(std::span<const double> p, std::span<const double> v);

void check_policy_dims(const TabularMDP& mdp, const DeterministicPolicy& pi);

namespace serial {

// Dense single-threaded reference of the sweep above.
ExactEvaluation evaluate_policy_pair_exact(const TabularMDP& mdp,
                                           const DeterministicPolicy& agent,
                                           const DeterministicPolicy& adversary,
                                           double rho);

}  // namespace serial

}  // namespace arl
