#pragma once

#include <cstdint>
#include <vector>

#include "arl/learner.hpp"
#include "arl/mdp.hpp"

namespace arl {

// alpha_t = (H+1)/(H+t), t >= 1.
double learning_rate(int t, int H);

// b_t = sqrt(H^3 iota / t).
double hoeffding_bonus(int t, int H, double iota);

// Effective weights alpha_t^i, i = 0..t, of the t-th update on the initial
// value (i = 0) and on the i-th sample, built by the recursion
// alpha_t^i = (1 - alpha_t) alpha_{t-1}^i, alpha_t^t = alpha_t.
std::vector<double> learning_rate_weights(int t, int H);

struct UcbhOptions {
  // Clamp Qbar to <= H-h+1 and Qunder to >= 0 after every mixture update.
  bool clamp = true;
};

// Model-free action-robust Q-learning with Hoeffding bonuses.
class ArUcbh {
 public:
  ArUcbh(int num_states, int num_actions, int horizon, LearnerConfig config,
         UcbhOptions options = {});

  // argmax Qbar w.p. 1-rho, argmin Qunder w.p. rho, from the live tables.
  ExecutedAction act(int h, int s, Rng& rng) const;

  // Mixture updates of Qbar/Qunder at (h,s,a), refresh of the candidate
  // policies at (h,s), monotone Vbar/Vunder updates.
  void step_update(int h, int s, int a, double r, int s_next);

  // Keeps the previous output action at (h,s) when the lower value of the new
  // candidate does not reach Vunder(h,s). Returns true when it reverted.
  bool policy_freeze(int h, int s);

  // step_update followed by policy_freeze.
  void observe(int h, int s, int a, double r, int s_next);

  Certificate issue_certificate(int s1);

  int horizon() const { return H_; }
  double iota() const { return iota_; }
  const LearnerConfig& config() const { return config_; }

  std::int64_t counts(int h, int s, int a) const {
    return n_[(static_cast<std::size_t>(h) * S_ + s) * A_ + a];
  }
  const QTable& q_bar() const { return q_bar_; }
  const QTable& q_under() const { return q_under_; }
  const ValueTable& v_bar() const { return v_bar_; }
  const ValueTable& v_under() const { return v_under_; }
  const DeterministicPolicy& pi_bar_candidate() const { return pi_bar_candidate_; }
  const DeterministicPolicy& pi_under_current() const { return pi_under_current_; }
  const DeterministicPolicy& pi_out() const { return pi_out_; }
  double best_width() const { return best_width_; }

  // Times Vbar rose or Vunder fell across an update; must stay zero.
  std::int64_t monotonicity_violations() const { return monotonicity_violations_; }

 private:
  int S_, A_, H_;
  LearnerConfig config_;
  UcbhOptions options_;
  double iota_;
  std::vector<std::int64_t> n_;
  QTable q_bar_, q_under_;
  ValueTable v_bar_, v_under_;
  DeterministicPolicy pi_bar_candidate_, pi_under_current_, pi_out_;
  double best_width_;
  int certificates_ = 0;
  std::int64_t monotonicity_violations_ = 0;
};

// Full K-episode loop; returns the final output policy.
RunResult run_ucbh(const TabularMDP& mdp, const LearnerConfig& config,
                   std::uint64_t seed, const RunOptions& options = {},
                   UcbhOptions ucbh_options = {});

}  // namespace arl
