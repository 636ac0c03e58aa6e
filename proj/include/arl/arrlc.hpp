#pragma once

#include <cstdint>
#include <vector>

#include "arl/learner.hpp"
#include "arl/mdp.hpp"

namespace arl {

// Exploration bonus of the model-based learner:
//   sqrt(2 Var_P[(Vbar + Vunder)/2] iota / n) + sqrt(2 r_hat iota / n)
//   + P(Vbar - Vunder) / H + (24 H^2 + 7 H + 7) iota / (3 n)
// `p_hat` and the next-step tables are dense over S. n >= 1.
double bonus_theta(std::span<const double> p_hat,
                   std::span<const double> v_bar_next,
                   std::span<const double> v_under_next, double r_hat, double n,
                   int H, double iota);

// Same bonus from precomputed moments.
double bonus_theta_from_moments(double variance_mid, double r_hat,
                                double mean_gap, double n, int H, double iota);

// Model-based action-robust learner with policy certificates.
//
// Each episode: act with (1-rho) pi_bar + rho pi_under, record counts and the
// running-mean reward, issue the certificate [Vunder_1(s1), Vbar_1(s1)], then
// replan optimistic/pessimistic tables on the empirical model.
class Arrlc {
 public:
  Arrlc(int num_states, int num_actions, int horizon, LearnerConfig config);

  ExecutedAction act(int h, int s, Rng& rng) const;

  // Throws std::invalid_argument("reward not normalized") for r outside [0,1].
  void observe(int h, int s, int a, double r, int s_next);

  // Requires counts(h,s,a) >= 1.
  double bonus(int h, int s, int a) const;

  // Backward pass h = H..1 over the empirical model.
  void plan();

  // Issues the certificate for the current tables and keeps the policy with
  // the narrowest interval seen so far.
  Certificate update_certificate(int s1);

  int num_states() const { return S_; }
  int num_actions() const { return A_; }
  int horizon() const { return H_; }
  const LearnerConfig& config() const { return config_; }
  double iota() const { return iota_; }

  std::int64_t counts(int h, int s, int a) const { return n_[pair(h, s, a)]; }
  std::int64_t next_counts(int h, int s, int a, int sn) const {
    return n_next_[pair(h, s, a) * S_ + sn];
  }
  double r_hat(int h, int s, int a) const { return r_hat_[pair(h, s, a)]; }
  double p_hat(int h, int s, int a, int sn) const;
  std::vector<double> p_hat_row(int h, int s, int a) const;

  const QTable& q_bar() const { return q_bar_; }
  const QTable& q_under() const { return q_under_; }
  const ValueTable& v_bar() const { return v_bar_; }
  const ValueTable& v_under() const { return v_under_; }
  const DeterministicPolicy& pi_bar() const { return pi_bar_; }
  const DeterministicPolicy& pi_under() const { return pi_under_; }
  const DeterministicPolicy& pi_out() const { return pi_out_; }
  double best_width() const { return best_width_; }
  int episode() const { return episode_; }

 private:
  std::size_t pair(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
  }

  int S_, A_, H_;
  LearnerConfig config_;
  double iota_;

  std::vector<std::int64_t> n_;
  std::vector<std::int64_t> n_next_;
  std::vector<std::vector<int>> support_;  // observed next states per pair
  std::vector<double> r_hat_;

  QTable q_bar_, q_under_;
  ValueTable v_bar_, v_under_;
  DeterministicPolicy pi_bar_, pi_under_, pi_out_;
  double best_width_;
  int episode_ = 0;
};

// Full K-episode loop. Environment and behaviour draws use separate streams
// derived from `seed`.
RunResult run_arrlc(const TabularMDP& mdp, const LearnerConfig& config,
                    std::uint64_t seed, const RunOptions& options = {});

}  // namespace arl
