#include "arl/arrlc.hpp"

#include <algorithm>
#include <cmath>

namespace arl {

double bonus_theta_from_moments(double variance_mid, double r_hat,
                                double mean_gap, double n, int H, double iota) {
  const double h = static_cast<double>(H);
  return std::sqrt(2.0 * variance_mid * iota / n) +
         std::sqrt(2.0 * r_hat * iota / n) + mean_gap / h +
         (24.0 * h * h + 7.0 * h + 7.0) * iota / (3.0 * n);
}

double bonus_theta(std::span<const double> p_hat,
                   std::span<const double> v_bar_next,
                   std::span<const double> v_under_next, double r_hat, double n,
                   int H, double iota) {
  ARL_CHECK(n >= 1.0, "bonus requires a visited pair");
  ARL_CHECK(p_hat.size() == v_bar_next.size() && p_hat.size() == v_under_next.size(),
            "length mismatch");
  std::vector<double> mid(p_hat.size()), gap(p_hat.size());
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    mid[i] = 0.5 * (v_bar_next[i] + v_under_next[i]);
    gap[i] = v_bar_next[i] - v_under_next[i];
  }
  return bonus_theta_from_moments(apply_V_operator(p_hat, mid), r_hat,
                                  dot(p_hat, gap), n, H, iota);
}

Arrlc::Arrlc(int num_states, int num_actions, int horizon, LearnerConfig config)
    : S_(num_states),
      A_(num_actions),
      H_(horizon),
      config_(config),
      iota_(config.iota(num_states, num_actions, horizon)),
      n_(static_cast<std::size_t>(horizon) * num_states * num_actions, 0),
      n_next_(static_cast<std::size_t>(horizon) * num_states * num_actions * num_states, 0),
      support_(static_cast<std::size_t>(horizon) * num_states * num_actions),
      r_hat_(static_cast<std::size_t>(horizon) * num_states * num_actions, 0.0),
      q_bar_(horizon, num_states, num_actions),
      q_under_(horizon, num_states, num_actions, 0.0),
      v_bar_(horizon, num_states),
      v_under_(horizon, num_states, 0.0),
      pi_bar_(horizon, num_states, 0),
      pi_under_(horizon, num_states, 0),
      pi_out_(horizon, num_states, 0),
      best_width_(horizon) {
  config_.validate();
  for (int h = 0; h < H_; ++h) {
    const double cap = H_ - h;
    for (int s = 0; s < S_; ++s) {
      v_bar_(h, s) = cap;
      for (int a = 0; a < A_; ++a) q_bar_(h, s, a) = cap;
    }
  }
}

ExecutedAction Arrlc::act(int h, int s, Rng& rng) const {
  if (rng.bernoulli(config_.rho)) return {pi_under_(h, s), true};
  return {pi_bar_(h, s), false};
}

void Arrlc::observe(int h, int s, int a, double r, int s_next) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("reward not normalized");
  ARL_CHECK(h >= 0 && h < H_ && s >= 0 && s < S_ && a >= 0 && a < A_ &&
                s_next >= 0 && s_next < S_,
            "observation index out of range");
  const std::size_t i = pair(h, s, a);
  const std::int64_t n = ++n_[i];
  if (n_next_[i * S_ + s_next]++ == 0) {
    auto& sup = support_[i];
    sup.insert(std::upper_bound(sup.begin(), sup.end(), s_next), s_next);
  }
  r_hat_[i] += (r - r_hat_[i]) / static_cast<double>(n);
}

double Arrlc::p_hat(int h, int s, int a, int sn) const {
  const std::size_t i = pair(h, s, a);
  if (n_[i] == 0) return 0.0;
  return static_cast<double>(n_next_[i * S_ + sn]) / static_cast<double>(n_[i]);
}

std::vector<double> Arrlc::p_hat_row(int h, int s, int a) const {
  std::vector<double> row(S_);
  for (int sn = 0; sn < S_; ++sn) row[sn] = p_hat(h, s, a, sn);
  return row;
}

double Arrlc::bonus(int h, int s, int a) const {
  ARL_CHECK(counts(h, s, a) >= 1, "bonus requires a visited pair");
  return bonus_theta(p_hat_row(h, s, a), v_bar_.row(h + 1), v_under_.row(h + 1),
                     r_hat(h, s, a), static_cast<double>(counts(h, s, a)), H_, iota_);
}

void Arrlc::plan() {
  const double rho = config_.rho;
  for (int h = H_ - 1; h >= 0; --h) {
    const double cap = H_ - h;
    const auto vb = v_bar_.row(h + 1);
    const auto vu = v_under_.row(h + 1);
    for (int s = 0; s < S_; ++s) {
      for (int a = 0; a < A_; ++a) {
        const std::size_t i = pair(h, s, a);
        const std::int64_t n = n_[i];
        if (n == 0) continue;
        const double inv_n = 1.0 / static_cast<double>(n);
        const std::int64_t* next = n_next_.data() + i * S_;
        double mean_bar = 0.0, mean_under = 0.0;
        for (int sn : support_[i]) {
          const double p = static_cast<double>(next[sn]) * inv_n;
          mean_bar += p * vb[sn];
          mean_under += p * vu[sn];
        }
        const double mean_mid = 0.5 * (mean_bar + mean_under);
        double var_mid = 0.0;
        for (int sn : support_[i]) {
          const double p = static_cast<double>(next[sn]) * inv_n;
          const double d = 0.5 * (vb[sn] + vu[sn]) - mean_mid;
          var_mid += p * d * d;
        }
        const double theta = bonus_theta_from_moments(
            var_mid, r_hat_[i], mean_bar - mean_under, static_cast<double>(n), H_, iota_);
        q_bar_(h, s, a) = std::min(cap, r_hat_[i] + mean_bar + theta);
        q_under_(h, s, a) = std::max(0.0, r_hat_[i] + mean_under - theta);
      }
      const int best = argmax(q_bar_.row(h, s));
      const int worst = argmin(q_under_.row(h, s));
      pi_bar_(h, s) = best;
      pi_under_(h, s) = worst;
      v_bar_(h, s) = (1.0 - rho) * q_bar_(h, s, best) + rho * q_bar_(h, s, worst);
      v_under_(h, s) = (1.0 - rho) * q_under_(h, s, best) + rho * q_under_(h, s, worst);
    }
  }
}

Certificate Arrlc::update_certificate(int s1) {
  ++episode_;
  Certificate cert{v_under_(0, s1), v_bar_(0, s1), 0.0, episode_};
  cert.epsilon = std::abs(cert.upper - cert.lower);
  if (cert.epsilon < best_width_) {
    best_width_ = cert.epsilon;
    pi_out_ = pi_bar_;
  }
  return cert;
}

RunResult run_arrlc(const TabularMDP& mdp, const LearnerConfig& config,
                    std::uint64_t seed, const RunOptions& options) {
  config.validate();
  const int H = mdp.horizon();
  const int s1 = mdp.initial_state();
  Arrlc learner(mdp.num_states(), mdp.num_actions(), H, config);
  Rng env = Rng::derive(seed, "env");
  Rng behavior = Rng::derive(seed, "behavior");

  RunResult result;
  result.log.reserve(static_cast<std::size_t>(config.K));
  if (options.keep_trajectories) result.trajectories.reserve(config.K);

  Trajectory traj;
  traj.steps.reserve(H);
  for (int k = 0; k < config.K; ++k) {
    traj.steps.clear();
    traj.episode_return = 0.0;
    int s = s1;
    for (int h = 0; h < H; ++h) {
      const auto executed = learner.act(h, s, behavior);
      const auto out = sample_step(mdp, h, s, executed.action, env);
      learner.observe(h, s, executed.action, out.reward, out.next_state);
      traj.steps.push_back({h, s, executed.action, out.reward, out.next_state});
      traj.episode_return += out.reward;
      s = out.next_state;
    }
    const Certificate cert = learner.update_certificate(s1);
    result.log.push_back({cert, learner.best_width(), traj.episode_return});
    if (options.on_episode)
      options.on_episode({cert.episode, learner.pi_bar(), cert, learner.best_width(), traj});
    if (options.keep_trajectories) result.trajectories.push_back(traj);
    learner.plan();
  }
  result.pi_out = learner.pi_out();
  return result;
}

}  // namespace arl
