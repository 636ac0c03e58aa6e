#include "arl/ucbh.hpp"

#include <algorithm>
#include <cmath>

namespace arl {

double learning_rate(int t, int H) {
  ARL_CHECK(t >= 1, "learning rate index starts at 1");
  return static_cast<double>(H + 1) / static_cast<double>(H + t);
}

double hoeffding_bonus(int t, int H, double iota) {
  ARL_CHECK(t >= 1, "bonus index starts at 1");
  const double h = static_cast<double>(H);
  return std::sqrt(h * h * h * iota / static_cast<double>(t));
}

std::vector<double> learning_rate_weights(int t, int H) {
  ARL_CHECK(t >= 0, "negative update count");
  std::vector<double> w{1.0};
  for (int j = 1; j <= t; ++j) {
    const double alpha = learning_rate(j, H);
    for (double& x : w) x *= 1.0 - alpha;
    w.push_back(alpha);
  }
  return w;
}

ArUcbh::ArUcbh(int num_states, int num_actions, int horizon, LearnerConfig config,
               UcbhOptions options)
    : S_(num_states),
      A_(num_actions),
      H_(horizon),
      config_(config),
      options_(options),
      iota_(config.iota(num_states, num_actions, horizon)),
      n_(static_cast<std::size_t>(horizon) * num_states * num_actions, 0),
      q_bar_(horizon, num_states, num_actions),
      q_under_(horizon, num_states, num_actions, 0.0),
      v_bar_(horizon, num_states),
      v_under_(horizon, num_states, 0.0),
      pi_bar_candidate_(horizon, num_states, 0),
      pi_under_current_(horizon, num_states, 0),
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

ExecutedAction ArUcbh::act(int h, int s, Rng& rng) const {
  if (rng.bernoulli(config_.rho)) return {argmin(q_under_.row(h, s)), true};
  return {argmax(q_bar_.row(h, s)), false};
}

void ArUcbh::step_update(int h, int s, int a, double r, int s_next) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("reward not normalized");
  ARL_CHECK(h >= 0 && h < H_ && s >= 0 && s < S_ && a >= 0 && a < A_ &&
                s_next >= 0 && s_next < S_,
            "observation index out of range");
  const double rho = config_.rho;
  const auto t = static_cast<int>(
      ++n_[(static_cast<std::size_t>(h) * S_ + s) * A_ + a]);
  const double alpha = learning_rate(t, H_);
  const double b = hoeffding_bonus(t, H_, iota_);

  double& qb = q_bar_(h, s, a);
  double& qu = q_under_(h, s, a);
  qb = (1.0 - alpha) * qb + alpha * (r + v_bar_(h + 1, s_next) + b);
  qu = (1.0 - alpha) * qu + alpha * (r + v_under_(h + 1, s_next) - b);
  if (options_.clamp) {
    qb = std::min(qb, static_cast<double>(H_ - h));
    qu = std::max(qu, 0.0);
  }

  const int best = argmax(q_bar_.row(h, s));
  const int worst = argmin(q_under_.row(h, s));
  pi_bar_candidate_(h, s) = best;
  pi_under_current_(h, s) = worst;

  const double old_bar = v_bar_(h, s), old_under = v_under_(h, s);
  v_bar_(h, s) = std::min(old_bar, (1.0 - rho) * q_bar_(h, s, best) +
                                       rho * q_bar_(h, s, worst));
  v_under_(h, s) = std::max(old_under, (1.0 - rho) * q_under_(h, s, best) +
                                           rho * q_under_(h, s, worst));
  if (v_bar_(h, s) > old_bar || v_under_(h, s) < old_under) ++monotonicity_violations_;
}

bool ArUcbh::policy_freeze(int h, int s) {
  const double rho = config_.rho;
  const int cand = pi_bar_candidate_(h, s);
  const int worst = pi_under_current_(h, s);
  const double candidate_lower =
      (1.0 - rho) * q_under_(h, s, cand) + rho * q_under_(h, s, worst);
  if (v_under_(h, s) > candidate_lower) return true;
  pi_out_(h, s) = cand;
  return false;
}

void ArUcbh::observe(int h, int s, int a, double r, int s_next) {
  step_update(h, s, a, r, s_next);
  policy_freeze(h, s);
}

Certificate ArUcbh::issue_certificate(int s1) {
  ++certificates_;
  Certificate cert{v_under_(0, s1), v_bar_(0, s1), 0.0, certificates_};
  cert.epsilon = std::abs(cert.upper - cert.lower);
  best_width_ = std::min(best_width_, cert.epsilon);
  return cert;
}

RunResult run_ucbh(const TabularMDP& mdp, const LearnerConfig& config,
                   std::uint64_t seed, const RunOptions& options,
                   UcbhOptions ucbh_options) {
  config.validate();
  const int H = mdp.horizon();
  const int s1 = mdp.initial_state();
  ArUcbh learner(mdp.num_states(), mdp.num_actions(), H, config, ucbh_options);
  Rng env = Rng::derive(seed, "env");
  Rng behavior = Rng::derive(seed, "behavior");

  RunResult result;
  result.log.reserve(static_cast<std::size_t>(config.K));
  if (options.keep_trajectories) result.trajectories.reserve(config.K);

  Trajectory traj;
  traj.steps.reserve(H);
  DeterministicPolicy executed_policy;
  for (int k = 0; k < config.K; ++k) {
    if (options.on_episode) executed_policy = learner.pi_out();
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
    const Certificate cert = learner.issue_certificate(s1);
    result.log.push_back({cert, learner.best_width(), traj.episode_return});
    if (options.on_episode)
      options.on_episode({cert.episode, executed_policy, cert, learner.best_width(), traj});
    if (options.keep_trajectories) result.trajectories.push_back(traj);
  }
  result.pi_out = learner.pi_out();
  return result;
}

}  // namespace arl
