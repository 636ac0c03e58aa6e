#include "arl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace arl {

namespace {

std::string triple(int h, int s, int a) {
  std::ostringstream os;
  os << '(' << h + 1 << ',' << s << ',' << a << ')';
  return os.str();
}

// Thread the sweep over states only when a step has enough work.
constexpr int kParallelStateThreshold = 64;

}  // namespace

int argmax(std::span<const double> values) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(values.size()); ++a)
    if (values[a] > values[best]) best = a;
  return best;
}

int argmin(std::span<const double> values) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(values.size()); ++a)
    if (values[a] < values[best]) best = a;
  return best;
}

TabularMDP::TabularMDP(int num_states, int num_actions, int horizon,
                       std::vector<double> transitions,
                       std::vector<double> rewards, int initial_state,
                       RewardNoise noise)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      initial_state_(initial_state),
      noise_(noise),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)) {
  if (num_states < 1 || num_actions < 1 || horizon < 1)
    throw std::invalid_argument("S, A and H must be positive");
  const std::size_t pairs =
      static_cast<std::size_t>(horizon) * num_states * num_actions;
  if (rewards_.size() != pairs)
    throw std::invalid_argument("reward tensor must have H*S*A entries");
  if (transitions_.size() != pairs * num_states)
    throw std::invalid_argument("transition tensor must have H*S*A*S entries");

  support_offsets_.reserve(pairs + 1);
  support_offsets_.push_back(0);
  for (std::size_t i = 0; i < pairs; ++i) {
    for (int sn = 0; sn < num_states; ++sn)
      if (transitions_[i * num_states + sn] > 0.0) support_.push_back(sn);
    support_offsets_.push_back(support_.size());
  }
}

TabularMDP TabularMDP::with_reward_noise(RewardNoise noise) const {
  TabularMDP copy = *this;
  copy.noise_ = noise;
  return copy;
}

ValidationResult validate_mdp(const TabularMDP& mdp) {
  ValidationResult result;
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (mdp.initial_state() < 0 || mdp.initial_state() >= S) {
    result.violations.push_back("initial state " +
                                std::to_string(mdp.initial_state()) +
                                " out of range");
  }
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const auto row = mdp.transition(h, s, a);
        double sum = 0.0;
        bool negative = false;
        for (double p : row) {
          sum += p;
          negative = negative || p < 0.0 || !std::isfinite(p);
        }
        if (negative)
          result.violations.push_back("row " + triple(h, s, a) +
                                      " has a negative entry");
        if (std::abs(sum - 1.0) > kSimplexTolerance) {
          std::ostringstream os;
          os << "row " << triple(h, s, a) << " sums to " << sum;
          result.violations.push_back(os.str());
        }
        const double r = mdp.reward(h, s, a);
        if (!(r >= 0.0 && r <= 1.0))
          result.violations.push_back("reward " + triple(h, s, a) +
                                      " out of [0,1]");
      }
    }
  }
  return result;
}

NormalizedRewards normalize_rewards(std::span<const double> raw, double r_min,
                                    double r_max) {
  if (!(r_max > r_min)) {
    throw std::invalid_argument("constant rewards; choose r_max > r_min");
  }
  NormalizedRewards out;
  out.scale = RewardScale{r_max - r_min, r_min};
  out.values.reserve(raw.size());
  for (double r : raw) {
    if (r < r_min || r > r_max)
      throw std::invalid_argument("raw reward outside [r_min, r_max]");
    out.values.push_back(out.scale.to_normalized(r));
  }
  return out;
}

StepOutcome sample_step(const TabularMDP& mdp, int h, int s, int a, Rng& rng) {
  ARL_CHECK(h >= 0 && h < mdp.horizon(), "step index out of range");
  ARL_CHECK(s >= 0 && s < mdp.num_states(), "state index out of range");
  ARL_CHECK(a >= 0 && a < mdp.num_actions(), "action index out of range");
  const double mean = mdp.reward(h, s, a);
  const int next = rng.categorical(mdp.transition(h, s, a));
  double reward = mean;
  if (mdp.reward_noise() == RewardNoise::kBernoulli)
    reward = rng.bernoulli(mean) ? 1.0 : 0.0;
  return {reward, next};
}

ExecutedAction sample_executed_action(const ExecutionModel& exec, int h, int s,
                                      Rng& rng) {
  if (rng.bernoulli(exec.rho)) return {exec.adversary(h, s), true};
  return {exec.agent(h, s), false};
}

double dot(std::span<const double> p, std::span<const double> v) {
  ARL_CHECK(p.size() == v.size(), "length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * v[i];
  return acc;
}

double apply_D_operator(std::span<const double> dist,
                        std::span<const double> q_row) {
  return dot(dist, q_row);
}

double apply_V_operator(std::span<const double> p_row,
                        std::span<const double> v) {
  ARL_CHECK(p_row.size() == v.size(), "length mismatch");
  const double mean = dot(p_row, v);
  double var = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - mean;
    var += p_row[i] * d * d;
  }
  return std::max(var, 0.0);
}

void check_policy_dims(const TabularMDP& mdp, const DeterministicPolicy& pi) {
  if (pi.horizon() != mdp.horizon() || pi.num_states() != mdp.num_states())
    throw std::invalid_argument(
        "policy dims (H=" + std::to_string(pi.horizon()) +
        ", S=" + std::to_string(pi.num_states()) + ") do not match MDP (H=" +
        std::to_string(mdp.horizon()) + ", S=" + std::to_string(mdp.num_states()) +
        ")");
  for (int a : pi.actions())
    if (a < 0 || a >= mdp.num_actions())
      throw std::invalid_argument("policy action " + std::to_string(a) +
                                  " out of range");
}

ExactEvaluation evaluate_policy_pair_exact(const TabularMDP& mdp,
                                           const DeterministicPolicy& agent,
                                           const DeterministicPolicy& adversary,
                                           double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  ExactEvaluation ev{ValueTable(H, S), QTable(H, S, A)};
  for (int h = H - 1; h >= 0; --h) {
    const auto next = ev.C.row(h + 1);
#pragma omp parallel for schedule(static) if (S >= kParallelStateThreshold)
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const auto p = mdp.transition(h, s, a);
        double q = 0.0;
        for (int sn : mdp.support(h, s, a)) q += p[sn] * next[sn];
        ev.D(h, s, a) = mdp.reward(h, s, a) + q;
      }
      ev.C(h, s) = (1.0 - rho) * ev.D(h, s, agent(h, s)) +
                   rho * ev.D(h, s, adversary(h, s));
    }
  }
  return ev;
}

namespace serial {

ExactEvaluation evaluate_policy_pair_exact(const TabularMDP& mdp,
                                           const DeterministicPolicy& agent,
                                           const DeterministicPolicy& adversary,
                                           double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  ExactEvaluation ev{ValueTable(H, S), QTable(H, S, A)};
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a)
        ev.D(h, s, a) = mdp.reward(h, s, a) +
                        dot(mdp.transition(h, s, a), ev.C.row(h + 1));
      ev.C(h, s) = (1.0 - rho) * ev.D(h, s, agent(h, s)) +
                   rho * ev.D(h, s, adversary(h, s));
    }
  }
  return ev;
}

}  // namespace serial

}  // namespace arl
