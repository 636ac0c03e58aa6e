#include "arl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>


#include "arl/mdp_io.hpp"

namespace arl {

namespace {

constexpr int kParallelStateThreshold = 64;

// Sparse P V over the support of the row.
inline double expect_next(const TabularMDP& mdp, int h, int s, int a,
                          std::span<const double> next) {
  const auto p = mdp.transition(h, s, a);
  double acc = 0.0;
  for (int sn : mdp.support(h, s, a)) acc += p[sn] * next[sn];
  return acc;
}

// Robust value at (0, s1) of a fixed agent with the adversary best-responding.
// `scratch` holds two S-vectors.
double robust_value_at_start(const TabularMDP& mdp, const DeterministicPolicy& pi,
                             double rho, std::vector<double>& scratch) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  scratch.assign(2 * static_cast<std::size_t>(S), 0.0);
  std::span<double> next(scratch.data(), S), cur(scratch.data() + S, S);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double qmin = std::numeric_limits<double>::infinity();
      double qpi = 0.0;
      for (int a = 0; a < A; ++a) {
        const double q = mdp.reward(h, s, a) + expect_next(mdp, h, s, a, next);
        qmin = std::min(qmin, q);
        if (a == pi(h, s)) qpi = q;
      }
      cur[s] = (1.0 - rho) * qpi + rho * qmin;
    }
    std::swap(next, cur);
  }
  return next[mdp.initial_state()];
}

double pair_value_at_start(const TabularMDP& mdp, const DeterministicPolicy& agent,
                           const DeterministicPolicy& adversary, double rho,
                           std::vector<double>& scratch) {
  const int S = mdp.num_states(), H = mdp.horizon();
  scratch.assign(2 * static_cast<std::size_t>(S), 0.0);
  std::span<double> next(scratch.data(), S), cur(scratch.data() + S, S);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      const int a = agent(h, s), b = adversary(h, s);
      const double qa = mdp.reward(h, s, a) + expect_next(mdp, h, s, a, next);
      const double qb = mdp.reward(h, s, b) + expect_next(mdp, h, s, b, next);
      cur[s] = (1.0 - rho) * qa + rho * qb;
    }
    std::swap(next, cur);
  }
  return next[mdp.initial_state()];
}

void guard_enumeration(std::uint64_t count, const char* what) {
  if (count > kEnumerationLimit) {
    std::ostringstream os;
    os << what << ": instance too large to enumerate (A^(S*H) = "
       << (count == UINT64_MAX ? std::string("overflow") : std::to_string(count))
       << " > " << kEnumerationLimit << ")";
    throw EnumerationTooLarge(os.str());
  }
}

struct Best {
  double value;
  std::uint64_t index;
};

// Strictly better, or equal with a lower index.
inline bool prefer_max(const Best& x, const Best& y) {
  return x.value > y.value || (x.value == y.value && x.index < y.index);
}
inline bool prefer_min(const Best& x, const Best& y) {
  return x.value < y.value || (x.value == y.value && x.index < y.index);
}

}  // namespace

RobustSolution solve_robust_optimal(const TabularMDP& mdp, double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  RobustSolution sol{ValueTable(H, S), QTable(H, S, A), DeterministicPolicy(H, S),
                     DeterministicPolicy(H, S), rho};
  for (int h = H - 1; h >= 0; --h) {
    const auto next = sol.V_star.row(h + 1);
#pragma omp parallel for schedule(static) if (S >= kParallelStateThreshold)
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a)
        sol.Q_star(h, s, a) = mdp.reward(h, s, a) + expect_next(mdp, h, s, a, next);
      const auto q = sol.Q_star.row(h, s);
      const int best = argmax(q), worst = argmin(q);
      sol.pi_star(h, s) = best;
      sol.pi_minus(h, s) = worst;
      sol.V_star(h, s) = (1.0 - rho) * q[best] + rho * q[worst];
    }
  }
  return sol;
}

RobustPolicyValue evaluate_robust_policy(const TabularMDP& mdp,
                                         const DeterministicPolicy& pi,
                                         double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  RobustPolicyValue out{ValueTable(H, S), QTable(H, S, A), DeterministicPolicy(H, S)};
  for (int h = H - 1; h >= 0; --h) {
    const auto next = out.V_pi.row(h + 1);
#pragma omp parallel for schedule(static) if (S >= kParallelStateThreshold)
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a)
        out.Q_pi(h, s, a) = mdp.reward(h, s, a) + expect_next(mdp, h, s, a, next);
      const auto q = out.Q_pi.row(h, s);
      const int worst = argmin(q);
      out.best_response_adversary(h, s) = worst;
      out.V_pi(h, s) = (1.0 - rho) * q[pi(h, s)] + rho * q[worst];
    }
  }
  return out;
}

double best_response_agent_value(const TabularMDP& mdp,
                                 const DeterministicPolicy& adversary,
                                 double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<double> next(S, 0.0), cur(S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double qmax = -std::numeric_limits<double>::infinity();
      double qadv = 0.0;
      for (int a = 0; a < A; ++a) {
        const double q = mdp.reward(h, s, a) + expect_next(mdp, h, s, a, next);
        qmax = std::max(qmax, q);
        if (a == adversary(h, s)) qadv = q;
      }
      cur[s] = (1.0 - rho) * qmax + rho * qadv;
    }
    std::swap(next, cur);
  }
  return next[mdp.initial_state()];
}

std::uint64_t deterministic_policy_count(const TabularMDP& mdp) {
  const std::uint64_t A = static_cast<std::uint64_t>(mdp.num_actions());
  const int cells = mdp.num_states() * mdp.horizon();
  std::uint64_t count = 1;
  for (int i = 0; i < cells; ++i) {
    if (count > UINT64_MAX / A) return UINT64_MAX;
    count *= A;
  }
  return count;
}

DeterministicPolicy policy_from_index(std::uint64_t index, int horizon,
                                      int num_states, int num_actions) {
  DeterministicPolicy pi(horizon, num_states);
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      pi(h, s) = static_cast<int>(index % num_actions);
      index /= num_actions;
    }
  }
  return pi;
}

MinimaxResult brute_force_minimax(const TabularMDP& mdp, double rho,
                                  InnerMinimizer inner) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const std::uint64_t count = deterministic_policy_count(mdp);
  guard_enumeration(count, "brute_force_minimax");
  if (inner == InnerMinimizer::kEnumerate) {
    if (count > kEnumerationLimit / count)
      guard_enumeration(UINT64_MAX, "brute_force_minimax (double enumeration)");
  }
  const auto n = static_cast<std::int64_t>(count);

  Best best{-std::numeric_limits<double>::infinity(), 0};
#pragma omp parallel
  {
    Best local{-std::numeric_limits<double>::infinity(), 0};
    std::vector<double> scratch;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const auto agent = policy_from_index(static_cast<std::uint64_t>(i), H, S, A);
      double v;
      if (inner == InnerMinimizer::kBestResponse) {
        v = robust_value_at_start(mdp, agent, rho, scratch);
      } else {
        v = std::numeric_limits<double>::infinity();
        for (std::uint64_t j = 0; j < count; ++j) {
          const auto adv = policy_from_index(j, H, S, A);
          v = std::min(v, pair_value_at_start(mdp, agent, adv, rho, scratch));
        }
      }
      const Best cand{v, static_cast<std::uint64_t>(i)};
      if (prefer_max(cand, local)) local = cand;
    }
#pragma omp critical
    if (prefer_max(local, best)) best = local;
  }
  return {best.value, policy_from_index(best.index, H, S, A)};
}

DualityReport verify_perfect_duality(const TabularMDP& mdp, double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const std::uint64_t count = deterministic_policy_count(mdp);
  guard_enumeration(count, "verify_perfect_duality");
  const double max_min = brute_force_minimax(mdp, rho).value;

  const auto n = static_cast<std::int64_t>(count);
  Best best{std::numeric_limits<double>::infinity(), 0};
#pragma omp parallel
  {
    Best local{std::numeric_limits<double>::infinity(), 0};
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const auto adv = policy_from_index(static_cast<std::uint64_t>(i), H, S, A);
      const Best cand{best_response_agent_value(mdp, adv, rho),
                      static_cast<std::uint64_t>(i)};
      if (prefer_min(cand, local)) local = cand;
    }
#pragma omp critical
    if (prefer_min(local, best)) best = local;
  }
  return {max_min, best.value, std::abs(max_min - best.value)};
}

std::vector<std::string> check_fixed_point(const TabularMDP& mdp,
                                           const RobustSolution& sol, double tol) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<std::string> out;
  auto report = [&](const std::string& what, int h, int s) {
    std::ostringstream os;
    os << what << " at (" << h + 1 << ',' << s << ')';
    out.push_back(os.str());
  };
  for (int s = 0; s < S; ++s)
    if (sol.V_star(H, s) != 0.0) report("terminal value nonzero", H, s);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      const auto q = sol.Q_star.row(h, s);
      for (int a = 0; a < A; ++a) {
        const double rhs =
            mdp.reward(h, s, a) + dot(mdp.transition(h, s, a), sol.V_star.row(h + 1));
        if (std::abs(q[a] - rhs) > tol) report("Q identity violated", h, s);
      }
      const double qmax = *std::max_element(q.begin(), q.end());
      const double qmin = *std::min_element(q.begin(), q.end());
      if (std::abs(sol.V_star(h, s) - ((1.0 - sol.rho) * qmax + sol.rho * qmin)) > tol)
        report("V identity violated", h, s);
      if (q[sol.pi_star(h, s)] != qmax) report("pi_star not greedy", h, s);
      if (q[sol.pi_minus(h, s)] != qmin) report("pi_minus not minimizing", h, s);
    }
  }
  return out;
}

nlohmann::json solution_to_json(const RobustSolution& sol) {
  return {{"rho", sol.rho},
          {"V_star", value_table_to_json(sol.V_star)},
          {"Q_star", q_table_to_json(sol.Q_star)},
          {"pi_star", policy_to_json(sol.pi_star)},
          {"pi_minus", policy_to_json(sol.pi_minus)}};
}

namespace serial {

RobustSolution solve_robust_optimal(const TabularMDP& mdp, double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  RobustSolution sol{ValueTable(H, S), QTable(H, S, A), DeterministicPolicy(H, S),
                     DeterministicPolicy(H, S), rho};
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a)
        sol.Q_star(h, s, a) =
            mdp.reward(h, s, a) + dot(mdp.transition(h, s, a), sol.V_star.row(h + 1));
      const auto q = sol.Q_star.row(h, s);
      sol.pi_star(h, s) = argmax(q);
      sol.pi_minus(h, s) = argmin(q);
      sol.V_star(h, s) =
          (1.0 - rho) * q[sol.pi_star(h, s)] + rho * q[sol.pi_minus(h, s)];
    }
  }
  return sol;
}

RobustPolicyValue evaluate_robust_policy(const TabularMDP& mdp,
                                         const DeterministicPolicy& pi,
                                         double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  RobustPolicyValue out{ValueTable(H, S), QTable(H, S, A), DeterministicPolicy(H, S)};
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a)
        out.Q_pi(h, s, a) =
            mdp.reward(h, s, a) + dot(mdp.transition(h, s, a), out.V_pi.row(h + 1));
      const auto q = out.Q_pi.row(h, s);
      out.best_response_adversary(h, s) = argmin(q);
      out.V_pi(h, s) = (1.0 - rho) * q[pi(h, s)] +
                       rho * q[out.best_response_adversary(h, s)];
    }
  }
  return out;
}

MinimaxResult brute_force_minimax(const TabularMDP& mdp, double rho) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const std::uint64_t count = deterministic_policy_count(mdp);
  guard_enumeration(count, "brute_force_minimax");
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_index = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto agent = policy_from_index(i, H, S, A);
    const double v = serial::evaluate_robust_policy(mdp, agent, rho)
                         .V_pi(0, mdp.initial_state());
    if (v > best) {
      best = v;
      best_index = i;
    }
  }
  return {best, policy_from_index(best_index, H, S, A)};
}

}  // namespace serial

}  // namespace arl
