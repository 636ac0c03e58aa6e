#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "arl/mdp.hpp"

namespace arl {

// Optimal robust values under the execution set {(1-rho) pi + rho pi'} and
// the adversary that attains the inner minimum.
struct RobustSolution {
  ValueTable V_star;
  QTable Q_star;
  DeterministicPolicy pi_star;
  DeterministicPolicy pi_minus;
  double rho = 0.0;
};

// Worst-case value of a fixed agent policy.
struct RobustPolicyValue {
  ValueTable V_pi;
  QTable Q_pi;
  DeterministicPolicy best_response_adversary;
};

// Backward induction of
//   Q*(s,a) = R(s,a) + P V*_{h+1}(s,a)
//   V*(s)   = (1-rho) max_a Q*(s,a) + rho min_b Q*(s,b)
// Ties go to the lowest action index.
RobustSolution solve_robust_optimal(const TabularMDP& mdp, double rho);

// V^pi(s) = (1-rho) Q^pi(s, pi(s)) + rho min_a Q^pi(s,a).
RobustPolicyValue evaluate_robust_policy(const TabularMDP& mdp,
                                         const DeterministicPolicy& pi,
                                         double rho);

// Value of the best agent against a fixed adversary:
// C(s) = (1-rho) max_a D(s,a) + rho D(s, adversary(s)).
double best_response_agent_value(const TabularMDP& mdp,
                                 const DeterministicPolicy& adversary,
                                 double rho);

inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

// A^(S*H), saturating at UINT64_MAX.
std::uint64_t deterministic_policy_count(const TabularMDP& mdp);

// The index-th deterministic policy, digits base A over (h, s) in row order.
DeterministicPolicy policy_from_index(std::uint64_t index, int horizon,
                                      int num_states, int num_actions);

enum class InnerMinimizer {
  kBestResponse,  // robust Bellman equation per agent policy
  kEnumerate,     // every adversary policy; tiny instances only
};

struct MinimaxResult {
  double value;
  DeterministicPolicy agent;
};

class EnumerationTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// max over deterministic agents of min over deterministic adversaries of the
// mixed-execution value at (step 0, s1). Throws EnumerationTooLarge when the
// enumeration exceeds kEnumerationLimit.
MinimaxResult brute_force_minimax(
    const TabularMDP& mdp, double rho,
    InnerMinimizer inner = InnerMinimizer::kBestResponse);

struct DualityReport {
  double max_min;
  double min_max;
  double gap;
};

DualityReport verify_perfect_duality(const TabularMDP& mdp, double rho);

// Tensor-wide check of the optimality identities; returns violation messages.
std::vector<std::string> check_fixed_point(const TabularMDP& mdp,
                                           const RobustSolution& sol,
                                           double tol = 1e-9);

nlohmann::json solution_to_json(const RobustSolution& sol);

namespace serial {

RobustSolution solve_robust_optimal(const TabularMDP& mdp, double rho);
RobustPolicyValue evaluate_robust_policy(const TabularMDP& mdp,
                                         const DeterministicPolicy& pi,
                                         double rho);
MinimaxResult brute_force_minimax(const TabularMDP& mdp, double rho);

}  // namespace serial

}  // namespace arl
