#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "arl/mdp.hpp"

namespace arl {

// 4 x 12 cliff grid. Cells are row-major (state = row * 12 + col); state 48 is
// the absorbing state entered from the goal.
struct GridSpec {
  static constexpr int kRows = 4;
  static constexpr int kCols = 12;
  static constexpr int kCells = kRows * kCols;
  static constexpr int kAbsorbing = kCells;
  static constexpr int kNumStates = kCells + 1;
  static constexpr int kStart = 3 * kCols + 0;
  static constexpr int kGoal = 3 * kCols + 11;

  static constexpr int cell(int row, int col) { return row * kCols + col; }
  static constexpr bool is_cliff(int row, int col) {
    return row == 3 && col >= 1 && col <= 10;
  }
};

enum CliffAction : int { kUp = 0, kRight = 1, kDown = 2, kLeft = 3 };

inline constexpr double kCliffRawMin = -100.0;
inline constexpr double kCliffRawMax = 0.0;

struct CliffWalking {
  TabularMDP mdp;
  RewardScale scale;
};

// Deterministic, time-homogeneous. A step costs raw -1; stepping into the
// cliff costs raw -100 and returns to the start; the goal leads to an
// absorbing state paying raw 0 per step. Rewards are normalized with bounds
// [-100, 0].
CliffWalking build_cliff_walking(int H);

// Every (h, s) maps to `down`.
DeterministicPolicy build_fixed_adversary_cliff(int H);

// Rows ~ symmetric Dirichlet(concentration), rewards ~ U[0,1], s1 = 0.
TabularMDP build_random_mdp(int S, int A, int H, double concentration,
                            std::uint64_t seed,
                            RewardNoise noise = RewardNoise::kDeterministic);

enum ChainAction : int { kChainLeft = 0, kChainRight = 1 };

// States 0..n-1 on a line. `right` advances w.p. 1-slip (pays 1 at n-1),
// `left` returns to 0 (pays 0.01 at state 0).
TabularMDP build_chain_mdp(int n, int H, double slip);

class EnvSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Environment {
  std::string name;
  TabularMDP mdp;
  std::optional<RewardScale> scale;
  std::optional<DeterministicPolicy> fixed_adversary;
};

// Parses `cliff`, `chain:n=..,slip=..`, `random:S=..,A=..,seed=..` (optional
// `concentration=..`, `noise=bernoulli`). Throws EnvSpecError.
Environment make_environment(const std::string& spec, int H);

}  // namespace arl
