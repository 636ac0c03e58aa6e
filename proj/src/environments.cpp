#include "arl/environments.hpp"

#include <charconv>
#include <map>
#include <random>

namespace arl {

CliffWalking build_cliff_walking(int H) {
  if (H < 1) throw std::invalid_argument("H must be positive");
  constexpr int S = GridSpec::kNumStates;
  constexpr int A = 4;
  constexpr int kMoves[A][2] = {{-1, 0}, {0, 1}, {1, 0}, {0, -1}};

  std::vector<double> P1(static_cast<std::size_t>(S) * A * S, 0.0);
  std::vector<double> raw(static_cast<std::size_t>(S) * A, -1.0);
  auto set = [&](int s, int a, int next, double r) {
    P1[(static_cast<std::size_t>(s) * A + a) * S + next] = 1.0;
    raw[static_cast<std::size_t>(s) * A + a] = r;
  };

  for (int row = 0; row < GridSpec::kRows; ++row) {
    for (int col = 0; col < GridSpec::kCols; ++col) {
      const int s = GridSpec::cell(row, col);
      for (int a = 0; a < A; ++a) {
        if (s == GridSpec::kGoal) {
          set(s, a, GridSpec::kAbsorbing, 0.0);
        } else if (GridSpec::is_cliff(row, col)) {
          // Unreachable from the start; behave like the start cell's reset.
          set(s, a, GridSpec::kStart, -1.0);
        } else {
          const int nr = std::clamp(row + kMoves[a][0], 0, GridSpec::kRows - 1);
          const int nc = std::clamp(col + kMoves[a][1], 0, GridSpec::kCols - 1);
          if (GridSpec::is_cliff(nr, nc))
            set(s, a, GridSpec::kStart, -100.0);
          else
            set(s, a, GridSpec::cell(nr, nc), -1.0);
        }
      }
    }
  }
  for (int a = 0; a < A; ++a) set(GridSpec::kAbsorbing, a, GridSpec::kAbsorbing, 0.0);

  auto norm = normalize_rewards(raw, kCliffRawMin, kCliffRawMax);
  std::vector<double> P, R;
  P.reserve(P1.size() * H);
  R.reserve(raw.size() * H);
  for (int h = 0; h < H; ++h) {
    P.insert(P.end(), P1.begin(), P1.end());
    R.insert(R.end(), norm.values.begin(), norm.values.end());
  }
  return {TabularMDP(S, A, H, std::move(P), std::move(R), GridSpec::kStart),
          norm.scale};
}

DeterministicPolicy build_fixed_adversary_cliff(int H) {
  return DeterministicPolicy(H, GridSpec::kNumStates, kDown);
}

TabularMDP build_random_mdp(int S, int A, int H, double concentration,
                            std::uint64_t seed, RewardNoise noise) {
  if (S < 1 || A < 1 || H < 1) throw std::invalid_argument("S, A, H must be positive");
  if (!(concentration > 0.0)) throw std::invalid_argument("concentration must be positive");
  Rng rng = Rng::derive(seed, "random_mdp");
  std::gamma_distribution<double> gamma(concentration, 1.0);
  const std::size_t pairs = static_cast<std::size_t>(H) * S * A;
  std::vector<double> P(pairs * S), R(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    double sum = 0.0;
    for (int sn = 0; sn < S; ++sn) sum += P[i * S + sn] = gamma(rng.engine());
    if (sum > 0.0) {
      for (int sn = 0; sn < S; ++sn) P[i * S + sn] /= sum;
    } else {
      // Every gamma draw underflowed (tiny concentration): a vertex of the simplex.
      P[i * S + rng.uniform_int(S)] = 1.0;
    }
    R[i] = rng.uniform();
  }
  return TabularMDP(S, A, H, std::move(P), std::move(R), 0, noise);
}

TabularMDP build_chain_mdp(int n, int H, double slip) {
  if (n < 2) throw std::invalid_argument("chain length must be at least 2");
  if (!(slip >= 0.0 && slip <= 0.5)) throw std::invalid_argument("slip must lie in [0, 0.5]");
  if (H < 1) throw std::invalid_argument("H must be positive");
  const int S = n, A = 2;
  std::vector<double> P1(static_cast<std::size_t>(S) * A * S, 0.0);
  std::vector<double> R1(static_cast<std::size_t>(S) * A, 0.0);
  auto p = [&](int s, int a, int sn) -> double& {
    return P1[(static_cast<std::size_t>(s) * A + a) * S + sn];
  };
  for (int s = 0; s < S; ++s) {
    p(s, kChainLeft, 0) = 1.0;
    if (s == 0) R1[static_cast<std::size_t>(s) * A + kChainLeft] = 0.01;
    if (s == S - 1) {
      p(s, kChainRight, s) = 1.0;
      R1[static_cast<std::size_t>(s) * A + kChainRight] = 1.0;
    } else {
      p(s, kChainRight, s + 1) += 1.0 - slip;
      p(s, kChainRight, s) += slip;
    }
  }
  std::vector<double> P, R;
  for (int h = 0; h < H; ++h) {
    P.insert(P.end(), P1.begin(), P1.end());
    R.insert(R.end(), R1.begin(), R1.end());
  }
  return TabularMDP(S, A, H, std::move(P), std::move(R), 0);
}

namespace {

std::map<std::string, std::string> parse_params(const std::string& spec,
                                                std::size_t colon) {
  std::map<std::string, std::string> params;
  if (colon == std::string::npos) return params;
  std::size_t pos = colon + 1;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(pos, comma - pos);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw EnvSpecError("malformed env parameter '" + item + "' in '" + spec + "'");
      params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    pos = comma + 1;
  }
  return params;
}

template <typename T>
T take(std::map<std::string, std::string>& params, const std::string& key,
       std::optional<T> fallback, const std::string& spec) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (fallback) return *fallback;
    throw EnvSpecError("env '" + spec + "' requires parameter '" + key + "'");
  }
  const std::string text = it->second;
  params.erase(it);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw EnvSpecError("bad value '" + text + "' for '" + key + "' in '" + spec + "'");
  return value;
}

void reject_leftovers(const std::map<std::string, std::string>& params,
                      const std::string& spec) {
  if (!params.empty())
    throw EnvSpecError("unknown parameter '" + params.begin()->first + "' in '" + spec + "'");
}

}  // namespace

Environment make_environment(const std::string& spec, int H) {
  if (H < 1) throw EnvSpecError("H must be positive");
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  auto params = parse_params(spec, colon);

  if (kind == "cliff") {
    reject_leftovers(params, spec);
    auto cw = build_cliff_walking(H);
    return {spec, std::move(cw.mdp), cw.scale, build_fixed_adversary_cliff(H)};
  }
  if (kind == "chain") {
    const int n = take<int>(params, "n", std::nullopt, spec);
    const double slip = take<double>(params, "slip", 0.0, spec);
    reject_leftovers(params, spec);
    if (n < 2 || slip < 0.0 || slip > 0.5)
      throw EnvSpecError("chain requires n >= 2 and slip in [0, 0.5]");
    return {spec, build_chain_mdp(n, H, slip), std::nullopt, std::nullopt};
  }
  if (kind == "random") {
    const int S = take<int>(params, "S", std::nullopt, spec);
    const int A = take<int>(params, "A", std::nullopt, spec);
    const auto seed = take<std::uint64_t>(params, "seed", std::nullopt, spec);
    const double conc = take<double>(params, "concentration", 1.0, spec);
    RewardNoise noise = RewardNoise::kDeterministic;
    if (auto it = params.find("noise"); it != params.end()) {
      if (it->second == "bernoulli")
        noise = RewardNoise::kBernoulli;
      else if (it->second != "deterministic")
        throw EnvSpecError("unknown noise '" + it->second + "'");
      params.erase(it);
    }
    reject_leftovers(params, spec);
    if (S < 1 || A < 1 || !(conc > 0.0))
      throw EnvSpecError("random requires S, A >= 1 and concentration > 0");
    return {spec, build_random_mdp(S, A, H, conc, seed, noise), std::nullopt,
            std::nullopt};
  }
  throw EnvSpecError("unknown env '" + kind +
                     "' (expected cliff, chain:n=..,slip=.., random:S=..,A=..,seed=..)");
}

}  // namespace arl
