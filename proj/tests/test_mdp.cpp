#include <doctest.h>

#include <cmath>

#include "arl/environments.hpp"
#include "arl/mdp.hpp"
#include "arl/mdp_io.hpp"
#include "oracles.hpp"

using namespace arl;

namespace {

TabularMDP one_state(double p, double r) {
  return TabularMDP(1, 1, 1, {p}, {r}, 0);
}

TabularMDP two_armed(double r0, double r1) {
  return TabularMDP(1, 2, 1, {1.0, 1.0}, {r0, r1}, 0);
}

}  // namespace

TEST_CASE("validate_mdp accepts the smallest valid MDP") {
  CHECK(validate_mdp(one_state(1.0, 0.5)).ok());
}

TEST_CASE("validate_mdp names a broken simplex row") {
  const auto res = validate_mdp(one_state(0.9, 0.5));
  REQUIRE(res.violations.size() == 1);
  CHECK(res.violations[0] == "row (1,0,0) sums to 0.9");
}

TEST_CASE("validate_mdp names an out-of-range reward") {
  const auto res = validate_mdp(one_state(1.0, 1.5));
  REQUIRE(res.violations.size() == 1);
  CHECK(res.violations[0] == "reward (1,0,0) out of [0,1]");
}

TEST_CASE("validate_mdp simplex tolerance is 1e-9") {
  CHECK(validate_mdp(TabularMDP(2, 1, 1, {0.5, 0.5 + 5e-10, 1.0, 0.0}, {0.0, 0.0}, 0)).ok());
  CHECK_FALSE(validate_mdp(TabularMDP(2, 1, 1, {0.5, 0.5 + 5e-9, 1.0, 0.0}, {0.0, 0.0}, 0)).ok());
  CHECK_FALSE(validate_mdp(TabularMDP(2, 1, 1, {1.5, -0.5, 1.0, 0.0}, {0.0, 0.0}, 0)).ok());
}

TEST_CASE("validate_mdp reports a bad initial state") {
  CHECK_FALSE(validate_mdp(TabularMDP(1, 1, 1, {1.0}, {0.0}, 3)).ok());
}

TEST_CASE("normalize_rewards") {
  SUBCASE("cliff endpoints") {
    const std::vector<double> raw{-100.0, -1.0, 0.0};
    const auto n = normalize_rewards(raw, -100.0, 0.0);
    CHECK(n.values[0] == 0.0);
    CHECK(n.values[1] == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(n.values[2] == 1.0);
    for (std::size_t i = 0; i < raw.size(); ++i)
      CHECK(n.scale.to_raw(n.values[i]) == doctest::Approx(raw[i]).epsilon(1e-15));
  }
  SUBCASE("identity") {
    const std::vector<double> raw{0.0, 0.25, 1.0};
    const auto n = normalize_rewards(raw, 0.0, 1.0);
    CHECK(n.values == raw);
  }
  SUBCASE("midpoint") {
    const std::vector<double> raw{-1.0};
    CHECK(normalize_rewards(raw, -2.0, 0.0).values[0] == 0.5);
  }
  SUBCASE("degenerate range") {
    const std::vector<double> raw{1.0};
    CHECK_THROWS_WITH_AS(normalize_rewards(raw, 1.0, 1.0),
                         "constant rewards; choose r_max > r_min", std::invalid_argument);
  }
}

TEST_CASE("sample_step on a point mass is deterministic") {
  std::vector<double> P(5 * 5, 0.0);
  for (int s = 0; s < 5; ++s) P[s * 5 + 3] = 1.0;
  const TabularMDP m(5, 1, 1, P, std::vector<double>(5, 0.7), 0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto out = sample_step(m, 0, 2, 0, rng);
    CHECK(out.reward == 0.7);
    CHECK(out.next_state == 3);
  }
}

TEST_CASE("sample_step frequencies and bernoulli rewards") {
  const TabularMDP m(2, 1, 1, {0.5, 0.5, 0.5, 0.5}, {0.25, 0.25}, 0,
                     RewardNoise::kBernoulli);
  Rng rng(42);
  int ones = 0;
  double reward_sum = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const auto out = sample_step(m, 0, 0, 0, rng);
    ones += out.next_state;
    reward_sum += out.reward;
    CHECK((out.reward == 0.0 || out.reward == 1.0));
  }
  const double freq = static_cast<double>(ones) / kDraws;
  CHECK(freq >= 0.49);
  CHECK(freq <= 0.51);
  const double mean = reward_sum / kDraws;
  CHECK(mean >= 0.24);
  CHECK(mean <= 0.26);
}

TEST_CASE("sample_step rejects bad indices") {
  const auto m = one_state(1.0, 0.5);
  Rng rng(1);
  CHECK_THROWS_AS(sample_step(m, 1, 0, 0, rng), std::logic_error);
  CHECK_THROWS_AS(sample_step(m, 0, 0, 1, rng), std::logic_error);
}

TEST_CASE("sample_executed_action") {
  const ExecutionModel base{DeterministicPolicy(1, 1, 0), DeterministicPolicy(1, 1, 1), 0.0};
  Rng rng(7);
  SUBCASE("rho = 0") {
    for (int i = 0; i < 1000; ++i) {
      const auto e = sample_executed_action(base, 0, 0, rng);
      CHECK(e.action == 0);
      CHECK_FALSE(e.adversarial);
    }
  }
  SUBCASE("rho = 1") {
    auto exec = base;
    exec.rho = 1.0;
    for (int i = 0; i < 1000; ++i) {
      const auto e = sample_executed_action(exec, 0, 0, rng);
      CHECK(e.action == 1);
      CHECK(e.adversarial);
    }
  }
  SUBCASE("rho = 0.2 frequency") {
    auto exec = base;
    exec.rho = 0.2;
    int adv = 0;
    for (int i = 0; i < 100000; ++i) adv += sample_executed_action(exec, 0, 0, rng).adversarial;
    CHECK(adv / 1e5 >= 0.19);
    CHECK(adv / 1e5 <= 0.21);
  }
}

TEST_CASE("evaluate_policy_pair_exact one-step mixture") {
  const auto m = two_armed(1.0, 0.0);
  const auto ev = evaluate_policy_pair_exact(m, DeterministicPolicy(1, 1, 0),
                                             DeterministicPolicy(1, 1, 1), 0.2);
  CHECK(ev.C(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(ev.C(1, 0) == 0.0);
}

TEST_CASE("evaluate_policy_pair_exact at rho=0 is standard policy evaluation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = build_random_mdp(4, 3, 4, 1.0, seed);
    Rng rng(seed + 100);
    DeterministicPolicy agent(4, 4), adv(4, 4);
    for (int h = 0; h < 4; ++h)
      for (int s = 0; s < 4; ++s) {
        agent(h, s) = rng.uniform_int(3);
        adv(h, s) = rng.uniform_int(3);
      }
    const auto ev = evaluate_policy_pair_exact(m, agent, adv, 0.0);
    const auto ref = oracle::standard_policy_evaluation(m, agent);
    for (int h = 0; h <= 4; ++h)
      for (int s = 0; s < 4; ++s) CHECK(std::abs(ev.C(h, s) - ref[h][s]) <= 1e-12);
  }
}

TEST_CASE("evaluate_policy_pair_exact matches forward propagation and Monte Carlo") {
  const auto m = build_random_mdp(3, 2, 3, 1.0, 11);
  DeterministicPolicy agent(3, 3), adv(3, 3, 1);
  agent(1, 2) = 1;
  adv(0, 0) = 0;
  const double rho = 0.3;
  const auto ev = evaluate_policy_pair_exact(m, agent, adv, rho);
  const double exact = ev.C(0, m.initial_state());
  CHECK(std::abs(exact - oracle::mixed_value_forward(m, agent, adv, rho)) <= 1e-12);

  const auto mc = oracle::monte_carlo_mixed(m, agent, adv, rho, 100000, 5);
  CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.std_error);
}

TEST_CASE("mixed value is a polynomial of degree <= H in rho") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int H = 4;
    const auto m = build_random_mdp(3, 3, H, 0.5, seed);
    DeterministicPolicy agent(H, 3, 0), adv(H, 3, 2);
    agent(2, 1) = 1;
    adv(1, 0) = 1;
    oracle::Vec xs, ys;
    for (int i = 0; i <= H; ++i) {
      xs.push_back(static_cast<double>(i) / H);
      ys.push_back(evaluate_policy_pair_exact(m, agent, adv, xs.back()).C(0, 0));
    }
    const double held_out = 0.37;
    const double direct = evaluate_policy_pair_exact(m, agent, adv, held_out).C(0, 0);
    CHECK(std::abs(oracle::lagrange(xs, ys, held_out) - direct) <= 1e-9);
  }
}

TEST_CASE("ExactEvaluation range and terminal row") {
  const int H = 5;
  const auto m = build_random_mdp(6, 3, H, 1.0, 3);
  const auto ev = evaluate_policy_pair_exact(m, DeterministicPolicy(H, 6, 1),
                                             DeterministicPolicy(H, 6, 2), 0.4);
  for (int s = 0; s < 6; ++s) CHECK(ev.C(H, s) == 0.0);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < 6; ++s) {
      CHECK(ev.C(h, s) >= 0.0);
      CHECK(ev.C(h, s) <= H - h);
    }
}

TEST_CASE("parallel and serial pair evaluation agree bitwise") {
  const int H = 6;
  const auto m = build_random_mdp(80, 3, H, 0.3, 9);  // above the threading threshold
  DeterministicPolicy agent(H, 80, 0), adv(H, 80, 2);
  for (int s = 0; s < 80; s += 3) agent(2, s) = 1;
  const auto a = evaluate_policy_pair_exact(m, agent, adv, 0.2);
  const auto b = serial::evaluate_policy_pair_exact(m, agent, adv, 0.2);
  CHECK(a.C.data() == b.C.data());
  CHECK(a.D.data() == b.D.data());
}

TEST_CASE("apply_D_operator") {
  CHECK(apply_D_operator(std::vector<double>{0.0, 1.0}, std::vector<double>{3.0, 5.0}) == 5.0);
  CHECK(apply_D_operator(std::vector<double>{0.5, 0.5}, std::vector<double>{2.0, 4.0}) == 3.0);
  CHECK(apply_D_operator(std::vector<double>{0.8, 0.2}, std::vector<double>{1.0, 0.0}) ==
        doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(apply_D_operator(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                  std::logic_error);
}

TEST_CASE("apply_V_operator") {
  CHECK(apply_V_operator(std::vector<double>{0.0, 1.0, 0.0}, std::vector<double>{4.0, 7.0, 1.0}) == 0.0);
  CHECK(apply_V_operator(std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 2.0}) == 1.0);
  CHECK(apply_V_operator(std::vector<double>{0.2, 0.3, 0.5}, std::vector<double>{3.3, 3.3, 3.3}) == 0.0);
}

TEST_CASE("apply_V_operator is shift invariant and non-negative") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + rng.uniform_int(8);
    std::vector<double> p(n), v(n), shifted(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += p[i] = rng.uniform();
    for (auto& x : p) x /= sum;
    const double c = 20.0 * rng.uniform() - 10.0;
    for (int i = 0; i < n; ++i) {
      v[i] = 10.0 * rng.uniform();
      shifted[i] = v[i] + c;
    }
    const double base = apply_V_operator(p, v);
    CHECK(base >= 0.0);
    CHECK(std::abs(apply_V_operator(p, shifted) - base) <= 1e-9);
  }
}

TEST_CASE("MDP JSON round trip preserves every entry") {
  const auto m = build_random_mdp(3, 2, 2, 1.0, 77, RewardNoise::kBernoulli);
  const auto back = mdp_from_json(nlohmann::json::parse(mdp_to_json(m).dump()));
  CHECK(back.transitions() == m.transitions());
  CHECK(back.rewards() == m.rewards());
  CHECK(back.reward_noise() == RewardNoise::kBernoulli);
  CHECK(back.initial_state() == m.initial_state());
}

TEST_CASE("mdp_from_json rejects ragged tensors") {
  auto j = mdp_to_json(build_random_mdp(2, 2, 1, 1.0, 1));
  j["P"][0][0][0] = std::vector<double>{1.0};
  CHECK_THROWS_AS(mdp_from_json(j), std::invalid_argument);
}
