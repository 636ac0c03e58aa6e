// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "arl/arrlc.hpp"
#include "arl/environments.hpp"
#include "arl/evaluation.hpp"
#include "arl/planner.hpp"
#include "arl/ucbh.hpp"
#include "oracles.hpp"

using namespace arl;

namespace {

// Instance shared by criteria 3 to 6.
constexpr int kS = 5, kA = 3, kH = 5;
constexpr std::uint64_t kInstanceSeed = 2024;
constexpr double kRho = 0.2;
constexpr double kDelta = 0.05;
constexpr std::uint64_t kRunSeed = 1;

// Episode budgets. The nominal K = 2000 leaves every certificate at width H on
// this instance, so the convergence budgets below come from pilot runs.
constexpr int kSandwichK = 2000;
constexpr int kConvergenceK = 5'000'000;  // pilot: eps first <= 0.5 near episode 3.57e6
constexpr int kRegretK = 50'000;          // pilot: ratio 2.15 over seeds 1..5
constexpr int kUcbhMonotoneK = 5000;
constexpr int kUcbhNominalK = 5000;
constexpr int kArrlcNominalK = 2000;
constexpr int kUcbhScaledK = kConvergenceK / 2 * 5;  // same 5:2 episode ratio
constexpr int kCliffH = 30;
constexpr int kCliffK = 1'000'000;
constexpr int kCliffEvalN = 1000;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string num(double x) { return fmt("%.6g", x); }

LearnerConfig learner_config(int K, double rho) {
  LearnerConfig c;
  c.K = K;
  c.rho = rho;
  c.delta = kDelta;
  return c;
}

TabularMDP instance() { return build_random_mdp(kS, kA, kH, 1.0, kInstanceSeed); }

DeterministicPolicy random_policy(int H, int S, int A, std::uint64_t seed) {
  Rng rng(seed);
  DeterministicPolicy pi(H, S);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) pi(h, s) = rng.uniform_int(A);
  return pi;
}

Verdict oracle_correctness() {
  double worst_match = 0.0, worst_gap = 0.0;
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const int S = 1 + i % 3, A = 1 + (i / 3) % 2, H = 1 + (i / 6) % 3;
    const auto m = build_random_mdp(S, A, H, 1.0, 7000 + i);
    for (double rho : {0.0, 0.25, 0.5, 1.0}) {
      const double v = solve_robust_optimal(m, rho).V_star(0, m.initial_state());
      worst_match = std::max(worst_match, std::abs(brute_force_minimax(m, rho).value - v));
      worst_gap = std::max(worst_gap, verify_perfect_duality(m, rho).gap);
      ++checked;
    }
  }
  return {worst_match < 1e-9 && worst_gap < 1e-9,
          std::to_string(checked) + " (instance, rho) pairs; max |V* - maxmin| = " + num(worst_match) +
              ", max duality gap = " + num(worst_gap) + " (tol 1e-9)"};
}

Verdict rho_zero_reduction() {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int S = 2 + i % 7, A = 1 + i % 4, H = 1 + i % 6;
    const auto m = build_random_mdp(S, A, H, 0.3 + 0.1 * i, 8000 + i);
    const auto sol = solve_robust_optimal(m, 0.0);
    const auto ref = oracle::standard_value_iteration(m);
    for (int h = 0; h <= H; ++h)
      for (int s = 0; s < S; ++s) worst = std::max(worst, std::abs(sol.V_star(h, s) - ref[h][s]));
  }
  return {worst <= 1e-12, "20 instances; max |V*_rho=0 - V_standard| = " + num(worst) + " (tol 1e-12)"};
}

Verdict sandwich() {
  const auto m = instance();
  const double v_star = solve_robust_optimal(m, kRho).V_star(0, m.initial_state());
  int violations = 0, episodes = 0;
  RunOptions opt;
  opt.keep_trajectories = false;
  opt.on_episode = [&](const EpisodeView& v) {
    ++episodes;
    const double v_pi = evaluate_robust_policy(m, v.policy, kRho).V_pi(0, m.initial_state());
    const auto& c = v.certificate;
    const bool ok = c.lower <= v_pi + 1e-9 && v_pi <= c.upper + 1e-9 && c.lower <= v_star + 1e-9 &&
                    v_star <= c.upper + 1e-9;
    violations += !ok;
  };
  run_arrlc(m, learner_config(kSandwichK, kRho), kRunSeed, opt);
  const double frac = static_cast<double>(violations) / episodes;
  return {frac <= kDelta, std::to_string(violations) + "/" + std::to_string(episodes) +
                              " episodes violate the sandwich (fraction " + num(frac) + ", limit 0.05)"};
}

struct ConvergenceRun {
  int first_hit = -1;
  double final_epsilon = 0.0;
};

ConvergenceRun arrlc_convergence(int K) {
  const auto m = instance();
  ConvergenceRun out;
  RunOptions opt;
  opt.keep_trajectories = false;
  opt.on_episode = [&](const EpisodeView& v) {
    if (out.first_hit < 0 && v.certificate.epsilon <= 0.1 * kH) out.first_hit = v.episode;
  };
  const auto r = run_arrlc(m, learner_config(K, kRho), kRunSeed, opt);
  out.final_epsilon = r.log.back().certificate.epsilon;
  return out;
}

Verdict certificate_convergence(const ConvergenceRun& nominal, const ConvergenceRun& pilot) {
  const bool pass = pilot.first_hit > 0;
  std::string d = "K=" + std::to_string(kArrlcNominalK) + ": final eps = " + num(nominal.final_epsilon) +
                  (nominal.first_hit > 0 ? ", hits 0.1H at " + std::to_string(nominal.first_hit)
                                        : ", never <= 0.1H") +
                  "; pilot K=" + std::to_string(kConvergenceK) + ": ";
  d += pass ? "eps <= 0.1H = 0.5 first at episode " + std::to_string(pilot.first_hit)
            : std::string("never <= 0.1H");
  d += ", final eps = " + num(pilot.final_epsilon);
  return {pass, d};
}

Verdict sublinear_regret() {
  const auto m = instance();
  double at_k = 0.0, at_4k = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RegretTracker tracker(m, kRho, RegretTracker::Thinning::kOff);
    RunOptions opt;
    opt.keep_trajectories = false;
    opt.on_episode = [&](const EpisodeView& v) {
      const auto rec = tracker.record(v.episode, v.policy);
      if (v.episode == kRegretK) at_k += rec.cumulative;
    };
    run_arrlc(m, learner_config(4 * kRegretK, kRho), seed, opt);
    at_4k += tracker.cumulative();
  }
  const double ratio = at_4k / at_k;
  return {ratio < 2.5, "K=" + std::to_string(kRegretK) + ", mean over 5 seeds: Regret(K) = " + num(at_k / 5) +
                           ", Regret(4K) = " + num(at_4k / 5) + ", ratio = " + num(ratio) + " (limit 2.5)"};
}

Verdict ucbh_invariants(const ConvergenceRun& arrlc_nominal, const ConvergenceRun& arrlc_pilot) {
  const auto m = instance();
  // monotone updates over a full run, checked after every step
  ArUcbh learner(kS, kA, kH, learner_config(kUcbhMonotoneK, kRho));
  Rng env = Rng::derive(kRunSeed, "env"), beh = Rng::derive(kRunSeed, "behavior");
  long fired = 0;
  for (int k = 0; k < kUcbhMonotoneK; ++k) {
    int s = m.initial_state();
    for (int h = 0; h < kH; ++h) {
      const double vb = learner.v_bar()(h, s), vu = learner.v_under()(h, s);
      const auto e = learner.act(h, s, beh);
      const auto out = sample_step(m, h, s, e.action, env);
      learner.observe(h, s, e.action, out.reward, out.next_state);
      fired += learner.v_bar()(h, s) > vb || learner.v_under()(h, s) < vu;
      s = out.next_state;
    }
    learner.issue_certificate(m.initial_state());
  }
  fired += learner.monotonicity_violations();

  double worst_weight = 0.0;
  bool sq_ok = true;
  for (int H : {1, 2, 5})
    for (int t = 1; t <= 100; ++t) {
      const auto w = learning_rate_weights(t, H);
      double sum = 0.0, sq = 0.0;
      for (int i = 1; i <= t; ++i) {
        sum += w[i];
        sq += w[i] * w[i];
      }
      worst_weight = std::max({worst_weight, std::abs(sum - 1.0), std::abs(w[0])});
      sq_ok = sq_ok && sq <= 2.0 * H / t + 1e-9;
    }

  const auto ucbh_width = [&](int K) {
    RunOptions opt;
    opt.keep_trajectories = false;
    return run_ucbh(m, learner_config(K, kRho), kRunSeed, opt).log.back().certificate.epsilon;
  };
  const double nominal_ucbh = ucbh_width(kUcbhNominalK);
  const double scaled_ucbh = ucbh_width(kUcbhScaledK);
  const bool wider = scaled_ucbh > arrlc_pilot.final_epsilon;

  const bool pass = fired == 0 && worst_weight <= 1e-9 && sq_ok && wider;
  return {pass, "monotonicity assertions fired " + std::to_string(fired) + " times over K=" +
                    std::to_string(kUcbhMonotoneK) + "; weight identities max err " + num(worst_weight) +
                    (sq_ok ? ", square bound holds" : ", square bound FAILS") + "; widths: UCBH@" +
                    std::to_string(kUcbhScaledK) + " = " + num(scaled_ucbh) + " vs ARRLC@" +
                    std::to_string(kConvergenceK) + " = " + num(arrlc_pilot.final_epsilon) + " (nominal K: UCBH@" +
                    std::to_string(kUcbhNominalK) + " = " + num(nominal_ucbh) + " vs ARRLC@" +
                    std::to_string(kArrlcNominalK) + " = " + num(arrlc_nominal.final_epsilon) + ")"};
}

Verdict cliff_robustness() {
  const auto cw = build_cliff_walking(kCliffH);
  const auto spec = PerturbationSpec::fixed(build_fixed_adversary_cliff(kCliffH), 0.2);
  EvaluationReport reports[2];
  DeterministicPolicy policies[2];
  const double rhos[2] = {0.2, 0.0};
  for (int i = 0; i < 2; ++i) {
    RunOptions opt;
    opt.keep_trajectories = false;
    policies[i] = run_arrlc(cw.mdp, learner_config(kCliffK, rhos[i]), kRunSeed, opt).pi_out;
    reports[i] = rollout_perturbed(cw.mdp, policies[i], spec, kCliffEvalN, 77, cw.scale);
  }
  const auto& r = reports[0];
  const auto& n = reports[1];
  const bool pass = r.mean_return_raw - 2 * r.std_error_raw > n.mean_return_raw + 2 * n.std_error_raw;
  std::string d = "K=" + std::to_string(kCliffK) + ", n=" + std::to_string(kCliffEvalN) +
                  ", fixed-down p=0.2: robust mean raw " + num(r.mean_return_raw) + " +- " +
                  num(2 * r.std_error_raw) + ", non-robust " + num(n.mean_return_raw) + " +- " +
                  num(2 * n.std_error_raw);
  if (policies[0] == policies[1]) d += "; the two output policies are identical";
  return {pass, d};
}

Verdict monte_carlo_vs_exact() {
  int within = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int S = 2 + i % 4, A = 2 + i % 3, H = 2 + i % 4;
    const auto m = build_random_mdp(S, A, H, 1.0, 9000 + i, i % 2 ? RewardNoise::kBernoulli
                                                                  : RewardNoise::kDeterministic);
    const auto pi = random_policy(H, S, A, 100 + i);
    const auto adv = random_policy(H, S, A, 200 + i);
    const double rho = 0.1 * (1 + i % 5);
    const double exact = evaluate_policy_pair_exact(m, pi, adv, rho).C(0, m.initial_state());
    const auto rep = rollout_perturbed(m, pi, PerturbationSpec::fixed(adv, rho), 100000, 300 + i);
    const double z = std::abs(rep.mean_return_normalized - exact) / rep.std_error;
    worst_z = std::max(worst_z, z);
    within += z <= 3.0;
  }
  return {within == 10, std::to_string(within) + "/10 instances within 3 standard errors at n=1e5 (max " +
                            num(worst_z) + " SE)"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    const Verdict v = fn();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::printf("criterion %d [%s] %s: %s (%.1fs)\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "oracle correctness", oracle_correctness);
  report(2, "rho=0 reduction", rho_zero_reduction);
  report(3, "certificate sandwich", sandwich);

  ConvergenceRun nominal, pilot;
  report(4, "certificate convergence", [&] {
    nominal = arrlc_convergence(kArrlcNominalK);
    pilot = arrlc_convergence(kConvergenceK);
    return certificate_convergence(nominal, pilot);
  });
  report(5, "sublinear regret", sublinear_regret);
  report(6, "AR-UCBH invariants", [&] { return ucbh_invariants(nominal, pilot); });
  report(7, "cliff robustness", cliff_robustness);
  report(8, "Monte Carlo vs exact", monte_carlo_vs_exact);

  std::printf("%d of 8 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
