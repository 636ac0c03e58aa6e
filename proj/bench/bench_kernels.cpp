// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "arl/arrlc.hpp"
#include "arl/environments.hpp"
#include "arl/evaluation.hpp"
#include "arl/planner.hpp"

using namespace arl;

namespace {

const TabularMDP& big_random() {
  static const TabularMDP m = build_random_mdp(200, 4, 20, 0.1, 1);
  return m;
}

const CliffWalking& cliff() {
  static const CliffWalking cw = build_cliff_walking(100);
  return cw;
}

void BM_SolveParallel(benchmark::State& st) {
  big_random();
  for (auto _ : st) benchmark::DoNotOptimize(solve_robust_optimal(big_random(), 0.2));
}
BENCHMARK(BM_SolveParallel)->Unit(benchmark::kMillisecond);

void BM_SolveSerial(benchmark::State& st) {
  big_random();
  for (auto _ : st) benchmark::DoNotOptimize(serial::solve_robust_optimal(big_random(), 0.2));
}
BENCHMARK(BM_SolveSerial)->Unit(benchmark::kMillisecond);

void BM_PairEvaluationParallel(benchmark::State& st) {
  const auto& m = big_random();
  const DeterministicPolicy a(m.horizon(), m.num_states(), 0), b(m.horizon(), m.num_states(), 1);
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_policy_pair_exact(m, a, b, 0.2));
}
BENCHMARK(BM_PairEvaluationParallel)->Unit(benchmark::kMillisecond);

void BM_PairEvaluationSerial(benchmark::State& st) {
  const auto& m = big_random();
  const DeterministicPolicy a(m.horizon(), m.num_states(), 0), b(m.horizon(), m.num_states(), 1);
  for (auto _ : st) benchmark::DoNotOptimize(serial::evaluate_policy_pair_exact(m, a, b, 0.2));
}
BENCHMARK(BM_PairEvaluationSerial)->Unit(benchmark::kMillisecond);

void BM_RolloutParallel(benchmark::State& st) {
  const auto& cw = cliff();
  const auto pi = solve_robust_optimal(cw.mdp, 0.0).pi_star;
  const auto spec = PerturbationSpec::fixed(build_fixed_adversary_cliff(100), 0.2);
  for (auto _ : st)
    benchmark::DoNotOptimize(rollout_perturbed(cw.mdp, pi, spec, static_cast<int>(st.range(0)), 1, cw.scale));
}
BENCHMARK(BM_RolloutParallel)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RolloutSerial(benchmark::State& st) {
  const auto& cw = cliff();
  const auto pi = solve_robust_optimal(cw.mdp, 0.0).pi_star;
  const auto spec = PerturbationSpec::fixed(build_fixed_adversary_cliff(100), 0.2);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        serial::rollout_perturbed(cw.mdp, pi, spec, static_cast<int>(st.range(0)), 1, cw.scale));
}
BENCHMARK(BM_RolloutSerial)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_MinimaxParallel(benchmark::State& st) {
  const auto m = build_random_mdp(3, 2, 6, 1.0, 5);  // 2^18 agent policies
  for (auto _ : st) benchmark::DoNotOptimize(brute_force_minimax(m, 0.3));
}
BENCHMARK(BM_MinimaxParallel)->Unit(benchmark::kMillisecond);

void BM_MinimaxSerial(benchmark::State& st) {
  const auto m = build_random_mdp(3, 2, 6, 1.0, 5);
  for (auto _ : st) benchmark::DoNotOptimize(serial::brute_force_minimax(m, 0.3));
}
BENCHMARK(BM_MinimaxSerial)->Unit(benchmark::kMillisecond);

void BM_ArrlcEpisodes(benchmark::State& st) {
  const auto m = build_random_mdp(5, 3, 5, 1.0, 2024);
  LearnerConfig c;
  c.K = static_cast<int>(st.range(0));
  c.rho = 0.2;
  RunOptions opt;
  opt.keep_trajectories = false;
  for (auto _ : st) benchmark::DoNotOptimize(run_arrlc(m, c, 1, opt));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_ArrlcEpisodes)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
