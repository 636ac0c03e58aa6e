#include "arl/evaluation.hpp"

#include <charconv>
#include <cmath>

namespace arl {

std::string to_string(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::kNone: return "none";
    case PerturbKind::kUniformRandom: return "random";
    case PerturbKind::kFixedPolicy: return "fixed";
  }
  return "unknown";
}

namespace {

void check_spec(const TabularMDP& mdp, const DeterministicPolicy& policy,
                const PerturbationSpec& spec, int n) {
  check_policy_dims(mdp, policy);
  if (n < 1) throw std::invalid_argument("need at least one trajectory");
  if (!(spec.p >= 0.0 && spec.p <= 1.0))
    throw std::invalid_argument("perturbation probability must lie in [0,1]");
  if (spec.kind == PerturbKind::kFixedPolicy) {
    if (!spec.adversary) throw std::invalid_argument("fixed perturbation needs an adversary");
    check_policy_dims(mdp, *spec.adversary);
  }
}

double run_trajectory(const TabularMDP& mdp, const DeterministicPolicy& policy,
                      const PerturbationSpec& spec, Rng& perturb, Rng& env) {
  double ret = 0.0;
  int s = mdp.initial_state();
  for (int h = 0; h < mdp.horizon(); ++h) {
    int a = policy(h, s);
    if (spec.kind != PerturbKind::kNone && perturb.bernoulli(spec.p)) {
      a = spec.kind == PerturbKind::kFixedPolicy ? (*spec.adversary)(h, s)
                                                 : perturb.uniform_int(mdp.num_actions());
    }
    const auto out = sample_step(mdp, h, s, a, env);
    ret += out.reward;
    s = out.next_state;
  }
  return ret;
}

EvaluationReport summarize(std::vector<double> returns, int horizon,
                           const std::optional<RewardScale>& scale) {
  EvaluationReport rep;
  const int n = static_cast<int>(returns.size());
  rep.n_trajectories = n;
  // shifted by the first return so identical returns give exactly zero spread
  const double ref = returns.front();
  double sum = 0.0;
  for (double r : returns) sum += r - ref;
  rep.mean_return_normalized = ref + sum / n;
  double ss = 0.0;
  for (double r : returns) ss += (r - rep.mean_return_normalized) * (r - rep.mean_return_normalized);
  rep.std_error = n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
  const RewardScale sc = scale.value_or(RewardScale{});
  rep.mean_return_raw = sc.scale * rep.mean_return_normalized + horizon * sc.offset;
  rep.std_error_raw = sc.scale * rep.std_error;
  rep.per_trajectory_returns = std::move(returns);
  return rep;
}

}  // namespace

EvaluationReport rollout_perturbed(const TabularMDP& mdp,
                                   const DeterministicPolicy& policy,
                                   const PerturbationSpec& spec, int n_trajectories,
                                   std::uint64_t seed, std::optional<RewardScale> scale) {
  check_spec(mdp, policy, spec, n_trajectories);
  const Rng perturb_root = Rng::derive(seed, "perturb");
  const Rng env_root = Rng::derive(seed, "env");
  std::vector<double> returns(n_trajectories);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_trajectories; ++i) {
    Rng perturb = perturb_root.split(i);
    Rng env = env_root.split(i);
    returns[i] = run_trajectory(mdp, policy, spec, perturb, env);
  }
  return summarize(std::move(returns), mdp.horizon(), scale);
}

namespace serial {

EvaluationReport rollout_perturbed(const TabularMDP& mdp,
                                   const DeterministicPolicy& policy,
                                   const PerturbationSpec& spec, int n_trajectories,
                                   std::uint64_t seed, std::optional<RewardScale> scale) {
  check_spec(mdp, policy, spec, n_trajectories);
  const Rng perturb_root = Rng::derive(seed, "perturb");
  const Rng env_root = Rng::derive(seed, "env");
  std::vector<double> returns;
  returns.reserve(n_trajectories);
  for (int i = 0; i < n_trajectories; ++i) {
    Rng perturb = perturb_root.split(i);
    Rng env = env_root.split(i);
    returns.push_back(run_trajectory(mdp, policy, spec, perturb, env));
  }
  return summarize(std::move(returns), mdp.horizon(), scale);
}

}  // namespace serial

RegretTracker::RegretTracker(const TabularMDP& mdp, double rho, Thinning thinning)
    : mdp_(mdp),
      rho_(rho),
      solution_(solve_robust_optimal(mdp, rho)),
      v_star_(solution_.V_star(0, mdp.initial_state())) {
  const long entries =
      static_cast<long>(mdp.num_states()) * mdp.num_actions() * mdp.horizon();
  thin_ = thinning == Thinning::kOn ||
          (thinning == Thinning::kAuto && entries > kThinningThreshold);
}

RegretRecord RegretTracker::record(int episode, const DeterministicPolicy& policy) {
  const bool due = !thin_ || !last_policy_ || (episode - 1) % 10 == 0;
  if (due && (!last_policy_ || !(policy == *last_policy_))) {
    last_value_ = evaluate_robust_policy(mdp_, policy, rho_).V_pi(0, mdp_.initial_state());
    last_policy_ = policy;
  }
  RegretRecord rec{episode, v_star_, last_value_, v_star_ - last_value_, 0.0};
  cumulative_ += rec.increment;
  rec.cumulative = cumulative_;
  return rec;
}

std::vector<RegretRecord> compute_regret_curve(
    const TabularMDP& mdp, double rho,
    std::span<const DeterministicPolicy> per_episode_policies) {
  RegretTracker tracker(mdp, rho);
  std::vector<RegretRecord> out;
  out.reserve(per_episode_policies.size());
  int k = 0;
  for (const auto& pi : per_episode_policies) out.push_back(tracker.record(++k, pi));
  return out;
}

SandwichAudit sandwich_audit(const TabularMDP& mdp, double rho,
                             std::span<const Certificate> certificates,
                             std::span<const DeterministicPolicy> per_episode_policies) {
  ARL_CHECK(certificates.size() == per_episode_policies.size(),
            "one policy per certificate");
  RegretTracker tracker(mdp, rho, RegretTracker::Thinning::kOff);
  SandwichAudit audit;
  for (std::size_t k = 0; k < certificates.size(); ++k) {
    const auto rec = tracker.record(static_cast<int>(k + 1), per_episode_policies[k]);
    ++audit.episodes;
    if (sandwich_violated(certificates[k], rec.v_pi_bar, rec.v_star)) ++audit.violations;
  }
  return audit;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

EpisodeCsvWriter::EpisodeCsvWriter(std::ostream& out, std::uint64_t seed)
    : out_(out), seed_(seed) {
  out_ << kHeader << '\n' << std::flush;
}

void EpisodeCsvWriter::write(const Certificate& cert, double best_width,
                             const std::optional<RegretRecord>& regret) {
  out_ << cert.episode << ',' << format_double(cert.lower) << ','
       << format_double(cert.upper) << ',' << format_double(cert.epsilon) << ','
       << format_double(best_width) << ',';
  if (regret) {
    out_ << format_double(regret->v_pi_bar) << ',' << format_double(regret->increment)
         << ',' << format_double(regret->cumulative);
  } else {
    out_ << ",,";
  }
  out_ << ',' << seed_ << '\n' << std::flush;
}

void write_evaluation_csv_header(std::ostream& out) {
  out << "policy_name,perturb_kind,p,n,mean_raw,mean_norm,stderr\n";
}

void write_evaluation_csv_row(std::ostream& out, const std::string& policy_name,
                              const PerturbationSpec& spec,
                              const EvaluationReport& report) {
  out << policy_name << ',' << to_string(spec.kind) << ',' << format_double(spec.p)
      << ',' << report.n_trajectories << ',' << format_double(report.mean_return_raw)
      << ',' << format_double(report.mean_return_normalized) << ','
      << format_double(report.std_error) << '\n';
}

}  // namespace arl
