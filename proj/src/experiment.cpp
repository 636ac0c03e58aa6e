#include "arl/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <stdexcept>

#include "arl/arrlc.hpp"
#include "arl/mdp_io.hpp"
#include "arl/planner.hpp"
#include "arl/ucbh.hpp"

namespace arl {

namespace fs = std::filesystem;
using nlohmann::json;

Algorithm parse_algorithm(const std::string& name) {
  if (name == "arrlc") return Algorithm::kArrlc;
  if (name == "ar_ucbh") return Algorithm::kArUcbh;
  if (name == "oracle") return Algorithm::kOracle;
  throw UsageError("unknown algorithm '" + name + "' (expected arrlc, ar_ucbh, oracle)");
}

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::kArrlc: return "arrlc";
    case Algorithm::kArUcbh: return "ar_ucbh";
    case Algorithm::kOracle: return "oracle";
  }
  return "unknown";
}

PerturbRequest parse_perturb_request(const std::string& text) {
  if (text == "none") return {PerturbKind::kNone, 0.0};
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw UsageError("perturbation '" + text + "' must look like fixed:0.2 or random:0.1");
  const std::string kind = text.substr(0, colon);
  PerturbRequest req;
  if (kind == "fixed")
    req.kind = PerturbKind::kFixedPolicy;
  else if (kind == "random")
    req.kind = PerturbKind::kUniformRandom;
  else if (kind == "none")
    req.kind = PerturbKind::kNone;
  else
    throw UsageError("unknown perturbation kind '" + kind + "'");
  try {
    std::size_t used = 0;
    req.p = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("bad perturbation probability in '" + text + "'");
  }
  if (!(req.p >= 0.0 && req.p <= 1.0))
    throw UsageError("perturbation probability must lie in [0,1]");
  return req;
}

int ExperimentConfig::horizon() const {
  if (H > 0) return H;
  return env.rfind("cliff", 0) == 0 ? 100 : 5;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig cfg) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "env") cfg.env = value.get<std::string>();
      else if (key == "H") cfg.H = value.get<int>();
      else if (key == "alg") cfg.algorithm = parse_algorithm(value.get<std::string>());
      else if (key == "K") cfg.K = value.get<int>();
      else if (key == "rho") cfg.rho = value.get<double>();
      else if (key == "delta") cfg.delta = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "seeds") cfg.seeds = value.get<std::vector<std::uint64_t>>();
      else if (key == "jobs") cfg.jobs = value.get<int>();
      else if (key == "n") cfg.n_trajectories = value.get<int>();
      else if (key == "adversary") cfg.adversary = value.get<std::string>();
      else if (key == "policy") cfg.policy_file = value.get<std::string>();
      else if (key == "policy_name") cfg.policy_name = value.get<std::string>();
      else if (key == "out") cfg.output_dir = value.get<std::string>();
      else if (key == "perturb") {
        cfg.eval.clear();
        for (const auto& p : value) cfg.eval.push_back(parse_perturb_request(p.get<std::string>()));
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
  return cfg;
}

namespace {

Environment build_env(const ExperimentConfig& cfg) {
  try {
    return make_environment(cfg.env, cfg.horizon());
  } catch (const EnvSpecError& e) {
    throw UsageError(e.what());
  } catch (const std::bad_alloc&) {
    throw ResourceError("not enough memory for environment '" + cfg.env + "'");
  } catch (const std::length_error&) {
    throw ResourceError("environment '" + cfg.env + "' is too large");
  }
}

bool oracle_tractable(const TabularMDP& mdp) {
  const double entries = static_cast<double>(mdp.num_states()) * mdp.num_states() *
                         mdp.num_actions() * mdp.horizon();
  return entries <= kMaxOracleEntries;
}

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw UsageError("--rho must lie in [0,1]");
}

fs::path ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

TrainSummary train_one(const Environment& env, const ExperimentConfig& cfg,
                       std::uint64_t seed, const fs::path& dir) {
  ensure_dir(dir);
  TrainSummary summary{seed, (dir / "episodes.csv").string(),
                       (dir / "pi_out.json").string(), 0.0, std::nullopt};
  const TabularMDP& mdp = env.mdp;

  if (cfg.algorithm == Algorithm::kOracle) {
    if (!oracle_tractable(mdp)) throw ResourceError("instance too large for the oracle");
    const auto sol = solve_robust_optimal(mdp, cfg.rho);
    write_json_file(summary.policy_path, policy_document(sol.pi_star, cfg, seed));
    summary.csv_path.clear();
    return summary;
  }

  const LearnerConfig lc{cfg.K, cfg.rho, cfg.delta};
  try {
    lc.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::optional<RegretTracker> tracker;
  if (oracle_tractable(mdp)) tracker.emplace(mdp, cfg.rho);

  std::ofstream csv(summary.csv_path);
  if (!csv) throw std::runtime_error("cannot write " + summary.csv_path);
  EpisodeCsvWriter writer(csv, seed);

  RunOptions options;
  options.keep_trajectories = false;
  options.on_episode = [&](const EpisodeView& view) {
    std::optional<RegretRecord> rec;
    if (tracker) rec = tracker->record(view.episode, view.policy);
    writer.write(view.certificate, view.best_width, rec);
  };
  const RunResult result = cfg.algorithm == Algorithm::kArrlc
                               ? run_arrlc(mdp, lc, seed, options)
                               : run_ucbh(mdp, lc, seed, options);
  write_json_file(summary.policy_path, policy_document(result.pi_out, cfg, seed));
  summary.final_best_width = result.log.back().best_width;
  if (tracker) summary.cumulative_regret = tracker->cumulative();
  return summary;
}

DeterministicPolicy resolve_adversary(const ExperimentConfig& cfg, const Environment& env) {
  const std::string& which = cfg.adversary;
  if (which == "auto" || which == "down") {
    if (env.fixed_adversary) return *env.fixed_adversary;
    if (which == "down") throw UsageError("adversary 'down' is only defined for cliff");
  }
  if (which == "auto" || which == "minimax") {
    if (!oracle_tractable(env.mdp)) throw ResourceError("instance too large for the oracle");
    return solve_robust_optimal(env.mdp, cfg.rho).pi_minus;
  }
  auto pi = load_policy(which);
  try {
    check_policy_dims(env.mdp, pi);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("adversary ") + e.what());
  }
  return pi;
}

}  // namespace

json policy_document(const DeterministicPolicy& pi, const ExperimentConfig& cfg,
                     std::uint64_t seed) {
  return {{"env", cfg.env},
          {"H", pi.horizon()},
          {"S", pi.num_states()},
          {"algorithm", to_string(cfg.algorithm)},
          {"rho", cfg.rho},
          {"K", cfg.K},
          {"seed", seed},
          {"actions", policy_to_json(pi)}};
}

DeterministicPolicy load_policy(const std::string& path) {
  json doc;
  try {
    doc = read_json_file(path);
  } catch (const std::exception& e) {
    throw UsageError("cannot load policy: " + std::string(e.what()));
  }
  try {
    if (doc.is_array()) return policy_from_json(doc);
    if (doc.contains("actions")) return policy_from_json(doc.at("actions"));
    if (doc.contains("pi_star")) return policy_from_json(doc.at("pi_star"));
  } catch (const std::exception& e) {
    throw UsageError("malformed policy in " + path + ": " + e.what());
  }
  throw UsageError(path + " holds no 'actions' or 'pi_star' table");
}

SolveSummary cmd_solve(const ExperimentConfig& cfg, std::ostream& log) {
  check_rho(cfg.rho);
  const Environment env = build_env(cfg);
  if (!oracle_tractable(env.mdp))
    throw ResourceError("instance too large for the oracle (S*S*A*H > 2e8)");
  const auto sol = solve_robust_optimal(env.mdp, cfg.rho);
  const fs::path dir = ensure_dir(cfg.output_dir);
  const std::string path = (dir / "solution.json").string();
  json doc = solution_to_json(sol);
  doc["env"] = cfg.env;
  doc["H"] = env.mdp.horizon();
  write_json_file(path, doc);

  SolveSummary summary{sol.V_star(0, env.mdp.initial_state()), std::nullopt, path};
  log << "V*_1(s1) = " << format_double(summary.v_star);
  if (env.scale) {
    summary.v_star_raw = env.scale->scale * summary.v_star + env.mdp.horizon() * env.scale->offset;
    log << " (raw " << format_double(*summary.v_star_raw) << ")";
  }
  log << " rho=" << format_double(cfg.rho) << " -> " << path << '\n';
  return summary;
}

std::vector<TrainSummary> cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  check_rho(cfg.rho);
  std::vector<std::uint64_t> seeds = cfg.seeds;
  if (seeds.empty()) {
    if (!cfg.seed) throw UsageError("train requires --seed");
    seeds.push_back(*cfg.seed);
  }
  if (cfg.jobs < 1) throw UsageError("--jobs must be positive");
  const Environment env = build_env(cfg);
  const fs::path root = cfg.output_dir;
  const bool fan_out = cfg.seeds.size() > 0;

  std::vector<TrainSummary> summaries(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const int n = static_cast<int>(seeds.size());
#pragma omp parallel for num_threads(cfg.jobs) schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const fs::path dir = fan_out ? root / ("seed_" + std::to_string(seeds[i])) : root;
    try {
      summaries[i] = train_one(env, cfg, seeds[i], dir);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& s : summaries) {
    log << to_string(cfg.algorithm) << " seed=" << s.seed;
    if (!s.csv_path.empty()) log << " Delta=" << format_double(s.final_best_width);
    if (s.cumulative_regret) log << " regret=" << format_double(*s.cumulative_regret);
    log << " -> " << s.policy_path << '\n';
  }
  return summaries;
}

std::vector<EvaluateRow> cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log) {
  check_rho(cfg.rho);
  if (cfg.policy_file.empty()) throw UsageError("evaluate requires --policy");
  if (cfg.n_trajectories < 1) throw UsageError("--n must be positive");
  const Environment env = build_env(cfg);
  const DeterministicPolicy pi = load_policy(cfg.policy_file);
  if (pi.horizon() != env.mdp.horizon() || pi.num_states() != env.mdp.num_states()) {
    std::ostringstream os;
    os << "policy dims mismatch: expected H=" << env.mdp.horizon()
       << " S=" << env.mdp.num_states() << ", found H=" << pi.horizon()
       << " S=" << pi.num_states();
    throw UsageError(os.str());
  }
  try {
    check_policy_dims(env.mdp, pi);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::vector<PerturbRequest> requests = cfg.eval;
  if (requests.empty())
    requests = {{PerturbKind::kFixedPolicy, 0.1}, {PerturbKind::kFixedPolicy, 0.2},
                {PerturbKind::kUniformRandom, 0.1}, {PerturbKind::kUniformRandom, 0.2}};

  std::optional<DeterministicPolicy> adversary;
  const std::uint64_t seed = cfg.seed.value_or(0);
  const std::string name = cfg.policy_name.empty()
                               ? fs::path(cfg.policy_file).stem().string()
                               : cfg.policy_name;
  const fs::path dir = ensure_dir(cfg.output_dir);
  const std::string path = (dir / "evaluation.csv").string();
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot write " + path);
  write_evaluation_csv_header(csv);

  std::vector<EvaluateRow> rows;
  for (const auto& req : requests) {
    PerturbationSpec spec{req.kind, req.p, std::nullopt};
    if (req.kind == PerturbKind::kFixedPolicy) {
      if (!adversary) adversary = resolve_adversary(cfg, env);
      spec.adversary = *adversary;
    }
    auto report = rollout_perturbed(env.mdp, pi, spec, cfg.n_trajectories, seed, env.scale);
    write_evaluation_csv_row(csv, name, spec, report);
    log << name << ' ' << to_string(spec.kind) << " p=" << format_double(spec.p)
        << " n=" << report.n_trajectories
        << " mean_raw=" << format_double(report.mean_return_raw)
        << " mean_norm=" << format_double(report.mean_return_normalized)
        << " stderr=" << format_double(report.std_error) << '\n';
    rows.push_back({std::move(spec), std::move(report)});
  }
  return rows;
}

std::vector<DualityRow> cmd_duality_check(const ExperimentConfig& cfg,
                                          const std::vector<double>& rhos,
                                          std::ostream& log) {
  const Environment env = build_env(cfg);
  std::vector<DualityRow> rows;
  for (double rho : rhos) {
    check_rho(rho);
    DualityReport rep;
    try {
      rep = verify_perfect_duality(env.mdp, rho);
    } catch (const EnumerationTooLarge& e) {
      throw ResourceError(e.what());
    }
    log << "rho=" << format_double(rho) << " max_min=" << format_double(rep.max_min)
        << " min_max=" << format_double(rep.min_max) << " gap=" << format_double(rep.gap)
        << '\n';
    rows.push_back({rho, rep});
  }
  return rows;
}

}  // namespace arl
