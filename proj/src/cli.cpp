#include <CLI11.hpp>

#include "arl/experiment.hpp"
#include "arl/mdp_io.hpp"
#include "arl/planner.hpp"

namespace arl {

namespace {

// Flag values as parsed; only options that were given override the config.
struct Flags {
  std::string config_file;
  std::string env;
  int H = 0;
  std::string alg;
  int K = 0;
  double rho = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
  std::vector<std::string> perturb;
  int n = 0;
  std::string adversary;
  std::string policy;
  std::string policy_name;
  std::string out;
  std::vector<double> rhos;
};

struct Options {
  CLI::Option* env = nullptr;
  CLI::Option* H = nullptr;
  CLI::Option* alg = nullptr;
  CLI::Option* K = nullptr;
  CLI::Option* rho = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* seeds = nullptr;
  CLI::Option* jobs = nullptr;
  CLI::Option* perturb = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* adversary = nullptr;
  CLI::Option* policy = nullptr;
  CLI::Option* policy_name = nullptr;
  CLI::Option* out = nullptr;
};

void add_common(CLI::App* cmd, Flags& f, Options& o) {
  cmd->add_option("--config", f.config_file, "JSON config file; flags override it");
  o.env = cmd->add_option("--env", f.env,
                          "cliff | chain:n=..,slip=.. | random:S=..,A=..,seed=..");
  o.H = cmd->add_option("--H", f.H, "horizon (default: cliff 100, otherwise 5)");
  o.rho = cmd->add_option("--rho", f.rho, "adversary probability in [0,1]");
  o.out = cmd->add_option("--out", f.out, "output directory");
}

ExperimentConfig build_config(const Flags& f, const Options& o) {
  ExperimentConfig cfg;
  if (!f.config_file.empty()) {
    nlohmann::json j;
    try {
      j = read_json_file(f.config_file);
    } catch (const std::exception& e) {
      throw UsageError(std::string("cannot read config: ") + e.what());
    }
    cfg = config_from_json(j, cfg);
  }
  auto given = [](const CLI::Option* opt) { return opt && opt->count() > 0; };
  if (given(o.env)) cfg.env = f.env;
  if (given(o.H)) cfg.H = f.H;
  if (given(o.alg)) cfg.algorithm = parse_algorithm(f.alg);
  if (given(o.K)) cfg.K = f.K;
  if (given(o.rho)) cfg.rho = f.rho;
  if (given(o.delta)) cfg.delta = f.delta;
  if (given(o.seed)) cfg.seed = f.seed;
  if (given(o.seeds)) cfg.seeds = f.seeds;
  if (given(o.jobs)) cfg.jobs = f.jobs;
  if (given(o.n)) cfg.n_trajectories = f.n;
  if (given(o.adversary)) cfg.adversary = f.adversary;
  if (given(o.policy)) cfg.policy_file = f.policy;
  if (given(o.policy_name)) cfg.policy_name = f.policy_name;
  if (given(o.out)) cfg.output_dir = f.out;
  if (given(o.perturb)) {
    cfg.eval.clear();
    for (const auto& p : f.perturb) cfg.eval.push_back(parse_perturb_request(p));
  }
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Action-robust tabular RL laboratory"};
  app.require_subcommand(1);

  Flags f;
  Options solve_o, train_o, eval_o, dual_o;

  auto* solve = app.add_subcommand("solve", "exact robust solution to JSON");
  add_common(solve, f, solve_o);

  auto* train = app.add_subcommand("train", "run a learner, write per-episode CSV and pi_out");
  add_common(train, f, train_o);
  train_o.alg = train->add_option("--alg", f.alg, "arrlc | ar_ucbh | oracle");
  train_o.K = train->add_option("--K", f.K, "episodes");
  train_o.delta = train->add_option("--delta", f.delta, "confidence parameter");
  train_o.seed = train->add_option("--seed", f.seed, "master seed");
  train_o.seeds = train->add_option("--seeds", f.seeds, "several seeds, one run each")
                      ->delimiter(',');
  train_o.jobs = train->add_option("--jobs", f.jobs, "parallel runs");

  auto* evaluate = app.add_subcommand("evaluate", "perturbed Monte Carlo evaluation");
  add_common(evaluate, f, eval_o);
  eval_o.policy = evaluate->add_option("--policy", f.policy, "policy JSON");
  eval_o.policy_name = evaluate->add_option("--name", f.policy_name, "name in the CSV");
  eval_o.perturb = evaluate->add_option("--perturb", f.perturb,
                                        "fixed:p | random:p | none (repeatable)");
  eval_o.n = evaluate->add_option("--n", f.n, "trajectories per setting");
  eval_o.seed = evaluate->add_option("--seed", f.seed, "seed");
  eval_o.adversary = evaluate->add_option("--adversary", f.adversary,
                                          "auto | down | minimax | policy JSON");

  auto* duality = app.add_subcommand("duality-check", "max-min vs min-max by enumeration");
  duality->add_option("--config", f.config_file, "JSON config file; flags override it");
  dual_o.env = duality->add_option("--env", f.env, "environment spec");
  dual_o.H = duality->add_option("--H", f.H, "horizon");
  duality->add_option("--rho", f.rhos, "one or more rho values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) {
      cmd_solve(build_config(f, solve_o), out);
    } else if (*train) {
      cmd_train(build_config(f, train_o), out);
    } else if (*evaluate) {
      cmd_evaluate(build_config(f, eval_o), out);
    } else if (*duality) {
      std::vector<double> rhos = f.rhos.empty() ? std::vector<double>{0.0, 0.25, 0.5, 1.0}
                                                 : f.rhos;
      cmd_duality_check(build_config(f, dual_o), rhos, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const EnumerationTooLarge& e) {
    err << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace arl
