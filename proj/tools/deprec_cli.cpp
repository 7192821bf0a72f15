#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deprec/exact.hpp"
#include "deprec/io.hpp"
#include "deprec/lp.hpp"
#include "deprec/mdp.hpp"
#include "deprec/payoff.hpp"
#include "deprec/qlearn.hpp"
#include "deprec/scenarios.hpp"

namespace {

using namespace deprec;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_value(const std::string& s) {
  const auto slash = s.find('/');
  std::size_t used = 0;
  if (slash != std::string::npos) {
    const double num = std::stod(s.substr(0, slash), &used);
    const double den = std::stod(s.substr(slash + 1), &used);
    if (den == 0.0) throw UsageError("zero denominator in '" + s + "'");
    return num / den;
  }
  const double v = std::stod(s, &used);
  if (used != s.size()) throw UsageError("malformed number '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_value(item));
  return out;
}

Mdp load_input(const std::string& file, const std::string& scenario) {
  if (file.empty() == scenario.empty())
    throw UsageError("provide exactly one of an input file or --scenario");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot open '" + file + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mdp(buf.str());
  }
  const auto colon = scenario.find(':');
  const std::string kind = scenario.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : scenario.substr(colon + 1);
  if (kind == "car") {
    const auto v = parse_list(args);
    if (v.size() != 4)
      throw UsageError("--scenario car needs rho1,rho2,r1,r2");
    return build_car_dealership({v[0], v[1], v[2], v[3]});
  }
  if (kind == "cycle") {
    const auto v = parse_list(args);
    if (v.empty()) throw UsageError("--scenario cycle needs rewards");
    return build_periodic_chain(v);
  }
  throw UsageError("unknown scenario '" + kind + "'");
}

std::string fmt(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << content;
}

void print_values(const Mdp& mdp, const std::vector<double>& values,
                  const Policy& policy, int digits) {
  std::cout << "state value action\n";
  for (int s = 0; s < mdp.num_states(); ++s)
    std::cout << mdp.state_names[s] << " " << fmt(values[s], digits) << " "
              << mdp.action_names[s][policy.action_of[s]] << "\n";
}

Criterion parse_criterion(const std::string& name) {
  if (name == "discounted") return Criterion::discounted;
  if (name == "depreciating") return Criterion::discounted_depreciating;
  if (name == "average") return Criterion::average;
  if (name == "average-depreciating") return Criterion::average_depreciating;
  throw UsageError("unknown criterion '" + name + "'");
}

int cmd_validate(const std::string& file, const std::string& scenario) {
  const Mdp mdp = load_input(file, scenario);
  const auto report = validate_mdp(mdp);
  if (report.empty()) {
    std::cout << "valid: " << mdp.num_states() << " states\n";
    return kExitOk;
  }
  for (const auto& v : report) std::cout << v << "\n";
  return kExitValidation;
}

int cmd_solve(const Mdp& mdp, Criterion criterion, const DiscountSpec& spec,
              const std::string& method, double tol, LpVariant variant,
              const std::string& export_lp, int digits) {
  std::vector<double> values;
  Policy policy;
  if (criterion == Criterion::average ||
      criterion == Criterion::average_depreciating) {
    if (method == "brute") {
      auto [v, p] = brute_force_optimal(mdp, spec, criterion);
      values = v.values;
      policy = p;
    } else if (method == "vi") {
      if (criterion == Criterion::average) {
        auto avg = solve_average(mdp, tol);
        values.assign(mdp.num_states(), avg.gain);
        policy = avg.report.greedy_policy;
      } else {
        auto [v, report] = solve_average_depreciating(mdp, spec.gamma, tol);
        values = v.values;
        policy = report.greedy_policy;
      }
    } else {
      throw UsageError("method '" + method + "' supports discounted criteria only");
    }
  } else if (method == "vi") {
    if (criterion == Criterion::discounted) {
      auto [v, report] = value_iteration_discounted(mdp, spec.lambda, tol);
      values = v.values;
      policy = report.greedy_policy;
    } else {
      auto [v, report] = solve_discounted_depreciating(mdp, spec, tol);
      values = v.values;
      policy = report.greedy_policy;
    }
  } else if (method == "lp") {
    DiscountSpec lp_spec = spec;
    if (criterion == Criterion::discounted) lp_spec.gamma = 0.0;
    const std::vector<double> weights(mdp.num_states(), 1.0);
    const LpInstance primal = build_primal_lp(mdp, lp_spec, weights, variant);
    const LpInstance dual = build_dual_lp(mdp, lp_spec, weights);
    if (!export_lp.empty()) write_file(export_lp, serialize_lp(primal));
    const LpSolution primal_sol = simplex_solve(primal);
    if (primal_sol.status != LpStatus::optimal)
      throw SolverError("primal LP: " + lp_status_name(primal_sol.status));
    const LpSolution dual_sol = simplex_solve(dual);
    if (dual_sol.status != LpStatus::optimal)
      throw SolverError("dual LP: " + lp_status_name(dual_sol.status));
    values = primal_sol.point;
    policy = policy_from_dual(mdp, dual_sol);
  } else if (method == "brute") {
    auto [v, p] = brute_force_optimal(mdp, spec, criterion);
    values = v.values;
    policy = p;
  } else {
    throw UsageError("unknown method '" + method + "'");
  }
  print_values(mdp, values, policy, digits);
  return kExitOk;
}

int cmd_evaluate(const Mdp& mdp, const std::string& policy_str,
                 Criterion criterion, const DiscountSpec& spec, int digits) {
  Policy policy{std::vector<int>(mdp.num_states(), -1)};
  std::stringstream ss(policy_str);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    const auto eq = pair.find(':');
    if (eq == std::string::npos)
      throw UsageError("policy entries look like state:action");
    const int s = mdp.state_index(pair.substr(0, eq));
    if (s < 0) throw UsageError("unknown state in --policy");
    const int a = mdp.action_index(s, pair.substr(eq + 1));
    if (a < 0) throw UsageError("unknown action in --policy");
    policy.action_of[s] = a;
  }
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (policy.action_of[s] >= 0) continue;
    if (mdp.num_actions(s) == 1)
      policy.action_of[s] = 0;  // single-action states need no mention
    else
      throw UsageError("--policy misses state " + mdp.state_names[s]);
  }
  const ValueVector v = policy_evaluation(mdp, policy, spec, criterion);
  print_values(mdp, v.values, policy, digits);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver toolkit for MDPs with depreciating assets"};
  app.require_subcommand(1);

  std::string file, scenario;
  double lambda = 0.5, gamma = 0.5, tol = 1e-9;
  int digits = 9;
  std::uint64_t seed = 0;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("input", file, "MDP document file");
    cmd->add_option("--scenario", scenario,
                    "built-in scenario: car:rho1,rho2,r1,r2 | cycle:r1,r2,...");
    cmd->add_option("--digits", digits, "significant digits in output");
  };

  auto* validate = app.add_subcommand("validate", "check an MDP document");
  add_input(validate);

  auto* solve = app.add_subcommand("solve", "optimal values and greedy policy");
  add_input(solve);
  std::string criterion_str = "depreciating", method = "vi";
  std::string lp_variant_str = "corrected", export_lp;
  solve->add_option("--lambda", lambda, "future-discount factor");
  solve->add_option("--gamma", gamma, "depreciation factor");
  solve->add_option("--criterion", criterion_str,
                    "discounted|depreciating|average|average-depreciating");
  solve->add_option("--method", method, "vi|lp|brute");
  solve->add_option("--tol", tol, "solver tolerance");
  solve->add_option("--lp-variant", lp_variant_str,
                    "corrected|paper (paper variant shown for comparison only)");
  solve->add_option("--export-lp", export_lp, "write the primal LP as text");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a fixed policy");
  add_input(evaluate);
  std::string policy_str;
  evaluate->add_option("--lambda", lambda, "future-discount factor");
  evaluate->add_option("--gamma", gamma, "depreciation factor");
  evaluate->add_option("--criterion", criterion_str, "discounted|depreciating");
  evaluate->add_option("--policy", policy_str,
                       "comma-separated state:action pairs")
      ->required();

  auto* qlearn = app.add_subcommand("qlearn", "tabular depreciating Q-learning");
  add_input(qlearn);
  long steps = 2000000;
  std::string alpha_kind = "harmonic", alpha_counting = "visit";
  double alpha_c = 1.0, alpha_n0 = 0.0, alpha_p = 1.0;
  double eps0 = 1.0, eps_decay = 0.999999, eps_min = 0.05;
  bool optimistic = false;
  std::string out_csv;
  qlearn->add_option("--lambda", lambda, "future-discount factor");
  qlearn->add_option("--gamma", gamma, "depreciation factor");
  qlearn->add_option("--steps", steps, "interaction steps");
  qlearn->add_option("--seed", seed, "rng seed");
  qlearn->add_option("--alpha-kind", alpha_kind, "harmonic|polynomial");
  qlearn->add_option("--alpha-c", alpha_c, "learning rate numerator");
  qlearn->add_option("--alpha-n0", alpha_n0, "learning rate offset");
  qlearn->add_option("--alpha-p", alpha_p, "polynomial exponent");
  qlearn->add_option("--alpha-counting", alpha_counting, "visit|global");
  qlearn->add_option("--eps0", eps0, "initial exploration rate");
  qlearn->add_option("--eps-decay", eps_decay, "exploration decay per step");
  qlearn->add_option("--eps-min", eps_min, "exploration floor (> 0)");
  qlearn->add_flag("--optimistic", optimistic, "optimistic initialization");
  qlearn->add_option("--out", out_csv, "write the trace CSV here");

  auto* sweep = app.add_subcommand("sweep", "value across a gamma grid");
  add_input(sweep);
  double gamma_min = 0.01, gamma_max = 0.99;
  int points = 99;
  std::string sweep_csv_path = "sweep.csv", sweep_svg_path;
  sweep->add_option("--lambda", lambda, "future-discount factor");
  sweep->add_option("--gamma-min", gamma_min, "grid start");
  sweep->add_option("--gamma-max", gamma_max, "grid end");
  sweep->add_option("--points", points, "grid size");
  sweep->add_option("--tol", tol, "solver tolerance");
  sweep->add_option("--out", sweep_csv_path, "CSV output path");
  sweep->add_option("--svg", sweep_svg_path, "SVG output path");

  auto* tauberian = app.add_subcommand("tauberian", "(1-lambda)V over a lambda grid");
  add_input(tauberian);
  std::string grid_str = "0.9,0.99,0.999,0.9999";
  tauberian->add_option("--gamma", gamma, "depreciation factor");
  tauberian->add_option("--grid", grid_str, "comma-separated lambda grid");
  tauberian->add_option("--tol", tol, "solver tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(file, scenario);

    const Mdp mdp = load_input(file, scenario);
    const auto violations = validate_mdp(mdp);
    if (!violations.empty()) {
      for (const auto& v : violations) std::cerr << v << "\n";
      return kExitValidation;
    }
    const DiscountSpec spec{lambda, gamma};

    if (solve->parsed()) {
      const LpVariant variant = lp_variant_str == "paper"
                                    ? LpVariant::paper
                                    : LpVariant::corrected;
      if (lp_variant_str != "paper" && lp_variant_str != "corrected")
        throw UsageError("unknown --lp-variant '" + lp_variant_str + "'");
      return cmd_solve(mdp, parse_criterion(criterion_str), spec, method, tol,
                       variant, export_lp, digits);
    }

    if (evaluate->parsed())
      return cmd_evaluate(mdp, policy_str, parse_criterion(criterion_str),
                          spec, digits);

    if (qlearn->parsed()) {
      LearningRateSchedule lr;
      const auto counting = alpha_counting == "global"
                                ? LearningRateSchedule::Counting::global_step
                                : LearningRateSchedule::Counting::per_visit;
      if (alpha_kind == "harmonic")
        lr = LearningRateSchedule::harmonic(alpha_c, alpha_n0, counting);
      else if (alpha_kind == "polynomial")
        lr = LearningRateSchedule::polynomial(alpha_c, alpha_n0, alpha_p, counting);
      else
        throw UsageError("unknown --alpha-kind '" + alpha_kind + "'");
      const ExplorationSchedule explore{eps0, eps_decay, eps_min};

      auto [exact_v, solve_report] = solve_discounted_depreciating(mdp, spec, 1e-10);
      (void)solve_report;
      const QTable reference = exact_q_table(mdp, spec, exact_v);
      std::optional<double> init;
      if (optimistic)
        init = mdp.max_reward() /
               ((1.0 - spec.lambda) * (1.0 - spec.lambda * spec.gamma));
      auto [table, report] =
          run_q_learning(mdp, spec, lr, explore, steps,
                         RngState{seed, 0}, &reference, init);
      if (!report.communicating)
        std::cerr << "warning: MDP is not communicating under random actions\n";
      std::cout << "steps " << report.steps << "\n";
      std::cout << "sup_gap " << fmt(report.final_gap, digits) << "\n";
      std::cout << "state action q\n";
      for (int s = 0; s < mdp.num_states(); ++s)
        std::cout << mdp.state_names[s] << " "
                  << mdp.action_names[s][report.greedy.action_of[s]] << " "
                  << fmt(table.q[s][report.greedy.action_of[s]], digits) << "\n";
      if (!out_csv.empty()) write_file(out_csv, qlearn_trace_csv(report));
      return kExitOk;
    }

    if (sweep->parsed()) {
      if (points < 1) throw UsageError("--points must be >= 1");
      std::vector<SweepRow> rows;
      for (int i = 0; i < points; ++i) {
        const double g = points == 1 ? gamma_min
                                     : gamma_min + (gamma_max - gamma_min) * i /
                                                       (points - 1);
        auto [v, report] =
            solve_discounted_depreciating(mdp, DiscountSpec{lambda, g}, tol);
        (void)report;
        rows.push_back({g, v.values});
      }
      write_file(sweep_csv_path, write_sweep_csv(rows, mdp.state_names));
      const std::string svg_path = sweep_svg_path.empty()
                                       ? sweep_csv_path + ".svg"
                                       : sweep_svg_path;
      write_file(svg_path, sweep_svg(rows, mdp.state_names));
      std::cout << "wrote " << sweep_csv_path << " and " << svg_path << "\n";
      return kExitOk;
    }

    if (tauberian->parsed()) {
      const auto grid = parse_list(grid_str);
      const auto table = tauberian_probe(mdp, gamma, grid, tol);
      std::cout << "lambda";
      for (const auto& name : mdp.state_names) std::cout << " " << name;
      std::cout << " gap\n";
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        std::cout << fmt(table.rows[i].lambda, digits);
        for (double v : table.rows[i].scaled_values)
          std::cout << " " << fmt(v, digits);
        std::cout << " " << fmt(table.gaps[i], digits) << "\n";
      }
      std::cout << "reference";
      for (double v : table.reference) std::cout << " " << fmt(v, digits);
      std::cout << "\n";
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    for (const auto& v : e.report) std::cerr << v << "\n";
    return kExitValidation;
  } catch (const MultichainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitUsage;
}
