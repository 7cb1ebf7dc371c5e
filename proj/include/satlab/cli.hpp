#pragma once

// Command-line front end.
//
//   satlab gen     --dist {uniform|planted|rplus} --n --k --m --seed [--out]
//   satlab solve   {--ppz|--sampling|--oracle|--auto} [--trials] [--seed] <cnf>
//   satlab analyze <cnf with planted certificate>
//   satlab exp     --config <file> [--out override]
//
// Exit codes follow SAT-competition convention: 10 = satisfying assignment
// found, 20 = exhaustive oracle proved unsatisfiable, 0 = completed without
// a certificate (NotFound / analysis / generation), 1 = usage or I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "dimacs.hpp"
#include "distributions.hpp"
#include "experiments.hpp"
#include "oracle.hpp"
#include "rng.hpp"
#include "solvers.hpp"

namespace satlab {

namespace cli_detail {

inline int fail(std::ostream& err, const std::string& msg) {
  err << "satlab: error: " << msg << "\n";
  return 1;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
}

inline void print_model(std::ostream& os, const Assignment& a) {
  os << "s SATISFIABLE\nv";
  for (std::uint32_t v = 1; v <= a.n(); ++v) os << ' ' << (a.get(v) ? "" : "-") << v;
  os << " 0\n";
}

}  // namespace cli_detail

inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"satlab: random and planted k-SAT laboratory"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance as DIMACS CNF");
  std::string gen_dist = "uniform";
  std::uint32_t gen_n = 0, gen_k = 0, gen_m = 0, gen_attempts = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--dist", gen_dist, "uniform | planted | rplus")
      ->check(CLI::IsMember({"uniform", "planted", "rplus"}));
  gen->add_option("--n", gen_n, "variable count")->required();
  gen->add_option("--k", gen_k, "clause width")->required();
  gen->add_option("--m", gen_m, "clause count")->required();
  gen->add_option("--seed", gen_seed, "master seed")->required();
  gen->add_option("--max-attempts", gen_attempts, "rplus rejection budget");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "solve a DIMACS CNF instance");
  bool use_ppz = false, use_sampling = false, use_oracle = false, use_auto = false;
  std::uint64_t solve_trials = 0, solve_seed = 0;
  double opt_gamma = BudgetPolicy{}.gamma, opt_pf = BudgetPolicy{}.poly_factor,
         opt_tail = BudgetPolicy{}.tail;
  std::uint64_t opt_cap = BudgetPolicy{}.cap;
  std::string solve_in;
  solve->add_flag("--ppz", use_ppz, "repeated Simple-PPZ");
  solve->add_flag("--sampling", use_sampling, "uniform assignment sampling");
  solve->add_flag("--oracle", use_oracle, "exhaustive oracle (n <= 30)");
  solve->add_flag("--auto", use_auto, "budgeted sampling/PPZ dispatch");
  solve->add_option("--trials", solve_trials, "trial budget for --ppz / --sampling");
  solve->add_option("--seed", solve_seed, "master seed");
  solve->add_option("--gamma", opt_gamma, "good-fraction constant (--auto)");
  solve->add_option("--poly-factor", opt_pf, "poly(n) exponent (--auto)");
  solve->add_option("--cap", opt_cap, "absolute trial cap (--auto)");
  solve->add_option("--tail", opt_tail, "deviation-term constant (--auto)");
  solve->add_option("input", solve_in, "input CNF path")->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "good-variable report for a planted instance");
  std::string analyze_in;
  analyze->add_option("input", analyze_in, "input CNF path with planted certificate")->required();

  // exp
  auto* exp = app.add_subcommand("exp", "run a scripted experiment from a config file");
  std::string exp_config, exp_out;
  exp->add_option("--config", exp_config, "config file path")->required();
  exp->add_option("--out", exp_out, "override the config's CSV output path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (gen->parsed()) {
      RandomStream rng(gen_seed);
      std::string text;
      if (gen_dist == "uniform") {
        text = dimacs_write(sample_R(gen_n, gen_k, gen_m, rng));
      } else if (gen_dist == "planted") {
        PlantedInstance inst = sample_P(gen_n, gen_k, gen_m, rng);
        text = dimacs_write(inst.formula, inst.sigma);
      } else {
        auto sat = [](const Formula& f) { return brute_force_sat(f).has_value(); };
        text = dimacs_write(sample_R_plus(gen_n, gen_k, gen_m, rng, sat, gen_attempts).formula);
      }
      if (gen_out.empty())
        out << text;
      else
        cli_detail::write_file(gen_out, text);
      return 0;
    }

    if (solve->parsed()) {
      int modes = int(use_ppz) + int(use_sampling) + int(use_oracle) + int(use_auto);
      if (modes != 1)
        return cli_detail::fail(err, "pick exactly one of --ppz, --sampling, --oracle, --auto");
      DimacsFile file = dimacs_read(cli_detail::read_file(solve_in));
      const Formula& f = file.formula;
      RandomStream rng(solve_seed);

      if (use_oracle) {
        if (auto a = brute_force_sat(f)) {
          cli_detail::print_model(out, *a);
          return 10;
        }
        out << "s UNSATISFIABLE\n";
        return 20;
      }

      SolveOutcome outcome;
      if (use_ppz) {
        if (solve_trials < 1) return cli_detail::fail(err, "--ppz needs --trials >= 1");
        outcome = ppz_repeat(f, solve_trials, rng);
      } else if (use_sampling) {
        if (solve_trials < 1) return cli_detail::fail(err, "--sampling needs --trials >= 1");
        outcome = uniform_sampling_solver(f, solve_trials, rng);
      } else {
        BudgetPolicy policy{opt_gamma, opt_pf, opt_cap, opt_tail};
        outcome = solve_random_ksat(f, f.n(), f.k(),
                                    static_cast<std::uint64_t>(f.clause_count()), policy, rng);
      }
      if (outcome.found()) {
        if (!eval_formula(f, *outcome.assignment))
          throw std::logic_error("solver emitted an invalid certificate");
        cli_detail::print_model(out, *outcome.assignment);
        return 10;
      }
      out << "s UNKNOWN\nc trials_used " << outcome.trials_used << "\n";
      return 0;
    }

    if (analyze->parsed()) {
      DimacsFile file = dimacs_read(cli_detail::read_file(analyze_in));
      if (!file.planted)
        return cli_detail::fail(err, "input has no 'c planted' certificate");
      if (!eval_formula(file.formula, *file.planted))
        return cli_detail::fail(err, "planted certificate does not satisfy the formula");
      GoodVariableReport rep = good_variables(file.formula, *file.planted);
      out << "n " << file.formula.n() << "\n";
      out << "m " << file.formula.clause_count() << "\n";
      out << "z " << rep.good_count() << "\n";
      for (std::uint32_t v : rep.good) out << "good " << v << " witness " << rep.witness[v] << "\n";
      return 0;
    }

    if (exp->parsed()) {
      ExperimentConfig config = parse_config(cli_detail::read_file(exp_config));
      if (!exp_out.empty()) config.out = exp_out;
      unsigned workers = worker_count_from_env();
      auto records = run_experiment(config, workers);
      out << "c experiment " << to_string(config.kind) << " wrote " << records.size()
          << " records";
      if (!config.out.empty()) out << " to " << config.out;
      out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    return cli_detail::fail(err, e.what());
  }
  return cli_detail::fail(err, "no subcommand");
}

inline int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args);
}

}  // namespace satlab
