#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hsplab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hsplab: hidden subgroup solvers on black-box groups"};
  hsplab::RunConfig cfg;
  std::string report_path, suite_path;
  app.add_option("--group", cfg.group_path, "group description file");
  app.add_option("--hidden", cfg.hidden, "hidden subgroup generators, ';'-separated or @file");
  app.add_option("--solver", cfg.solver, "solver")
      ->check(CLI::IsMember({"auto", "abelian", "commutator", "elem2-small", "elem2-cyclic", "normal"}));
  app.add_option("--epsilon", cfg.epsilon, "failure probability budget, in (0, 1/2)");
  app.add_option("--seed", cfg.seed, "seed (master seed in suite mode)");
  app.add_flag("--verify", cfg.verify, "compare against brute force");
  app.add_option("--report", report_path, "write the JSON report here instead of stdout");
  app.add_option("--suite", suite_path, "run every instance of a suite file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hsplab::kExitSpecError;
  }
  if (suite_path.empty() && cfg.group_path.empty()) {
    std::cerr << "either --group or --suite is required\n";
    return hsplab::kExitSpecError;
  }

  hsplab::RunOutcome out;
  if (!suite_path.empty()) {
    out = hsplab::run_suite(suite_path, cfg.seed, cfg.epsilon, cfg.verify);
  } else {
    cfg.instance = cfg.group_path;
    out = hsplab::run(cfg);
  }

  const std::string text = out.report.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(report_path);
    if (!file) {
      std::cerr << "cannot write " << report_path << "\n";
      return hsplab::kExitSpecError;
    }
    file << text;
  }
  if (out.report.contains("error")) std::cerr << out.report["error"]["message"].get<std::string>() << "\n";
  return out.exit_code;
}
