// nandwalk: run NAND-tree walk experiments and cross-check them against
// classical evaluation.
//
//   nandwalk run --config exp.json [--algorithm all] [--depth 1..3]
//                [--assignment exhaustive] [--seed 7] [--L-mult 1] [--M-mult 1]
//                [--out report.json]
//
// Exit status: 0 when every decision matches the classical value, 1 on any
// disagreement, 2 on usage or configuration errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nandwalk/runner.hpp"

namespace {

constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-walk NAND-tree evaluation experiments"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run an experiment and write a JSON report");

  std::string config_path;
  std::optional<std::string> algorithm, depth, formula, assignment, out, csv;
  std::optional<std::uint64_t> seed;
  std::optional<double> l_mult, m_mult, t_mult;
  run->add_option("--config", config_path, "Experiment config (JSON)");
  run->add_option("--algorithm", algorithm,
                  "all, or a comma list of classical, fgg, tail, reflections, coined-long, coined-short");
  run->add_option("--depth", depth, "Full binary tree depths: d, a..b or a,b,c");
  run->add_option("--formula", formula, "Formula such as NAND(NAND(x1,x2),NAND(x3,x4)) instead of --depth");
  run->add_option("--assignment", assignment,
                  "exhaustive, random:COUNT[:SEED], worst-case, all-ones, all-zeros, f1-family or bit strings");
  run->add_option("--seed", seed, "Seed for random assignments, calibration and phase estimation");
  run->add_option("--L-mult", l_mult, "Multiplier on the default start-state length L");
  run->add_option("--M-mult", m_mult, "Multiplier on the default runway half-length M");
  run->add_option("--T-mult", t_mult, "Multiplier on the default evolution time");
  run->add_option("--out", out, "Report path (JSON); printed to stdout when omitted");
  run->add_option("--csv", csv, "Optional CSV projection of the records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  nandwalk::ExperimentReport report;
  try {
    nandwalk::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw nandwalk::ConfigError("cannot open config " + config_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::parse_error& e) {
        throw nandwalk::ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      cfg = nandwalk::ExperimentConfig::from_json(j);
    }
    if (algorithm) cfg.algorithm = *algorithm;
    if (formula) cfg.formula = *formula;
    if (depth) {
      cfg.depths = nandwalk::parse_depths(*depth);
      cfg.formula.reset();
    }
    if (assignment) cfg.assignments = nandwalk::AssignmentSpec::parse(*assignment);
    if (seed) cfg.seed = *seed;
    if (l_mult) cfg.l_mult = *l_mult;
    if (m_mult) cfg.m_mult = *m_mult;
    if (t_mult) cfg.t_mult = *t_mult;
    if (out) cfg.out = *out;
    if (csv) cfg.csv = *csv;
    const bool to_stdout = cfg.out.empty();
    report = nandwalk::run_experiment(cfg);
    if (to_stdout) std::cout << report.document.dump(2) << '\n';
  } catch (const nandwalk::ConfigError& e) {
    std::cerr << "nandwalk: " << e.what() << '\n';
    return kUsageError;
  } catch (const nandwalk::DimensionCapError& e) {
    std::cerr << "nandwalk: refused: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "nandwalk: " << e.what() << '\n';
    return kUsageError;
  }

  const auto& agg = report.document.at("aggregate");
  for (const auto& [name, stats] : agg.at("per_algorithm").items())
    std::cerr << name << ": agreement " << stats.at("agreement_rate").get<double>() << '\n';
  std::cerr << "instances: " << agg.at("instances").get<std::size_t>()
            << ", agreement rate: " << agg.at("agreement_rate").get<double>() << '\n';
  return report.all_agree ? 0 : 1;
}
