#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nandwalk/formula.hpp"

namespace nandwalk {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionCapError : public std::runtime_error {
 public:
  DimensionCapError(const std::string& what, int dimension)
      : std::runtime_error(what + " needs dimension " + std::to_string(dimension) + " (cap 4096)"),
        dimension_(dimension) {}
  int dimension() const { return dimension_; }

 private:
  int dimension_;
};

inline constexpr int kDimensionCap = 4096;
inline constexpr const char* kReportSchema = "nandwalk-report/1";

struct AssignmentSpec {
  enum class Mode { Explicit, Exhaustive, Random, WorstCase, AllOnes, AllZeros, TrueFamily };
  Mode mode = Mode::Exhaustive;
  std::vector<std::string> bits;      // Explicit
  int count = 0;                      // Random
  std::optional<std::uint64_t> seed;  // Random; falls back to the config seed

  /// "exhaustive", "random:COUNT[:SEED]", "worst-case", "all-ones",
  /// "all-zeros", "f1-family", or a comma separated list of bit strings.
  static AssignmentSpec parse(const std::string& text);
  std::string str() const;
};

struct Thresholds {
  std::optional<double> fgg;              // prob-right cut
  std::optional<double> tail_precision;   // fraction of the step, default 1/(2 sqrt N)
  std::optional<double> phase;            // reflections, default calibrated
  std::optional<double> real_part;        // coined, default calibrated
  std::optional<double> short_tail_mass;  // default calibrated
};

struct ExperimentConfig {
  std::vector<std::string> algorithms;  // expanded from "all"
  std::string algorithm = "all";
  std::optional<std::string> formula;   // otherwise full binary trees of `depths`
  std::vector<int> depths{2};
  AssignmentSpec assignments;
  std::uint64_t seed = 1;
  double l_mult = 1.0;
  double m_mult = 1.0;
  double t_mult = 1.0;
  Thresholds thresholds;
  int qpe_bits = 8;
  std::uint64_t qpe_shots = 64;
  int tail_bits = 10;
  std::uint64_t tail_shots = 1000;
  std::string out;
  std::string csv;

  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Canonical form; excludes output paths so the hash only covers what
  /// affects results.
  nlohmann::json to_json() const;
  /// Validates and expands `algorithm` into `algorithms`.
  void finalize();
};

/// Depth lists written as "d", "a..b" or "a,b,c".
std::vector<int> parse_depths(const std::string& text);

/// The quantum and classical procedures the runner knows.
const std::vector<std::string>& known_algorithms();

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(value) on log(N).
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

struct ExperimentReport {
  nlohmann::json document;
  bool all_agree = true;
};

/// Deterministic given the config; writes the JSON (and CSV) when paths are set.
ExperimentReport run_experiment(ExperimentConfig cfg);

/// Copy of a report with every "wall_time_ms" field removed.
nlohmann::json strip_timing(nlohmann::json report);

/// One row per (instance, algorithm).
std::string report_csv(const nlohmann::json& report);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace nandwalk
