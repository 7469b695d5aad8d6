#include "nandwalk/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "nandwalk/continuous_fgg.hpp"
#include "nandwalk/continuous_tail.hpp"
#include "nandwalk/discrete_coined.hpp"
#include "nandwalk/discrete_reflections.hpp"

namespace nandwalk {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"classical", "fgg", "tail", "reflections", "coined-long", "coined-short"};
  return names;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

int parse_int(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("invalid ") + what + ": '" + text + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, sep);) out.push_back(item);
  return out;
}

}  // namespace

std::vector<int> parse_depths(const std::string& text) {
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int a = parse_int(text.substr(0, dots), "depth");
    const int b = parse_int(text.substr(dots + 2), "depth");
    if (a > b) throw ConfigError("empty depth range '" + text + "'");
    for (int d = a; d <= b; ++d) out.push_back(d);
  } else {
    for (const auto& part : split(text, ',')) out.push_back(parse_int(part, "depth"));
  }
  if (out.empty()) throw ConfigError("no depth given");
  for (int d : out)
    if (d < 1) throw ConfigError("depth must be at least 1");
  return out;
}

AssignmentSpec AssignmentSpec::parse(const std::string& text) {
  AssignmentSpec s;
  if (text == "exhaustive") {
    s.mode = Mode::Exhaustive;
  } else if (text == "worst-case") {
    s.mode = Mode::WorstCase;
  } else if (text == "all-ones") {
    s.mode = Mode::AllOnes;
  } else if (text == "all-zeros") {
    s.mode = Mode::AllZeros;
  } else if (text == "f1-family") {
    s.mode = Mode::TrueFamily;
  } else if (text.rfind("random:", 0) == 0) {
    s.mode = Mode::Random;
    const auto parts = split(text.substr(7), ':');
    if (parts.empty() || parts.size() > 2) throw ConfigError("expected random:COUNT[:SEED], got '" + text + "'");
    s.count = parse_int(parts[0], "random count");
    if (s.count < 1) throw ConfigError("random count must be positive");
    if (parts.size() == 2) s.seed = static_cast<std::uint64_t>(parse_int(parts[1], "random seed"));
  } else {
    s.mode = Mode::Explicit;
    s.bits = split(text, ',');
    if (s.bits.empty()) throw ConfigError("empty assignment list");
    for (const auto& b : s.bits) {
      if (b.empty() || b.find_first_not_of("01") != std::string::npos)
        throw ConfigError("unknown assignment spec '" + text + "'");
    }
  }
  return s;
}

std::string AssignmentSpec::str() const {
  switch (mode) {
    case Mode::Exhaustive: return "exhaustive";
    case Mode::WorstCase: return "worst-case";
    case Mode::AllOnes: return "all-ones";
    case Mode::AllZeros: return "all-zeros";
    case Mode::TrueFamily: return "f1-family";
    case Mode::Random: return "random:" + std::to_string(count) + (seed ? ":" + std::to_string(*seed) : "");
    case Mode::Explicit: {
      std::string out;
      for (const auto& b : bits) out += (out.empty() ? "" : ",") + b;
      return out;
    }
  }
  return "";
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> allowed{"algorithm", "algorithms", "formula", "depth", "depths", "assignments", "seed",
                                             "L_mult", "M_mult", "T_mult", "thresholds", "qpe", "tail_qpe",
                                             "out", "csv"};
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
  ExperimentConfig c;
  try {
    if (j.contains("algorithm")) c.algorithm = j.at("algorithm").get<std::string>();
    // The expanded list written into reports; it wins so a report's config can be rerun.
    if (j.contains("algorithms")) {
      c.algorithm.clear();
      for (const auto& name : j.at("algorithms").get<std::vector<std::string>>())
        c.algorithm += (c.algorithm.empty() ? "" : ",") + name;
    }
    if (j.contains("formula")) c.formula = j.at("formula").get<std::string>();
    for (const char* key : {"depth", "depths"}) {
      if (!j.contains(key)) continue;
      const json& d = j.at(key);
      if (d.is_number_integer()) c.depths = {d.get<int>()};
      else if (d.is_string()) c.depths = parse_depths(d.get<std::string>());
      else c.depths = d.get<std::vector<int>>();
    }
    if (j.contains("assignments")) c.assignments = AssignmentSpec::parse(j.at("assignments").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("L_mult")) c.l_mult = j.at("L_mult").get<double>();
    if (j.contains("M_mult")) c.m_mult = j.at("M_mult").get<double>();
    if (j.contains("T_mult")) c.t_mult = j.at("T_mult").get<double>();
    if (j.contains("thresholds")) {
      const json& t = j.at("thresholds");
      static const std::set<std::string> keys{"fgg", "tail_precision", "phase", "real_part", "short_tail_mass"};
      for (const auto& [key, _] : t.items())
        if (!keys.count(key)) throw ConfigError("unknown threshold '" + key + "'");
      if (t.contains("fgg")) c.thresholds.fgg = t.at("fgg").get<double>();
      if (t.contains("tail_precision")) c.thresholds.tail_precision = t.at("tail_precision").get<double>();
      if (t.contains("phase")) c.thresholds.phase = t.at("phase").get<double>();
      if (t.contains("real_part")) c.thresholds.real_part = t.at("real_part").get<double>();
      if (t.contains("short_tail_mass")) c.thresholds.short_tail_mass = t.at("short_tail_mass").get<double>();
    }
    if (j.contains("qpe")) {
      c.qpe_bits = j.at("qpe").value("bits", c.qpe_bits);
      c.qpe_shots = j.at("qpe").value("shots", c.qpe_shots);
    }
    if (j.contains("tail_qpe")) {
      c.tail_bits = j.at("tail_qpe").value("bits", c.tail_bits);
      c.tail_shots = j.at("tail_qpe").value("shots", c.tail_shots);
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("csv")) c.csv = j.at("csv").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["algorithm"] = algorithm;
  j["algorithms"] = algorithms;
  if (formula) j["formula"] = *formula;
  else j["depths"] = depths;
  j["assignments"] = assignments.str();
  j["seed"] = seed;
  j["L_mult"] = l_mult;
  j["M_mult"] = m_mult;
  j["T_mult"] = t_mult;
  json t = json::object();
  if (thresholds.fgg) t["fgg"] = *thresholds.fgg;
  if (thresholds.tail_precision) t["tail_precision"] = *thresholds.tail_precision;
  if (thresholds.phase) t["phase"] = *thresholds.phase;
  if (thresholds.real_part) t["real_part"] = *thresholds.real_part;
  if (thresholds.short_tail_mass) t["short_tail_mass"] = *thresholds.short_tail_mass;
  j["thresholds"] = t;
  j["qpe"] = {{"bits", qpe_bits}, {"shots", qpe_shots}};
  j["tail_qpe"] = {{"bits", tail_bits}, {"shots", tail_shots}};
  return j;
}

void ExperimentConfig::finalize() {
  const auto& known = known_algorithms();
  if (algorithm == "all") {
    algorithms = known;
  } else {
    algorithms.clear();
    for (const auto& name : split(algorithm, ',')) {
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConfigError("unknown algorithm '" + name + "'");
      if (std::find(algorithms.begin(), algorithms.end(), name) == algorithms.end()) algorithms.push_back(name);
    }
    if (algorithms.empty()) throw ConfigError("no algorithm given");
  }
  if (!formula && depths.empty()) throw ConfigError("no tree given");
  for (int d : depths)
    if (d < 1 || d > 20) throw ConfigError("depth must lie in 1..20");
  if (!(l_mult > 0) || !(m_mult > 0) || !(t_mult > 0)) throw ConfigError("multipliers must be positive");
  if (qpe_bits < 1 || qpe_bits > 16 || tail_bits < 1 || tail_bits > 16) throw ConfigError("QPE bits must lie in 1..16");
  if (qpe_shots == 0 || tail_shots == 0) throw ConfigError("QPE shots must be positive");
}

// ---------------------------------------------------------------------------
// Regression

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("power-law fit needs at least 3 points");
  const auto n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) throw std::invalid_argument("power-law fit needs positive data");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  if (vx <= 1e-12 * std::max(1.0, sxx)) throw std::invalid_argument("power-law fit needs distinct N values");
  PowerLawFit fit;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Experiment

namespace {

struct TreeCase {
  std::string label;
  NandTree original;
  NandTree nand;
  std::vector<Polarity> leaf_polarity;
  bool negate_root = false;

  Assignment to_nand_input(const Assignment& x) const {
    std::vector<std::uint8_t> bits(x.bits());
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (leaf_polarity[i] == Polarity::Negate) bits[i] ^= 1;
    return Assignment(std::move(bits));
  }
};

TreeCase make_case(std::string label, NandTree tree) {
  if (tree.is_nand_only()) {
    std::vector<Polarity> keep(static_cast<std::size_t>(tree.leaf_count()), Polarity::Keep);
    return {std::move(label), tree, tree, std::move(keep), false};
  }
  NandConversion conv = to_nand(tree);
  return {std::move(label), std::move(tree), std::move(conv.tree), std::move(conv.leaf_polarity),
          conv.root_polarity == Polarity::Negate};
}

std::vector<TreeCase> make_cases(const ExperimentConfig& cfg) {
  std::vector<TreeCase> out;
  if (cfg.formula) {
    try {
      out.push_back(make_case(*cfg.formula, parse_formula(*cfg.formula)));
    } catch (const ParseError& e) {
      throw ConfigError(std::string("formula: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("formula: ") + e.what());
    }
  } else {
    for (int d : cfg.depths) out.push_back(make_case("full-binary(" + std::to_string(d) + ")", full_binary_tree(d)));
  }
  return out;
}

std::vector<Assignment> random_inputs(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Assignment> out;
  for (int c = 0; c < count; ++c) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
    out.emplace_back(std::move(bits));
  }
  return out;
}

std::vector<Assignment> make_inputs(const ExperimentConfig& cfg, const TreeCase& tc, std::size_t index) {
  const int n = tc.original.leaf_count();
  const AssignmentSpec& s = cfg.assignments;
  using Mode = AssignmentSpec::Mode;
  std::vector<Assignment> out;
  switch (s.mode) {
    case Mode::Explicit:
      for (const auto& b : s.bits) {
        Assignment x = Assignment::from_string(b);
        if (x.size() != n)
          throw ConfigError("assignment '" + b + "' has " + std::to_string(x.size()) + " bits, tree has " +
                            std::to_string(n) + " leaves");
        out.push_back(std::move(x));
      }
      break;
    case Mode::Exhaustive:
      if (n > 12) throw ConfigError("exhaustive mode is limited to N <= 12 (tree has " + std::to_string(n) + ")");
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) out.push_back(Assignment::from_index(i, n));
      break;
    case Mode::Random:
      out = random_inputs(n, s.count, s.seed.value_or(cfg.seed) + 1000003ULL * index);
      break;
    case Mode::WorstCase:
      out.push_back(tc.to_nand_input(worst_case_assignment(tc.nand)));  // polarity maps are involutions
      break;
    case Mode::AllOnes: out.push_back(Assignment::constant(n, true)); break;
    case Mode::AllZeros: out.push_back(Assignment::constant(n, false)); break;
    case Mode::TrueFamily:
      try {
        out.push_back(tc.to_nand_input(uniform_true_assignment(tc.nand)));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      break;
  }
  return out;
}

// Inputs (in NAND form) used to calibrate thresholds for one tree.
std::vector<Assignment> calibration_inputs(const NandTree& tree, std::uint64_t seed) {
  const int n = tree.leaf_count();
  std::vector<Assignment> out;
  if (n <= 8) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) out.push_back(Assignment::from_index(i, n));
    return out;
  }
  out = random_inputs(n, 64, seed);
  out.push_back(Assignment::constant(n, true));
  out.push_back(Assignment::constant(n, false));
  return out;
}

int scaled(double mult, int base) { return std::max(1, static_cast<int>(std::lround(mult * base))); }

void check_cap(const std::string& what, int dimension) {
  if (dimension > kDimensionCap) throw DimensionCapError(what, dimension);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json gap_json(const GapReport& g) {
  return {{"measure", g.measure},
          {"reference_mass", g.reference_mass},
          {"threshold_mass", g.threshold_mass},
          {"min_relevant_distance", optional_number(g.min_relevant_distance)},
          {"min_relevant_gap", optional_number(g.min_relevant_gap)},
          {"threshold", g.threshold}};
}

struct Calibrations {
  std::optional<PhaseCalibration> reflections;
  std::optional<CoinedCalibration> coined_long;
  std::optional<CoinedCalibration> coined_short;
};

// Everything computed per tree that does not depend on the input.
struct TreeSetup {
  int n = 0;
  FggParams fgg;
  int tail_length = 0;
  int reflection_length = 0;
  int coined_length = 0;
  double phase_threshold = 0.0;
  double re_long = 0.0;
  double re_short = 0.0;
  double mass_short = 0.0;
  json calibration = json::object();
};

bool wants(const ExperimentConfig& cfg, const std::string& name) {
  return std::find(cfg.algorithms.begin(), cfg.algorithms.end(), name) != cfg.algorithms.end();
}

TreeSetup setup_tree(const ExperimentConfig& cfg, const TreeCase& tc, std::size_t index) {
  TreeSetup s;
  const NandTree& t = tc.nand;
  s.n = t.leaf_count();
  s.fgg = fgg_defaults(s.n);
  s.fgg.half_width = scaled(cfg.l_mult, s.fgg.half_width);
  s.fgg.half_length = scaled(cfg.m_mult, s.fgg.half_length);
  s.fgg.time *= cfg.t_mult;
  if (cfg.thresholds.fgg) s.fgg.threshold = *cfg.thresholds.fgg;
  s.tail_length = scaled(cfg.l_mult, default_tail_length(s.n));
  s.reflection_length = scaled(cfg.l_mult, default_reflection_tail_length(s.n));
  s.coined_length = scaled(cfg.l_mult, default_coined_tail_length(s.n));

  const int edges_tree = t.size() - 1;
  int odd_leaves = 0;
  for (int leaf : t.leaves()) odd_leaves += t.depth_of(leaf) % 2;
  if (wants(cfg, "fgg")) check_cap("fgg", 2 * s.fgg.half_length + 1 + t.size() + s.n);
  if (wants(cfg, "tail")) check_cap("tail", 2 * s.tail_length + t.size() + s.n);
  if (wants(cfg, "reflections")) check_cap("reflections", 2 * s.reflection_length + t.size() + odd_leaves);
  if (wants(cfg, "coined-long")) check_cap("coined-long", 2 * (2 * s.coined_length + edges_tree));
  if (wants(cfg, "coined-short")) check_cap("coined-short", 2 * (2 + edges_tree));

  const bool binary = t.is_binary();
  const std::uint64_t cal_seed = cfg.seed + 7919ULL * index;
  std::vector<Assignment> cal;
  const auto cal_inputs = [&]() -> const std::vector<Assignment>& {
    if (cal.empty()) cal = calibration_inputs(t, cal_seed);
    return cal;
  };

  if (wants(cfg, "fgg"))
    s.calibration["fgg"] = {{"half_width", s.fgg.half_width}, {"half_length", s.fgg.half_length},
                            {"time", s.fgg.time}, {"threshold", s.fgg.threshold}};
  if (wants(cfg, "tail"))
    s.calibration["tail"] = {{"tail_length", s.tail_length},
                             {"precision", cfg.thresholds.tail_precision.value_or(1.0 / (2.0 * std::sqrt(s.n)))}};
  if (wants(cfg, "reflections")) {
    json j = {{"tail_length", s.reflection_length}};
    if (cfg.thresholds.phase) {
      s.phase_threshold = *cfg.thresholds.phase;
      j["source"] = "config";
    } else {
      const PhaseCalibration c = calibrate_phase_threshold(t, cal_inputs(), s.reflection_length);
      s.phase_threshold = c.threshold;
      j["source"] = "calibrated";
      j["min_gap"] = c.min_gap;
      j["instances"] = c.instances;
    }
    j["phase_threshold"] = s.phase_threshold;
    s.calibration["reflections"] = j;
  }
  for (const char* name : {"coined-long", "coined-short"}) {
    if (!wants(cfg, name)) continue;
    if (!binary) throw ConfigError(std::string(name) + " needs a binary tree");
    const bool is_long = std::string(name) == "coined-long";
    const CoinedVariant variant = is_long ? CoinedVariant::LongTail : CoinedVariant::ShortTail;
    const int length = is_long ? s.coined_length : 1;
    json j = {{"tail_length", length}};
    double re = 0.0, mass = 0.5;
    const bool need_re = !cfg.thresholds.real_part;
    const bool need_mass = !is_long && !cfg.thresholds.short_tail_mass;
    if (need_re || need_mass) {
      const CoinedCalibration c = calibrate_coined(variant, t, cal_inputs(), length, !is_long);
      re = c.re_threshold;
      mass = c.mass_threshold;
      j["min_gap"] = c.min_gap;
      j["min_zero_mass"] = c.min_zero_mass;
      j["instances"] = c.instances;
    }
    if (!need_re) re = *cfg.thresholds.real_part;
    if (!is_long && !need_mass) mass = *cfg.thresholds.short_tail_mass;
    j["re_threshold"] = re;
    j["mass_threshold"] = mass;
    (is_long ? s.re_long : s.re_short) = re;
    if (!is_long) s.mass_short = mass;
    s.calibration[name] = j;
  }
  return s;
}

json run_algorithm(const ExperimentConfig& cfg, const std::string& name, const TreeCase& tc, const TreeSetup& s,
                   const Assignment& x_original, const Assignment& x, std::uint64_t qpe_seed) {
  const NandTree& t = tc.nand;
  QueryLedger ledger;
  json r;
  bool nand_decision = false;
  const QpeSettings qpe{cfg.qpe_bits, cfg.qpe_shots, qpe_seed};
  if (name == "classical") {
    const bool value = evaluate(tc.original, x_original, ledger);
    r["randomized_cost"] = randomized_query_cost(t, x, ExactRecurrence{}).mean;
    r["decision"] = value;
    r["queries"] = ledger.count();
    return r;
  }
  if (name == "fgg") {
    const FggOutcome o = run_fgg(t, x, s.fgg, &ledger);
    nand_decision = o.decision;
    r["prob_left"] = o.split.left;
    r["prob_tree"] = o.split.tree;
    r["prob_right"] = o.split.right;
    r["margin"] = o.margin;
    r["hamiltonian_time"] = ledger.hamiltonian_time();
  } else if (name == "tail") {
    TailOptions opt;
    opt.precision = cfg.thresholds.tail_precision;
    opt.bits = cfg.tail_bits;
    opt.shots = cfg.tail_shots;
    opt.seed = qpe_seed;
    const TailDecision d = decide_tail(t, x, s.tail_length, opt, &ledger);
    nand_decision = d.decision;
    r["gap"] = gap_json(d.gap);
    r["modal_phase"] = d.estimate.modal_phase();
    r["modal_frequency"] = d.estimate.modal_frequency();
    r["step"] = d.step;
  } else if (name == "reflections") {
    const ReflectionPair pair = build_reflections(t, x, s.reflection_length);
    const WalkDecision d = decide_reflections(pair, reflection_start(pair), s.phase_threshold, qpe, &ledger);
    nand_decision = d.decision;
    r["gap"] = gap_json(d.gap);
    r["padded"] = pair.instance.padded;
    r["modal_phase"] = d.estimate.modal_phase();
  } else {
    const bool is_long = name == "coined-long";
    const CoinedWalk walk = is_long ? build_coined_walk(t, x, s.coined_length) : build_short_tail_walk(t, x);
    const WalkDecision d = decide_coined(walk, coined_start(walk), is_long ? s.re_long : s.re_short,
                                         is_long ? 0.5 : s.mass_short, qpe, &ledger);
    nand_decision = d.decision;
    r["gap"] = gap_json(d.gap);
    r["modal_phase"] = d.estimate.modal_phase();
  }
  r["decision"] = tc.negate_root ? !nand_decision : nand_decision;
  r["queries"] = ledger.count();
  return r;
}

}  // namespace

ExperimentReport run_experiment(ExperimentConfig cfg) {
  cfg.finalize();
  const json config_json = cfg.to_json();
  const std::string hash = fnv1a_hex(config_json.dump());
  const std::vector<TreeCase> cases = make_cases(cfg);

  json records = json::array();
  json calibration = json::array();
  std::map<std::string, std::pair<int, int>> tally;  // algorithm -> (agreements, total)
  std::map<std::string, std::vector<std::string>> disagreements;
  std::map<std::string, std::map<int, double>> gap_by_n;  // algorithm -> N -> min F=1 gap
  std::map<int, double> classical_cost;
  bool all_agree = true;
  std::uint64_t instance_counter = 0;

  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const TreeCase& tc = cases[ci];
    const TreeSetup setup = setup_tree(cfg, tc, ci);
    calibration.push_back({{"tree", tc.label}, {"N", setup.n}, {"algorithms", setup.calibration}});

    for (const Assignment& x : make_inputs(cfg, tc, ci)) {
      const auto start = std::chrono::steady_clock::now();
      const bool truth = evaluate(tc.original, x);
      const Assignment xn = tc.to_nand_input(x);
      const std::uint64_t qpe_seed = cfg.seed + 104729ULL * instance_counter++;
      json rec;
      rec["tree"] = tc.label;
      rec["depth"] = tc.original.depth();
      rec["N"] = setup.n;
      rec["assignment"] = x.to_string();
      rec["classical"] = truth;
      rec["config_hash"] = hash;
      bool agree = true;
      for (const auto& name : cfg.algorithms) {
        json r = run_algorithm(cfg, name, tc, setup, x, xn, qpe_seed);
        const bool ok = r.at("decision").get<bool>() == truth;
        r["agree"] = ok;
        agree = agree && ok;
        auto& [good, total] = tally[name];
        good += ok ? 1 : 0;
        ++total;
        if (!ok) disagreements[name].push_back(tc.label + ":" + x.to_string());
        if (truth && r.contains("gap")) {
          const json& g = r.at("gap");
          const json& v = g.at("measure") == "eigenvalue" ? g.at("min_relevant_gap") : g.at("min_relevant_distance");
          if (v.is_number()) {
            auto& slot = gap_by_n[name][setup.n];
            slot = slot == 0.0 ? v.get<double>() : std::min(slot, v.get<double>());
          }
        }
        if (name == "classical") {
          auto& slot = classical_cost[setup.n];
          slot = std::max(slot, r.at("randomized_cost").get<double>());
        }
        rec["algorithms"][name] = std::move(r);
      }
      rec["agree"] = agree;
      all_agree = all_agree && agree;
      rec["wall_time_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      records.push_back(std::move(rec));
    }
  }

  json aggregate;
  int good_all = 0;
  for (const auto& rec : records) good_all += rec.at("agree").get<bool>() ? 1 : 0;
  aggregate["instances"] = records.size();
  aggregate["agreement_rate"] = records.empty() ? 1.0 : static_cast<double>(good_all) / records.size();
  json per = json::object();
  for (const auto& [name, counts] : tally) {
    per[name] = {{"agreement_rate", static_cast<double>(counts.first) / counts.second},
                 {"disagreements", disagreements[name]}};
  }
  aggregate["per_algorithm"] = per;

  json regressions = json::object();
  const auto add_fit = [&](const std::string& key, const std::map<int, double>& series) {
    if (series.size() < 3) return;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, v] : series)
      if (v > 0) pts.emplace_back(n, v);
    if (pts.size() < 3) return;
    const PowerLawFit fit = fit_power_law(pts);
    json p = json::array();
    for (const auto& [n, v] : pts) p.push_back({n, v});
    regressions[key] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"points", p}};
  };
  add_fit("classical_cost", classical_cost);
  for (const auto& [name, series] : gap_by_n) add_fit(name + "_gap", series);
  aggregate["regressions"] = regressions;

  json doc;
  doc["schema"] = kReportSchema;
  doc["config"] = config_json;
  doc["config_hash"] = hash;
  doc["calibration"] = calibration;
  doc["records"] = records;
  doc["aggregate"] = aggregate;

  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    if (!f) throw std::runtime_error("cannot write report to " + cfg.out);
    f << doc.dump(2) << '\n';
  }
  if (!cfg.csv.empty()) {
    std::ofstream f(cfg.csv);
    if (!f) throw std::runtime_error("cannot write CSV to " + cfg.csv);
    f << report_csv(doc);
  }
  return {std::move(doc), all_agree};
}

json strip_timing(json report) {
  if (report.is_object()) {
    report.erase("wall_time_ms");
    for (auto& [_, v] : report.items()) v = strip_timing(std::move(v));
  } else if (report.is_array()) {
    for (auto& v : report) v = strip_timing(std::move(v));
  }
  return report;
}

std::string report_csv(const json& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "tree,N,assignment,classical,algorithm,decision,agree,reference_mass,threshold_mass,min_gap,queries\n";
  const auto cell = [&](const json& v) {
    if (v.is_null()) out << "";
    else if (v.is_boolean()) out << (v.get<bool>() ? 1 : 0);
    else if (v.is_number()) out << v.get<double>();
    else out << v.get<std::string>();
  };
  for (const auto& rec : report.at("records")) {
    for (const auto& [name, r] : rec.at("algorithms").items()) {
      out << '"' << rec.at("tree").get<std::string>() << "\"," << rec.at("N").get<int>() << ','
          << rec.at("assignment").get<std::string>() << ',' << (rec.at("classical").get<bool>() ? 1 : 0) << ','
          << name << ',';
      cell(r.at("decision"));
      out << ',';
      cell(r.at("agree"));
      out << ',';
      if (r.contains("gap")) {
        const json& g = r.at("gap");
        cell(g.at("reference_mass"));
        out << ',';
        cell(g.at("threshold_mass"));
        out << ',';
        cell(g.at("measure") == "eigenvalue" ? g.at("min_relevant_gap") : g.at("min_relevant_distance"));
      } else {
        out << ",,";
      }
      out << ',';
      cell(r.at("queries"));
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace nandwalk
