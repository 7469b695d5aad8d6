#include "nandwalk/formula.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>

namespace nandwalk {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Nand: return "NAND";
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Leaf: return "LEAF";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// NandTree

NandTree::NandTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("formula tree is empty");
  const int n = size();
  parents_.assign(nodes_.size(), -1);
  depths_.assign(nodes_.size(), 0);
  subtree_leaves_.assign(nodes_.size(), 0);

  std::set<int> variables;
  for (int id = 0; id < n; ++id) {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.kind == GateKind::Leaf) {
      if (!node.children.empty()) throw std::invalid_argument("leaf node " + std::to_string(id) + " has children");
      if (node.variable < 1) throw std::invalid_argument("leaf node " + std::to_string(id) + " has no variable");
      if (!variables.insert(node.variable).second)
        throw std::invalid_argument("variable x" + std::to_string(node.variable) + " occurs twice");
    } else {
      if (node.children.empty()) throw std::invalid_argument("gate node " + std::to_string(id) + " has no children");
      if (node.variable != 0) throw std::invalid_argument("gate node " + std::to_string(id) + " carries a variable");
    }
    for (int child : node.children) {
      if (child <= id || child >= n)
        throw std::invalid_argument("child " + std::to_string(child) + " of node " + std::to_string(id) +
                                    " violates pre-order numbering");
      if (parents_[static_cast<std::size_t>(child)] != -1)
        throw std::invalid_argument("node " + std::to_string(child) + " has two parents");
      parents_[static_cast<std::size_t>(child)] = id;
    }
  }
  for (int id = 1; id < n; ++id)
    if (parents_[static_cast<std::size_t>(id)] == -1)
      throw std::invalid_argument("node " + std::to_string(id) + " is unreachable from the root");

  const int leaf_total = static_cast<int>(variables.size());
  if (*variables.rbegin() != leaf_total)
    throw std::invalid_argument("variables must be exactly x1..xN");

  for (int id = 1; id < n; ++id) {
    depths_[static_cast<std::size_t>(id)] = depths_[static_cast<std::size_t>(parents_[static_cast<std::size_t>(id)])] + 1;
    depth_ = std::max(depth_, depths_[static_cast<std::size_t>(id)]);
  }
  for (int id = n - 1; id >= 0; --id) {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.kind == GateKind::Leaf) {
      subtree_leaves_[static_cast<std::size_t>(id)] = 1;
    } else {
      for (int child : node.children)
        subtree_leaves_[static_cast<std::size_t>(id)] += subtree_leaves_[static_cast<std::size_t>(child)];
    }
  }
  leaves_.assign(static_cast<std::size_t>(leaf_total), -1);
  for (int id = 0; id < n; ++id)
    if (nodes_[static_cast<std::size_t>(id)].kind == GateKind::Leaf)
      leaves_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(id)].variable - 1)] = id;
}

bool NandTree::is_nand_only() const {
  return std::all_of(nodes_.begin(), nodes_.end(),
                     [](const Node& n) { return n.kind == GateKind::Leaf || n.kind == GateKind::Nand; });
}

bool NandTree::is_binary() const {
  return std::all_of(nodes_.begin(), nodes_.end(),
                     [](const Node& n) { return n.kind == GateKind::Leaf || n.children.size() == 2; });
}

bool NandTree::is_full_binary() const {
  if (!is_binary()) return false;
  return std::all_of(leaves_.begin(), leaves_.end(), [this](int id) { return depth_of(id) == depth_; });
}

std::string NandTree::to_formula() const {
  std::function<std::string(int)> render = [&](int id) -> std::string {
    const Node& node = this->node(id);
    if (node.kind == GateKind::Leaf) return "x" + std::to_string(node.variable);
    std::string out(nandwalk::to_string(node.kind));
    out += '(';
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i) out += ',';
      out += render(node.children[i]);
    }
    out += ')';
    return out;
  };
  return render(root());
}

// ---------------------------------------------------------------------------
// Assignment

Assignment::Assignment(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_)
    if (b > 1) throw std::invalid_argument("assignment bits must be 0 or 1");
}

Assignment Assignment::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  for (char c : text) {
    if (c == '0' || c == '1') bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c == ',' || std::isspace(static_cast<unsigned char>(c))) continue;
    else throw std::invalid_argument("invalid assignment character '" + std::string(1, c) + "'");
  }
  return Assignment(std::move(bits));
}

Assignment Assignment::from_index(std::uint64_t value, int n) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((value >> i) & 1U);
  return Assignment(std::move(bits));
}

Assignment Assignment::constant(int n, bool value) {
  return Assignment(std::vector<std::uint8_t>(static_cast<std::size_t>(n), value ? 1 : 0));
}

int Assignment::ones() const { return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1)); }

Assignment Assignment::negated() const {
  auto bits = bits_;
  for (auto& b : bits) b ^= 1U;
  return Assignment(std::move(bits));
}

std::string Assignment::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out += static_cast<char>('0' + b);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NandTree parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty formula", pos_);
    parse_formula();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return NandTree(std::move(nodes_));
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume_keyword(std::string_view word) {
    if (text_.substr(pos_, word.size()) != word) return false;
    pos_ += word.size();
    return true;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  int parse_formula() {
    skip_space();
    const std::size_t start = pos_;
    GateKind kind;
    if (consume_keyword("NAND")) kind = GateKind::Nand;
    else if (consume_keyword("AND")) kind = GateKind::And;
    else if (consume_keyword("OR")) kind = GateKind::Or;
    else if (pos_ < text_.size() && text_[pos_] == 'x') return parse_variable();
    else throw ParseError("expected gate or variable", start);

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{kind, {}, 0});
    expect('(');
    std::vector<int> children;
    children.push_back(parse_formula());
    skip_space();
    while (pos_ < text_.size() && text_[pos_] == ',') {
      ++pos_;
      children.push_back(parse_formula());
      skip_space();
    }
    if (children.size() < 2) throw ParseError("gate needs at least two arguments", pos_);
    expect(')');
    nodes_[static_cast<std::size_t>(id)].children = std::move(children);
    return id;
  }

  int parse_variable() {
    const std::size_t start = pos_;
    ++pos_;  // 'x'
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) throw ParseError("variable index missing", digits);
    const std::string number(text_.substr(digits, pos_ - digits));
    if (number.size() > 9 || std::stoi(number) < 1) throw ParseError("variable index must be a positive integer", digits);
    if (!seen_.insert(std::stoi(number)).second) throw ParseError("duplicate variable x" + number, start);
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{GateKind::Leaf, {}, static_cast<int>(seen_.size())});
    return id;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
  std::set<int> seen_;
};

}  // namespace

NandTree parse_formula(std::string_view text) { return Parser(text).parse(); }

NandTree full_binary_tree(int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  if (depth > 20) throw std::invalid_argument("depth too large");
  std::vector<Node> nodes;
  int next_variable = 1;
  std::function<int(int)> build = [&](int level) -> int {
    const int id = static_cast<int>(nodes.size());
    if (level == depth) {
      nodes.push_back(Node{GateKind::Leaf, {}, next_variable++});
      return id;
    }
    nodes.push_back(Node{GateKind::Nand, {}, 0});
    const int left = build(level + 1);
    const int right = build(level + 1);
    nodes[static_cast<std::size_t>(id)].children = {left, right};
    return id;
  };
  build(0);
  return NandTree(std::move(nodes));
}

// ---------------------------------------------------------------------------
// De Morgan rewrite

bool NandConversion::evaluate_original(const Assignment& x) const {
  auto bits = x.bits();
  if (bits.size() != leaf_polarity.size()) throw std::invalid_argument("assignment length mismatch");
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (leaf_polarity[i] == Polarity::Negate) bits[i] ^= 1U;
  const bool value = evaluate(tree, Assignment(std::move(bits)));
  return root_polarity == Polarity::Negate ? !value : value;
}

NandConversion to_nand(const NandTree& tree) {
  // Gate output parity: AND(c) = NOT NAND(c), OR(c) = NAND(NOT c), NAND = NAND.
  std::vector<std::set<GateKind>> kinds_by_level(static_cast<std::size_t>(tree.depth() + 1));
  for (int id = 0; id < tree.size(); ++id)
    if (tree.node(id).kind != GateKind::Leaf)
      kinds_by_level[static_cast<std::size_t>(tree.depth_of(id))].insert(tree.node(id).kind);
  for (std::size_t level = 0; level < kinds_by_level.size(); ++level)
    if (kinds_by_level[level].size() > 1)
      throw std::invalid_argument("mixed gate kinds at level " + std::to_string(level));

  std::vector<Node> nodes = tree.nodes();
  std::vector<Polarity> leaf_polarity(static_cast<std::size_t>(tree.leaf_count()), Polarity::Keep);
  // want_negated[id]: the NAND subtree at id must output NOT(original value).
  std::vector<bool> want_negated(nodes.size(), false);

  const auto natural_negation = [](GateKind kind) { return kind == GateKind::And; };
  want_negated[0] = natural_negation(tree.node(0).kind);
  for (int id = 0; id < tree.size(); ++id) {
    const Node& node = tree.node(id);
    const bool negated = want_negated[static_cast<std::size_t>(id)];
    if (node.kind == GateKind::Leaf) {
      leaf_polarity[static_cast<std::size_t>(node.variable - 1)] = negated ? Polarity::Negate : Polarity::Keep;
      continue;
    }
    if (negated != natural_negation(node.kind))
      throw std::invalid_argument("gate kinds do not alternate at node " + std::to_string(id));
    const bool children_negated = node.kind == GateKind::Or;
    for (int child : node.children) want_negated[static_cast<std::size_t>(child)] = children_negated;
    nodes[static_cast<std::size_t>(id)].kind = GateKind::Nand;
  }
  return NandConversion{NandTree(std::move(nodes)), std::move(leaf_polarity),
                        want_negated[0] ? Polarity::Negate : Polarity::Keep};
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<std::uint8_t> evaluate_all(const NandTree& tree, const Assignment& x) {
  if (x.size() != tree.leaf_count())
    throw std::invalid_argument("assignment has " + std::to_string(x.size()) + " bits, tree has " +
                                std::to_string(tree.leaf_count()) + " leaves");
  std::vector<std::uint8_t> value(static_cast<std::size_t>(tree.size()), 0);
  for (int id = tree.size() - 1; id >= 0; --id) {
    const Node& node = tree.node(id);
    bool all = true;
    bool any = false;
    for (int child : node.children) {
      all = all && value[static_cast<std::size_t>(child)];
      any = any || value[static_cast<std::size_t>(child)];
    }
    bool v = false;
    switch (node.kind) {
      case GateKind::Leaf: v = x[node.variable - 1]; break;
      case GateKind::Nand: v = !all; break;
      case GateKind::And: v = all; break;
      case GateKind::Or: v = any; break;
    }
    value[static_cast<std::size_t>(id)] = v ? 1 : 0;
  }
  return value;
}

bool evaluate(const NandTree& tree, const Assignment& x) { return evaluate_all(tree, x)[0] != 0; }

bool evaluate(const NandTree& tree, const Assignment& x, QueryLedger& ledger) {
  ledger.charge(static_cast<std::uint64_t>(tree.leaf_count()));
  return evaluate(tree, x);
}

// ---------------------------------------------------------------------------
// Classical randomized baseline

namespace {

void require_nand(const NandTree& tree) {
  if (!tree.is_nand_only()) throw std::invalid_argument("randomized query cost needs a NAND-only tree");
}

// A child is evaluated iff no 0-valued sibling precedes it in the random
// order: probability 1/z for a 0-child and 1/(z+1) for a 1-child, where z
// is the number of 0-children.
double node_cost(const std::vector<double>& child_cost, const std::vector<bool>& child_value) {
  const auto zeros = static_cast<double>(std::count(child_value.begin(), child_value.end(), false));
  double total = 0.0;
  for (std::size_t i = 0; i < child_cost.size(); ++i) {
    if (zeros == 0.0) total += child_cost[i];
    else total += child_cost[i] / (child_value[i] ? zeros + 1.0 : zeros);
  }
  return total;
}

}  // namespace

QueryCostEstimate randomized_query_cost(const NandTree& tree, const Assignment& x, ExactRecurrence) {
  require_nand(tree);
  const auto value = evaluate_all(tree, x);
  std::vector<double> cost(static_cast<std::size_t>(tree.size()), 0.0);
  for (int id = tree.size() - 1; id >= 0; --id) {
    const Node& node = tree.node(id);
    if (node.kind == GateKind::Leaf) {
      cost[static_cast<std::size_t>(id)] = 1.0;
      continue;
    }
    std::vector<double> child_cost;
    std::vector<bool> child_value;
    for (int child : node.children) {
      child_cost.push_back(cost[static_cast<std::size_t>(child)]);
      child_value.push_back(value[static_cast<std::size_t>(child)] != 0);
    }
    cost[static_cast<std::size_t>(id)] = node_cost(child_cost, child_value);
  }
  return {cost[0], 0.0};
}

QueryCostEstimate randomized_query_cost(const NandTree& tree, const Assignment& x, MonteCarlo mc) {
  require_nand(tree);
  if (mc.trials == 0) throw std::invalid_argument("monte-carlo needs at least one trial");
  if (x.size() != tree.leaf_count()) throw std::invalid_argument("assignment length mismatch");
  std::mt19937_64 rng(mc.seed);

  std::uint64_t reads = 0;
  std::function<bool(int)> run = [&](int id) -> bool {
    const Node& node = tree.node(id);
    if (node.kind == GateKind::Leaf) {
      ++reads;
      return x[node.variable - 1];
    }
    std::vector<int> order = node.children;
    std::shuffle(order.begin(), order.end(), rng);
    for (int child : order)
      if (!run(child)) return true;
    return false;
  };

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t t = 0; t < mc.trials; ++t) {
    reads = 0;
    run(tree.root());
    const auto r = static_cast<double>(reads);
    sum += r;
    sum_sq += r * r;
  }
  const auto n = static_cast<double>(mc.trials);
  const double mean = sum / n;
  const double variance = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(variance / n)};
}

Assignment worst_case_assignment(const NandTree& tree) {
  require_nand(tree);
  const auto n = static_cast<std::size_t>(tree.size());
  // worst[id][v]: maximal expected cost of the subtree at id forced to value v.
  std::vector<std::array<double, 2>> worst(n, {0.0, 0.0});
  // zero_mask[id]: which children take value 0 in the maximising choice for v = 1.
  std::vector<std::uint64_t> zero_mask(n, 0);

  for (int id = tree.size() - 1; id >= 0; --id) {
    const Node& node = tree.node(id);
    const auto uid = static_cast<std::size_t>(id);
    if (node.kind == GateKind::Leaf) {
      worst[uid] = {1.0, 1.0};
      continue;
    }
    const std::size_t k = node.children.size();
    if (k > 20) throw std::invalid_argument("fan-in too large for worst-case search");
    double all_ones = 0.0;
    for (int child : node.children) all_ones += worst[static_cast<std::size_t>(child)][1];
    worst[uid][0] = all_ones;

    double best = -1.0;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      std::vector<double> cost;
      std::vector<bool> value;
      for (std::size_t i = 0; i < k; ++i) {
        const bool is_zero = (mask >> i) & 1U;
        cost.push_back(worst[static_cast<std::size_t>(node.children[i])][is_zero ? 0 : 1]);
        value.push_back(!is_zero);
      }
      const double c = node_cost(cost, value);
      if (c > best + 1e-12) {
        best = c;
        zero_mask[uid] = mask;
      }
    }
    worst[uid][1] = best;
  }

  std::vector<std::uint8_t> bits(static_cast<std::size_t>(tree.leaf_count()), 0);
  std::function<void(int, bool)> assign = [&](int id, bool v) {
    const Node& node = tree.node(id);
    if (node.kind == GateKind::Leaf) {
      bits[static_cast<std::size_t>(node.variable - 1)] = v ? 1 : 0;
      return;
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const bool child_value = !v ? true : !((zero_mask[static_cast<std::size_t>(id)] >> i) & 1U);
      assign(node.children[i], child_value);
    }
  };
  assign(tree.root(), worst[0][1] > worst[0][0] + 1e-12);
  return Assignment(std::move(bits));
}

Assignment uniform_true_assignment(const NandTree& tree) {
  for (bool bit : {true, false}) {
    auto x = Assignment::constant(tree.leaf_count(), bit);
    if (evaluate(tree, x)) return x;
  }
  throw std::invalid_argument("no constant assignment makes this tree evaluate to 1");
}

}  // namespace nandwalk
