#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nandwalk {

enum class GateKind { Nand, And, Or, Leaf };

std::string_view to_string(GateKind kind);

struct Node {
  GateKind kind = GateKind::Leaf;
  std::vector<int> children;
  int variable = 0;  // 1-based for leaves, 0 for gates
};

/// Rooted read-once formula tree. Node ids follow pre-order: the root is 0
/// and every child id is larger than its parent id. Leaves carry the
/// variables 1..N, numbered left to right.
class NandTree {
 public:
  /// Validates the tree invariants; throws std::invalid_argument on violation.
  explicit NandTree(std::vector<Node> nodes);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  int root() const { return 0; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int depth() const { return depth_; }
  int leaf_count() const { return static_cast<int>(leaves_.size()); }

  /// Leaf node ids ordered by variable index (leaves()[i] holds x_{i+1}).
  const std::vector<int>& leaves() const { return leaves_; }
  int parent(int id) const { return parents_.at(static_cast<std::size_t>(id)); }
  int depth_of(int id) const { return depths_.at(static_cast<std::size_t>(id)); }
  /// Number of leaves in the subtree rooted at id.
  int subtree_leaves(int id) const { return subtree_leaves_.at(static_cast<std::size_t>(id)); }

  bool is_nand_only() const;
  bool is_binary() const;
  bool is_full_binary() const;

  /// Formula text in the parser's grammar.
  std::string to_formula() const;

 private:
  std::vector<Node> nodes_;
  std::vector<int> parents_;
  std::vector<int> depths_;
  std::vector<int> subtree_leaves_;
  std::vector<int> leaves_;
  int depth_ = 0;
};

/// The black-box input x_1..x_N.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<std::uint8_t> bits);
  /// Parses "1010" style bit strings (x_1 first).
  static Assignment from_string(std::string_view text);
  /// Bits of `value`, least significant bit first, as x_1..x_n.
  static Assignment from_index(std::uint64_t value, int n);
  static Assignment constant(int n, bool value);

  int size() const { return static_cast<int>(bits_.size()); }
  bool operator[](int i) const { return bits_.at(static_cast<std::size_t>(i)) != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  int ones() const;
  Assignment negated() const;
  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Counts logical oracle uses: one per input-dependent operator application
/// or leaf read. Continuous algorithms additionally accumulate evolution time.
class QueryLedger {
 public:
  void charge(std::uint64_t queries = 1) { count_ += queries; }
  void charge_time(double t) { hamiltonian_time_ += t; }
  std::uint64_t count() const { return count_; }
  double hamiltonian_time() const { return hamiltonian_time_; }

 private:
  std::uint64_t count_ = 0;
  double hamiltonian_time_ = 0.0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Grammar: formula := gate | var; gate := ("NAND"|"AND"|"OR") "(" formula
/// ("," formula)+ ")"; var := "x" positive-integer. Whitespace is ignored.
/// Variables are renumbered by order of appearance; the written indices only
/// have to be distinct.
NandTree parse_formula(std::string_view text);

/// Full binary NAND tree of the given depth (depth 0 is a single leaf).
NandTree full_binary_tree(int depth);

enum class Polarity { Keep, Negate };

struct NandConversion {
  NandTree tree;
  std::vector<Polarity> leaf_polarity;  // indexed by variable - 1
  Polarity root_polarity = Polarity::Keep;

  /// Evaluates the original formula through the NAND tree.
  bool evaluate_original(const Assignment& x) const;
};

/// De Morgan rewrite of a level-alternating AND/OR tree into a pure NAND tree
/// with input and output negations. Shape and fan-ins are preserved.
NandConversion to_nand(const NandTree& tree);

/// Bottom-up evaluation of AND/OR/NAND gates.
bool evaluate(const NandTree& tree, const Assignment& x);
/// Value of every node, indexed by node id.
std::vector<std::uint8_t> evaluate_all(const NandTree& tree, const Assignment& x);
/// Reads every leaf once through the ledger, then evaluates.
bool evaluate(const NandTree& tree, const Assignment& x, QueryLedger& ledger);

struct ExactRecurrence {};
struct MonteCarlo {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
};

struct QueryCostEstimate {
  double mean = 0.0;
  double standard_error = 0.0;  // zero for the exact recurrence
};

/// Expected leaf reads of the randomized short-circuit evaluator: each NAND
/// gate evaluates its unevaluated children in uniformly random order and
/// stops at the first child that returns 0.
QueryCostEstimate randomized_query_cost(const NandTree& tree, const Assignment& x, ExactRecurrence);
QueryCostEstimate randomized_query_cost(const NandTree& tree, const Assignment& x, MonteCarlo mc);

/// Assignment maximising the exact expected cost (dynamic programming over
/// node values; ties resolved towards value 0 and the leftmost children).
Assignment worst_case_assignment(const NandTree& tree);

/// Uniform-input family that evaluates to 1 on full binary trees: all ones
/// for even depth, all zeros for odd depth.
Assignment uniform_true_assignment(const NandTree& tree);

}  // namespace nandwalk
