#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nandwalk/formula.hpp"

namespace nandwalk {

using ComplexMatrix = Eigen::MatrixXcd;

/// Vertex labels of the augmented graphs. Tail site 0 is an alias of the
/// tree root and is never stored as its own vertex.
struct VertexId {
  enum class Kind { Runway, Tail, Tree, Pendant };
  Kind kind = Kind::Tree;
  int index = 0;  // runway site n, tail site k, tree node id, or pendant's leaf node id

  static VertexId runway(int n) { return {Kind::Runway, n}; }
  static VertexId tail(int k) { return {Kind::Tail, k}; }
  static VertexId tree(int node) { return {Kind::Tree, node}; }
  static VertexId pendant(int leaf_node) { return {Kind::Pendant, leaf_node}; }

  std::string str() const;
  friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

struct Edge {
  int u = 0;  // vertex indices into AugmentedGraph::vertices()
  int v = 0;
  double weight = 1.0;
};

/// What a weight callback gets to see about an edge. Leaf counts are the
/// number of formula leaves hanging below each endpoint: the subtree size
/// for tree vertices, N for runway and tail sites, 0 for pendants.
struct EdgeContext {
  VertexId u;
  VertexId v;
  int leaves_u = 0;
  int leaves_v = 0;
};

using WeightFunction = std::function<double(const EdgeContext&)>;

/// 64-bit fingerprint identifying a basis (vertex list or edge-state list).
using BasisId = std::uint64_t;

class AugmentedGraph {
 public:
  enum class Attachment { Runway, Tail };

  AugmentedGraph(Attachment attachment, int length, std::vector<VertexId> vertices,
                 std::vector<Edge> edges, Assignment binding, std::vector<int> leaf_counts);

  Attachment attachment() const { return attachment_; }
  /// Runway half-length M, or tail parameter L (2L tail sites).
  int length() const { return length_; }
  const std::vector<VertexId>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Assignment& binding() const { return binding_; }
  int dimension() const { return static_cast<int>(vertices_.size()); }

  /// Index of a vertex in the canonical order; Tail(0) resolves to the root.
  int index_of(const VertexId& v) const;
  std::optional<int> find(const VertexId& v) const;
  int degree(int index) const;
  int leaf_count_below(int index) const { return leaf_counts_.at(static_cast<std::size_t>(index)); }
  BasisId basis_id() const { return basis_id_; }

  /// Debug/golden dump: {"vertices": [ids], "edges": [[i, j, w], ...]}.
  nlohmann::json to_json() const;

 private:
  Attachment attachment_;
  int length_;
  std::vector<VertexId> vertices_;
  std::vector<Edge> edges_;
  Assignment binding_;
  std::vector<int> leaf_counts_;
  std::vector<int> degree_;
  BasisId basis_id_ = 0;
};

/// Runway sites -M..M chained, root attached to site 0, one pendant per leaf
/// with x_i = 1.
AugmentedGraph build_fgg_graph(const NandTree& tree, const Assignment& x, int half_length);

/// Tail sites 1..2L chained off the root (site 0). Pendants follow x when
/// `pendants` is true; without them the graph does not depend on x.
AugmentedGraph build_tail_graph(const NandTree& tree, const Assignment& x, int tail_length, bool pendants);

double unit_weight(const EdgeContext&);

/// Weighted adjacency matrix in the graph's vertex order (real symmetric,
/// stored complex so it can be fed straight to the spectral routines).
ComplexMatrix adjacency_matrix(const AugmentedGraph& g, const WeightFunction& weight = unit_weight);

enum class Direction { Down, Left, Right };
std::string_view to_string(Direction d);

struct EdgeState {
  VertexId vertex;
  Direction direction;
  friend bool operator==(const EdgeState&, const EdgeState&) = default;
};

/// Directed edge states |v, d> of the coined walk on the tail graph without
/// pendants. On the tail, "left" points towards the root and "right" away
/// from it; the root's "down" state lies on the root-to-tail edge.
class EdgeStateSpace {
 public:
  struct VertexBlock {
    VertexId vertex;
    std::vector<int> states;  // state indices in direction order
  };

  EdgeStateSpace(int tail_length, std::vector<EdgeState> states, std::vector<int> pairing,
                 std::vector<VertexBlock> blocks);

  /// Tail parameter L: the tail has 2L sites.
  int tail_length() const { return tail_length_; }
  int tail_sites() const { return 2 * tail_length_; }
  const std::vector<EdgeState>& states() const { return states_; }
  /// pairing()[s] is the state on the other end of s's edge.
  const std::vector<int>& pairing() const { return pairing_; }
  const std::vector<VertexBlock>& blocks() const { return blocks_; }
  int dimension() const { return static_cast<int>(states_.size()); }
  int index_of(const VertexId& v, Direction d) const;
  std::optional<int> find(const VertexId& v, Direction d) const;
  BasisId basis_id() const { return basis_id_; }

 private:
  int tail_length_;
  std::vector<EdgeState> states_;
  std::vector<int> pairing_;
  std::vector<VertexBlock> blocks_;
  BasisId basis_id_ = 0;
};

/// Requires a binary tree; throws std::invalid_argument on other fan-ins.
EdgeStateSpace build_edge_space(const NandTree& tree, int tail_length);

}  // namespace nandwalk
