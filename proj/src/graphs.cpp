#include "nandwalk/graphs.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace nandwalk {

namespace {

BasisId fnv1a(std::string_view text, BasisId hash = 1469598103934665603ULL) {
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace

std::string VertexId::str() const {
  switch (kind) {
    case Kind::Runway: return "runway:" + std::to_string(index);
    case Kind::Tail: return "tail:" + std::to_string(index);
    case Kind::Tree: return "tree:" + std::to_string(index);
    case Kind::Pendant: return "pendant:" + std::to_string(index);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// AugmentedGraph

AugmentedGraph::AugmentedGraph(Attachment attachment, int length, std::vector<VertexId> vertices,
                               std::vector<Edge> edges, Assignment binding, std::vector<int> leaf_counts)
    : attachment_(attachment),
      length_(length),
      vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      binding_(std::move(binding)),
      leaf_counts_(std::move(leaf_counts)),
      degree_(vertices_.size(), 0) {
  for (const Edge& e : edges_) {
    if (e.u == e.v) throw std::invalid_argument("self loop in augmented graph");
    ++degree_.at(static_cast<std::size_t>(e.u));
    ++degree_.at(static_cast<std::size_t>(e.v));
  }
  basis_id_ = fnv1a(attachment_ == Attachment::Runway ? "runway|" : "tail|");
  for (const auto& v : vertices_) basis_id_ = fnv1a(v.str() + ";", basis_id_);
}

std::optional<int> AugmentedGraph::find(const VertexId& v) const {
  VertexId key = v;
  if (key.kind == VertexId::Kind::Tail && key.index == 0) key = VertexId::tree(0);
  // Canonical order is sorted within each kind, so a binary search per kind
  // would do; graphs are small enough for a linear scan.
  const auto it = std::find(vertices_.begin(), vertices_.end(), key);
  if (it == vertices_.end()) return std::nullopt;
  return static_cast<int>(it - vertices_.begin());
}

int AugmentedGraph::index_of(const VertexId& v) const {
  if (auto i = find(v)) return *i;
  throw std::out_of_range("vertex " + v.str() + " not in graph");
}

int AugmentedGraph::degree(int index) const { return degree_.at(static_cast<std::size_t>(index)); }

nlohmann::json AugmentedGraph::to_json() const {
  nlohmann::json out;
  out["vertices"] = nlohmann::json::array();
  for (const auto& v : vertices_) out["vertices"].push_back(v.str());
  out["edges"] = nlohmann::json::array();
  for (const auto& e : edges_) out["edges"].push_back({e.u, e.v, e.weight});
  return out;
}

// ---------------------------------------------------------------------------
// Builders

namespace {

struct GraphDraft {
  std::vector<VertexId> vertices;
  std::vector<int> leaf_counts;
  std::vector<Edge> edges;
  std::map<VertexId, int> index;

  int add(VertexId v, int leaves) {
    const int i = static_cast<int>(vertices.size());
    vertices.push_back(v);
    leaf_counts.push_back(leaves);
    index.emplace(v, i);
    return i;
  }
  void connect(VertexId a, VertexId b) { edges.push_back({index.at(a), index.at(b), 1.0}); }
};

void require_nand(const NandTree& tree, const Assignment& x) {
  if (!tree.is_nand_only()) throw std::invalid_argument("augmented graphs need a NAND-only tree");
  if (x.size() != tree.leaf_count()) throw std::invalid_argument("assignment length mismatch");
}

void add_tree_and_pendants(GraphDraft& g, const NandTree& tree, const Assignment& x, bool pendants) {
  for (int id = 0; id < tree.size(); ++id) g.add(VertexId::tree(id), tree.subtree_leaves(id));
  if (pendants) {
    for (int var = 0; var < tree.leaf_count(); ++var)
      if (x[var]) g.add(VertexId::pendant(tree.leaves()[static_cast<std::size_t>(var)]), 0);
  }
  for (int id = 0; id < tree.size(); ++id)
    for (int child : tree.node(id).children) g.connect(VertexId::tree(id), VertexId::tree(child));
  if (pendants) {
    for (int var = 0; var < tree.leaf_count(); ++var) {
      const int leaf = tree.leaves()[static_cast<std::size_t>(var)];
      if (x[var]) g.connect(VertexId::tree(leaf), VertexId::pendant(leaf));
    }
  }
}

}  // namespace

AugmentedGraph build_fgg_graph(const NandTree& tree, const Assignment& x, int half_length) {
  require_nand(tree, x);
  if (half_length < 1) throw std::invalid_argument("runway half-length M must be at least 1");
  GraphDraft g;
  const int n_leaves = tree.leaf_count();
  for (int n = -half_length; n <= half_length; ++n) g.add(VertexId::runway(n), n_leaves);
  add_tree_and_pendants(g, tree, x, true);
  for (int n = -half_length; n < half_length; ++n) g.connect(VertexId::runway(n), VertexId::runway(n + 1));
  g.connect(VertexId::runway(0), VertexId::tree(0));
  return AugmentedGraph(AugmentedGraph::Attachment::Runway, half_length, std::move(g.vertices),
                        std::move(g.edges), x, std::move(g.leaf_counts));
}

AugmentedGraph build_tail_graph(const NandTree& tree, const Assignment& x, int tail_length, bool pendants) {
  require_nand(tree, x);
  if (tail_length < 1) throw std::invalid_argument("tail parameter L must be at least 1");
  GraphDraft g;
  const int n_leaves = tree.leaf_count();
  for (int k = 1; k <= 2 * tail_length; ++k) g.add(VertexId::tail(k), n_leaves);
  add_tree_and_pendants(g, tree, x, pendants);
  g.connect(VertexId::tree(0), VertexId::tail(1));
  for (int k = 1; k < 2 * tail_length; ++k) g.connect(VertexId::tail(k), VertexId::tail(k + 1));
  // The pendant-free graph is the same for every x; only keep x as binding
  // when it shaped the graph.
  Assignment binding = pendants ? x : Assignment::constant(x.size(), false);
  return AugmentedGraph(AugmentedGraph::Attachment::Tail, tail_length, std::move(g.vertices), std::move(g.edges),
                        std::move(binding), std::move(g.leaf_counts));
}

double unit_weight(const EdgeContext&) { return 1.0; }

ComplexMatrix adjacency_matrix(const AugmentedGraph& g, const WeightFunction& weight) {
  const int n = g.dimension();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const EdgeContext ctx{g.vertices()[static_cast<std::size_t>(e.u)], g.vertices()[static_cast<std::size_t>(e.v)],
                          g.leaf_count_below(e.u), g.leaf_count_below(e.v)};
    const double w = weight ? weight(ctx) * e.weight : e.weight;
    if (!(w > 0.0)) throw std::invalid_argument("non-positive weight on edge " + ctx.u.str() + " - " + ctx.v.str());
    h(e.u, e.v) += w;
    h(e.v, e.u) += w;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Edge-state space

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Down: return "down";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
  }
  return "?";
}

EdgeStateSpace::EdgeStateSpace(int tail_length, std::vector<EdgeState> states, std::vector<int> pairing,
                               std::vector<VertexBlock> blocks)
    : tail_length_(tail_length), states_(std::move(states)), pairing_(std::move(pairing)), blocks_(std::move(blocks)) {
  if (pairing_.size() != states_.size()) throw std::invalid_argument("pairing size mismatch");
  for (std::size_t s = 0; s < pairing_.size(); ++s) {
    const auto p = static_cast<std::size_t>(pairing_[s]);
    if (p >= pairing_.size() || p == s || static_cast<std::size_t>(pairing_[p]) != s)
      throw std::invalid_argument("edge pairing is not a fixed-point-free involution");
  }
  basis_id_ = fnv1a("edges|");
  for (const auto& st : states_)
    basis_id_ = fnv1a(st.vertex.str() + "/" + std::string(to_string(st.direction)) + ";", basis_id_);
}

std::optional<int> EdgeStateSpace::find(const VertexId& v, Direction d) const {
  const auto it = std::find(states_.begin(), states_.end(), EdgeState{v, d});
  if (it == states_.end()) return std::nullopt;
  return static_cast<int>(it - states_.begin());
}

int EdgeStateSpace::index_of(const VertexId& v, Direction d) const {
  if (auto i = find(v, d)) return *i;
  throw std::out_of_range("edge state " + v.str() + "/" + std::string(to_string(d)) + " not in space");
}

EdgeStateSpace build_edge_space(const NandTree& tree, int tail_length) {
  if (tail_length < 1) throw std::invalid_argument("tail parameter L must be at least 1");
  if (!tree.is_binary()) throw std::invalid_argument("coined walk needs a binary tree (fan-in 2 at every gate)");

  std::vector<EdgeState> states;
  std::vector<EdgeStateSpace::VertexBlock> blocks;
  const int sites = 2 * tail_length;
  const auto add_block = [&](VertexId v, std::initializer_list<Direction> dirs) {
    EdgeStateSpace::VertexBlock block{v, {}};
    for (Direction d : dirs) {
      block.states.push_back(static_cast<int>(states.size()));
      states.push_back({v, d});
    }
    blocks.push_back(std::move(block));
  };

  for (int k = 1; k <= sites; ++k) {
    if (k == sites) add_block(VertexId::tail(k), {Direction::Left});
    else add_block(VertexId::tail(k), {Direction::Left, Direction::Right});
  }
  for (int id = 0; id < tree.size(); ++id) {
    if (tree.node(id).kind == GateKind::Leaf) add_block(VertexId::tree(id), {Direction::Down});
    else add_block(VertexId::tree(id), {Direction::Down, Direction::Left, Direction::Right});
  }

  const auto index = [&](VertexId v, Direction d) {
    const auto it = std::find(states.begin(), states.end(), EdgeState{v, d});
    return static_cast<int>(it - states.begin());
  };
  std::vector<int> pairing(states.size(), -1);
  const auto pair = [&](int a, int b) {
    pairing[static_cast<std::size_t>(a)] = b;
    pairing[static_cast<std::size_t>(b)] = a;
  };
  pair(index(VertexId::tree(0), Direction::Down), index(VertexId::tail(1), Direction::Left));
  for (int k = 1; k < sites; ++k)
    pair(index(VertexId::tail(k), Direction::Right), index(VertexId::tail(k + 1), Direction::Left));
  for (int id = 0; id < tree.size(); ++id) {
    const auto& children = tree.node(id).children;
    if (children.empty()) continue;
    pair(index(VertexId::tree(id), Direction::Left), index(VertexId::tree(children[0]), Direction::Down));
    pair(index(VertexId::tree(id), Direction::Right), index(VertexId::tree(children[1]), Direction::Down));
  }
  return EdgeStateSpace(tail_length, std::move(states), std::move(pairing), std::move(blocks));
}

}  // namespace nandwalk
