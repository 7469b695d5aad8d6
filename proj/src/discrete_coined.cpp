#include "nandwalk/discrete_coined.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nandwalk/continuous_tail.hpp"

namespace nandwalk {

namespace {

using cd = std::complex<double>;

Eigen::MatrixXd grover(const Eigen::VectorXd& u) {
  return 2.0 * u * u.transpose() - Eigen::MatrixXd::Identity(u.size(), u.size());
}

CoinedWalk assemble(EdgeStateSpace space, const NandTree& tree, const Assignment& x, CoinedVariant variant) {
  if (!tree.is_nand_only()) throw std::invalid_argument("coined walk needs a NAND tree");
  if (x.size() != tree.leaf_count()) throw std::invalid_argument("assignment length mismatch");
  const int n = space.dimension();
  const int end_site = space.tail_sites();
  Eigen::MatrixXd coin = Eigen::MatrixXd::Zero(n, n);

  std::vector<int> leaf_var(static_cast<std::size_t>(tree.size()), -1);
  for (int var = 0; var < tree.leaf_count(); ++var) leaf_var[static_cast<std::size_t>(tree.leaves()[static_cast<std::size_t>(var)])] = var;

  for (const auto& block : space.blocks()) {
    const auto k = static_cast<Eigen::Index>(block.states.size());
    Eigen::MatrixXd c;
    const VertexId& v = block.vertex;
    if (v.kind == VertexId::Kind::Tail && v.index == end_site) {
      c = Eigen::MatrixXd::Identity(k, k);
    } else if (v.kind == VertexId::Kind::Tree && leaf_var[static_cast<std::size_t>(v.index)] >= 0) {
      c = Eigen::MatrixXd::Identity(k, k) * (x[leaf_var[static_cast<std::size_t>(v.index)]] ? -1.0 : 1.0);
    } else if (variant == CoinedVariant::ShortTail && v.kind == VertexId::Kind::Tail && v.index == 1) {
      c = grover(short_tail_coin(tree.leaf_count()).state);
    } else {
      c = grover(Eigen::VectorXd::Constant(k, 1.0 / std::sqrt(static_cast<double>(k))));
    }
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) coin(block.states[static_cast<std::size_t>(i)], block.states[static_cast<std::size_t>(j)]) = c(i, j);
  }

  Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) shift(space.pairing()[static_cast<std::size_t>(s)], s) = 1.0;
  Eigen::MatrixXd walk = shift * coin;
  return {std::move(space), std::move(coin), std::move(shift), std::move(walk), variant, tree.leaf_count()};
}

}  // namespace

std::string_view to_string(CoinedVariant v) { return v == CoinedVariant::LongTail ? "long-tail" : "short-tail"; }

int default_coined_tail_length(int leaf_count) { return 2 * default_tail_length(leaf_count); }

ShortTailCoin short_tail_coin(int leaf_count) {
  if (leaf_count < 2) throw std::invalid_argument("short-tail coin needs N >= 2");
  const double n = leaf_count;
  ShortTailCoin c;
  c.leaf_count = leaf_count;
  c.state << std::sqrt(1.0 - 1.0 / std::sqrt(n)), std::pow(n, -0.25);
  return c;
}

CoinedWalk build_coined_walk(const NandTree& tree, const Assignment& x, int tail_length) {
  return assemble(build_edge_space(tree, tail_length), tree, x, CoinedVariant::LongTail);
}

CoinedWalk build_short_tail_walk(const NandTree& tree, const Assignment& x) {
  short_tail_coin(tree.leaf_count());  // validates N
  return assemble(build_edge_space(tree, 1), tree, x, CoinedVariant::ShortTail);
}

CoinedWalk build_walk(CoinedVariant variant, const NandTree& tree, const Assignment& x, int tail_length) {
  return variant == CoinedVariant::LongTail ? build_coined_walk(tree, x, tail_length) : build_short_tail_walk(tree, x);
}

StateVector psi_start_coined(const CoinedWalk& walk) {
  if (walk.variant != CoinedVariant::LongTail) throw std::invalid_argument("psi_start_coined needs the long-tail walk");
  const EdgeStateSpace& sp = walk.space;
  const int tail = sp.tail_length();
  StateVector psi{Eigen::VectorXcd::Zero(sp.dimension()), BasisTag::edges(sp)};
  // Site 0 is the root; its state on the tail edge is "down".
  const auto at = [&](int site, Direction d) {
    if (site == 0) return sp.index_of(VertexId::tree(0), Direction::Down);
    return sp.index_of(VertexId::tail(site), d);
  };
  const double amp = 1.0 / std::sqrt(4.0 * tail);
  const cd i{0.0, 1.0};
  for (int k = 0; k < tail; ++k) {
    const double s = (k % 2 == 0 ? amp : -amp);
    psi.amplitudes(at(2 * k, Direction::Right)) += s;
    psi.amplitudes(at(2 * k + 1, Direction::Left)) += -i * s;
    psi.amplitudes(at(2 * k + 1, Direction::Right)) += i * s;
    psi.amplitudes(at(2 * k + 2, Direction::Left)) += -s;
  }
  return psi;
}

StateVector coined_start(const CoinedWalk& walk) {
  if (walk.variant == CoinedVariant::LongTail) return psi_start_coined(walk);
  StateVector psi{Eigen::VectorXcd::Zero(walk.space.dimension()), BasisTag::edges(walk.space)};
  psi.amplitudes(walk.space.index_of(VertexId::tail(2), Direction::Left)) = 1.0;
  return psi;
}

WalkDecision decide_coined(const CoinedWalk& walk, const StateVector& start, double re_threshold,
                           double mass_threshold, const QpeSettings& qpe, QueryLedger* ledger) {
  require_unit(start);
  require_basis(start, BasisTag::edges(walk.space));
  const SpectralDecomposition d = eig_unitary(walk.walk.cast<cd>());
  WalkDecision out;
  out.gap = summarize_gap("real-part", d.eigenvalues.real().cwiseAbs(), overlap_weights(d, start), 1e-8, 1e-8,
                          re_threshold);
  out.decision = !(out.gap.threshold_mass > mass_threshold);
  out.estimate = qpe_simulate(d, start, qpe.bits, qpe.shots, qpe.seed, ledger);
  return out;
}

ClusterOverlap eigenvalue_cluster_overlap(const CoinedWalk& walk, const StateVector& start, cd target,
                                          double radius) {
  require_unit(start);
  const SpectralDecomposition d = eig_unitary(walk.walk.cast<cd>());
  const Eigen::VectorXd w = overlap_weights(d, start);
  ClusterOverlap out;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (std::abs(d.eigenvalues(j) - target) > radius) continue;
    out.mass += w(j);
    ++out.size;
  }
  // The best unit vector in the cluster is the normalised projection, at
  // distance sqrt(2 - 2 sqrt(mass)) from the start state.
  out.distance = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::sqrt(out.mass)));
  return out;
}

double ordering_spectrum_gap(const CoinedWalk& walk) {
  const Eigen::VectorXcd a = eig_unitary(walk.walk.cast<cd>()).eigenvalues;
  const Eigen::VectorXcd b = eig_unitary((walk.coin * walk.shift).cast<cd>()).eigenvalues;
  // Symmetric nearest-neighbour distance; avoids pairing trouble at the
  // -pi/pi seam.
  double worst = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXcd& p = pass == 0 ? a : b;
    const Eigen::VectorXcd& q = pass == 0 ? b : a;
    for (Eigen::Index i = 0; i < p.size(); ++i) worst = std::max(worst, (q.array() - p(i)).abs().minCoeff());
  }
  return worst;
}

CoinedCalibration calibrate_coined(CoinedVariant variant, const NandTree& tree, const std::vector<Assignment>& inputs,
                                   int tail_length, bool calibrate_mass) {
  CoinedCalibration cal;
  cal.min_gap = std::numeric_limits<double>::infinity();
  cal.min_zero_mass = std::numeric_limits<double>::infinity();
  for (const Assignment& x : inputs) {
    const CoinedWalk walk = build_walk(variant, tree, x, tail_length);
    const SpectralDecomposition d = eig_unitary(walk.walk.cast<cd>());
    const GapReport gap = summarize_gap("real-part", d.eigenvalues.real().cwiseAbs(),
                                        overlap_weights(d, coined_start(walk)), 1e-8, 1e-8, 0.0);
    if (evaluate(tree, x)) {
      if (gap.min_relevant_distance) cal.min_gap = std::min(cal.min_gap, *gap.min_relevant_distance);
    } else {
      cal.min_zero_mass = std::min(cal.min_zero_mass, gap.reference_mass);
    }
    ++cal.instances;
  }
  if (!std::isfinite(cal.min_gap)) throw std::invalid_argument("coined calibration needs at least one F = 1 input");
  cal.re_threshold = 0.5 * cal.min_gap;
  if (calibrate_mass) {
    if (!std::isfinite(cal.min_zero_mass))
      throw std::invalid_argument("mass calibration needs at least one F = 0 input");
    cal.mass_threshold = 0.5 * cal.min_zero_mass;
  }
  if (!std::isfinite(cal.min_zero_mass)) cal.min_zero_mass = 0.0;
  return cal;
}

}  // namespace nandwalk
