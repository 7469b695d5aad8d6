#include "nandwalk/discrete_reflections.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nandwalk/continuous_tail.hpp"

namespace nandwalk {

namespace {

void copy_padded(const NandTree& tree, const Assignment& x, int id, std::vector<Node>& out,
                 std::vector<std::uint8_t>& bits) {
  const Node& node = tree.node(id);
  const std::size_t self = out.size();
  if (node.kind == GateKind::Leaf) {
    const bool value = x[node.variable - 1];
    if (tree.depth_of(id) % 2 == 1) {
      out.push_back({GateKind::Nand, {static_cast<int>(self + 1)}, 0});
      out.push_back({GateKind::Leaf, {}, node.variable});
      bits.push_back(value ? 0 : 1);
    } else {
      out.push_back({GateKind::Leaf, {}, node.variable});
      bits.push_back(value ? 1 : 0);
    }
    return;
  }
  out.push_back({node.kind, {}, 0});
  for (int child : node.children) {
    out[self].children.push_back(static_cast<int>(out.size()));
    copy_padded(tree, x, child, out, bits);
  }
}

}  // namespace

PaddedInstance pad_parity(const NandTree& tree, const Assignment& x) {
  if (x.size() != tree.leaf_count()) throw std::invalid_argument("assignment length mismatch");
  bool any_odd = false;
  for (int leaf : tree.leaves()) any_odd = any_odd || tree.depth_of(leaf) % 2 == 1;
  if (!any_odd) return {tree, x, false};
  std::vector<Node> nodes;
  std::vector<std::uint8_t> bits;
  copy_padded(tree, x, tree.root(), nodes, bits);
  // Leaves are visited left to right, so variables keep their order.
  return {NandTree(std::move(nodes)), Assignment(std::move(bits)), true};
}

AmbiguousKernelError::AmbiguousKernelError(double below, double above)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "kernel tolerance falls inside a spectral cluster (eigenvalues " << below << " and " << above << ")";
        return msg.str();
      }()),
      below_(below),
      above_(above) {}

int default_reflection_tail_length(int leaf_count) { return 2 * default_tail_length(leaf_count); }

ReflectionPair build_reflections(const NandTree& tree, const Assignment& x, int tail_length, double kernel_tol,
                                 bool pad) {
  if (!tree.is_nand_only()) throw std::invalid_argument("reflections need a NAND tree");
  PaddedInstance inst = pad ? pad_parity(tree, x) : PaddedInstance{tree, x, false};
  AugmentedGraph g = build_tail_graph(inst.tree, inst.x, tail_length, false);
  const Eigen::MatrixXd h = adjacency_matrix(g).real();
  const SpectralDecomposition d = eig_hermitian(h.cast<std::complex<double>>());
  const Eigen::VectorXd lambda = d.eigenvalues.real();

  double below = 0.0;
  double above = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> kernel_cols;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double a = std::abs(lambda(j));
    if (a <= kernel_tol) {
      kernel_cols.push_back(j);
      below = std::max(below, a);
    } else {
      above = std::min(above, a);
    }
  }
  if (below > kernel_tol * 1e-2 || above < kernel_tol * 1e2) throw AmbiguousKernelError(below, above);

  const Eigen::Index n = h.rows();
  Eigen::MatrixXd k(n, static_cast<Eigen::Index>(kernel_cols.size()));
  for (std::size_t c = 0; c < kernel_cols.size(); ++c)
    k.col(static_cast<Eigen::Index>(c)) = d.eigenvectors.col(kernel_cols[c]).real();
  // H_tree is real, so a real kernel basis exists; re-orthonormalise the real
  // parts in case the solver returned a complex rotation of it.
  if (k.cols() > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(k);
    k = qr.householderQ() * Eigen::MatrixXd::Identity(n, k.cols());
  }

  Eigen::VectorXd input = Eigen::VectorXd::Ones(n);
  for (int var = 0; var < inst.x.size(); ++var)
    if (inst.x[var]) input(g.index_of(VertexId::tree(inst.tree.leaves()[static_cast<std::size_t>(var)]))) = -1.0;

  Eigen::MatrixXd u_tree = 2.0 * k * k.transpose() - Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd u = input.asDiagonal() * u_tree;
  return {std::move(inst), std::move(g), std::move(k), std::move(u_tree), std::move(input), std::move(u)};
}

StateVector reflection_start(const ReflectionPair& pair) { return psi_start_tail(pair.graph); }

WalkDecision decide_reflections(const ReflectionPair& pair, const StateVector& start, double phase_threshold,
                                const QpeSettings& qpe, QueryLedger* ledger) {
  require_unit(start);
  require_basis(start, BasisTag::vertices(pair.graph));
  const SpectralDecomposition d = eig_unitary(pair.u.cast<std::complex<double>>());
  WalkDecision out;
  out.gap = summarize_gap("phase", d.phases().cwiseAbs(), overlap_weights(d, start), 1e-8, 1e-8, phase_threshold);
  out.decision = !(out.gap.threshold_mass > 0.5);
  out.estimate = qpe_simulate(d, start, qpe.bits, qpe.shots, qpe.seed, ledger);
  return out;
}

ProjectionBoundReport projection_bound_check(const ReflectionPair& pair, const StateVector& start, double orth_tol) {
  if (!evaluate(pair.instance.tree, pair.instance.x))
    throw std::invalid_argument("projection_bound_check is only meaningful when F = 1");
  require_unit(start);
  const Eigen::MatrixXd& k = pair.kernel;
  Eigen::VectorXd marked = (pair.u_input.array() < 0).cast<double>();
  ProjectionBoundReport report;

  if (k.cols() > 0) {
    const Eigen::MatrixXd gram = k.transpose() * marked.asDiagonal() * k;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    const Eigen::MatrixXd basis = k * solver.eigenvectors();
    const Eigen::VectorXcd ov = basis.cast<std::complex<double>>().adjoint() * start.amplitudes;
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      const double w = std::norm(ov(c));
      if (w <= orth_tol) continue;
      report.entries.push_back({std::sqrt(std::max(solver.eigenvalues()(c), 0.0)), w});
      if (!report.epsilon || report.entries.back().marked_norm < *report.epsilon)
        report.epsilon = report.entries.back().marked_norm;
    }
  }

  const SpectralDecomposition d = eig_unitary(pair.u.cast<std::complex<double>>());
  const Eigen::VectorXd w = overlap_weights(d, start);
  const Eigen::VectorXd ph = d.phases();
  report.phase_gap = std::numeric_limits<double>::infinity();
  report.chord_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) <= orth_tol) continue;
    report.phase_gap = std::min(report.phase_gap, std::abs(ph(j)));
    report.chord_gap = std::min(report.chord_gap, std::abs(d.eigenvalues(j) - 1.0));
  }
  if (report.epsilon) report.holds = report.phase_gap >= *report.epsilon - 1e-6;
  return report;
}

PhaseCalibration calibrate_phase_threshold(const NandTree& tree, const std::vector<Assignment>& inputs,
                                           int tail_length) {
  PhaseCalibration cal;
  cal.min_gap = std::numeric_limits<double>::infinity();
  for (const Assignment& x : inputs) {
    if (!evaluate(tree, x)) continue;
    const ReflectionPair pair = build_reflections(tree, x, tail_length);
    const SpectralDecomposition d = eig_unitary(pair.u.cast<std::complex<double>>());
    const GapReport gap =
        summarize_gap("phase", d.phases().cwiseAbs(), overlap_weights(d, reflection_start(pair)), 1e-8, 1e-8, 0.0);
    if (gap.min_relevant_distance) cal.min_gap = std::min(cal.min_gap, *gap.min_relevant_distance);
    ++cal.instances;
  }
  if (cal.instances == 0) throw std::invalid_argument("phase calibration needs at least one F = 1 input");
  cal.threshold = 0.5 * cal.min_gap;
  return cal;
}

}  // namespace nandwalk
