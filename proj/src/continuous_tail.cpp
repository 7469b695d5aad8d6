#include "nandwalk/continuous_tail.hpp"

#include <cmath>
#include <numbers>

namespace nandwalk {

StateVector psi_start_tail(const AugmentedGraph& g) {
  if (g.attachment() != AugmentedGraph::Attachment::Tail) throw std::invalid_argument("psi_start_tail needs a tail graph");
  const int tail = g.length();
  StateVector psi{Eigen::VectorXcd::Zero(g.dimension()), BasisTag::vertices(g)};
  const double amp = 1.0 / std::sqrt(tail + 1.0);
  for (int k = 0; k <= tail; ++k) psi.amplitudes(g.index_of(VertexId::tail(2 * k))) = (k % 2 == 0 ? amp : -amp);
  return psi;
}

int default_tail_length(int leaf_count) {
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(leaf_count)) - 1e-12));
}

namespace {

struct TailSpectrum {
  AugmentedGraph graph;
  SpectralDecomposition decomposition;
  StateVector start;
};

TailSpectrum tail_spectrum(const NandTree& tree, const Assignment& x, int tail_length) {
  AugmentedGraph g = build_tail_graph(tree, x, tail_length, true);
  SpectralDecomposition d = eig_hermitian(adjacency_matrix(g));
  StateVector start = psi_start_tail(g);
  return {std::move(g), std::move(d), std::move(start)};
}

GapReport summarize(const TailSpectrum& s, double zero_tol, double orth_tol, double threshold) {
  return summarize_gap("eigenvalue", s.decomposition.eigenvalues.real().cwiseAbs(),
                       overlap_weights(s.decomposition, s.start), zero_tol, orth_tol, threshold);
}

}  // namespace

GapReport gap_report(const NandTree& tree, const Assignment& x, int tail_length, double zero_tol, double orth_tol) {
  return summarize(tail_spectrum(tree, x, tail_length), zero_tol, orth_tol, zero_tol);
}

TailDecision decide_tail(const NandTree& tree, const Assignment& x, int tail_length, const TailOptions& options,
                         QueryLedger* ledger) {
  const double n = tree.leaf_count();
  const double precision = options.precision.value_or(1.0 / (2.0 * std::sqrt(n)));
  if (!(precision > 0)) throw std::invalid_argument("precision must be positive");

  const TailSpectrum s = tail_spectrum(tree, x, tail_length);
  const double spread = s.decomposition.eigenvalues.real().cwiseAbs().maxCoeff();
  const double step = options.step.value_or(std::numbers::pi / (1.0 + spread));
  if (!(step > 0) || step * spread >= std::numbers::pi)
    throw BandAliasingError("evolution step aliases the spectrum onto itself (step * max|lambda| >= pi)");

  // exp(-iH step) shares H's eigenvectors.
  SpectralDecomposition ud;
  ud.eigenvectors = s.decomposition.eigenvectors;
  ud.eigenvalues.resize(s.decomposition.dimension());
  for (int j = 0; j < s.decomposition.dimension(); ++j)
    ud.eigenvalues(j) = std::exp(std::complex<double>(0.0, -s.decomposition.eigenvalues(j).real() * step));
  ud.residual = s.decomposition.residual * step;

  TailDecision out;
  out.estimate = qpe_simulate(ud, s.start, options.bits, options.shots, options.seed, ledger);
  out.step = step;
  out.precision = precision;
  out.decision = !(std::abs(out.estimate.modal_phase()) < precision * step);
  out.gap = summarize(s, 1e-10, 1e-8, precision);
  return out;
}

double tail_survival_probability(const NandTree& tree, const Assignment& x, int tail_length, double t) {
  const TailSpectrum s = tail_spectrum(tree, x, tail_length);
  const StateVector end = evolve(s.decomposition, t, s.start);
  return std::norm(s.start.amplitudes.dot(end.amplitudes));
}

}  // namespace nandwalk
