#include "nandwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

namespace nandwalk {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;

double wrap_phase(double phase) {
  // std::arg already lands in [-pi, pi]; fold -pi onto pi.
  return phase <= -kPi ? phase + 2 * kPi : phase;
}

double max_column_residual(const MatrixXcd& a, const MatrixXcd& v, const Eigen::VectorXcd& lambda) {
  if (v.cols() == 0) return 0.0;
  MatrixXcd r = a * v - v * lambda.asDiagonal();
  return r.colwise().norm().maxCoeff();
}

bool is_real(const MatrixXcd& a) { return a.imag().cwiseAbs().maxCoeff() == 0.0; }

// Eigenpairs of a Hermitian matrix, ascending, using the real solver when the
// matrix has no imaginary part.
std::pair<VectorXd, MatrixXcd> hermitian_pairs(const MatrixXcd& h) {
  if (h.rows() == 0) return {VectorXd(), MatrixXcd()};
  if (is_real(h)) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h.real());
    if (solver.info() != Eigen::Success) throw NonConvergenceError("real symmetric eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors().cast<cd>()};
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw NonConvergenceError("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace

void require_unit(const StateVector& psi, double tol) {
  const double n = psi.norm();
  if (!(std::abs(n - 1.0) <= tol))
    throw std::invalid_argument("state must have unit norm (got " + std::to_string(n) + ")");
}

void require_basis(const StateVector& psi, const BasisTag& basis) {
  if (!(psi.basis == basis)) throw std::invalid_argument("state belongs to a different basis");
}

Eigen::VectorXd SpectralDecomposition::phases() const {
  VectorXd out(eigenvalues.size());
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) out(j) = wrap_phase(std::arg(eigenvalues(j)));
  return out;
}

SpectralDecomposition eig_hermitian(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("eig_hermitian needs a square matrix");
  if (h.size() > 0 && (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
  auto [values, vectors] = hermitian_pairs(h);
  SpectralDecomposition d;
  d.eigenvalues = values.cast<cd>();
  d.eigenvectors = std::move(vectors);
  d.residual = max_column_residual(h, d.eigenvectors, d.eigenvalues);
  return d;
}

// A unitary commutes with its Hermitian part (U + U^dagger)/2, whose
// eigenvalues are cos(phase). Diagonalising the Hermitian part first splits
// the space into small clusters (the +-phase pairs and true degeneracies);
// a complex Schur form of U restricted to each cluster finishes the job.
// This is far cheaper than a full complex Schur decomposition and keeps the
// eigenvectors orthonormal inside degenerate eigenspaces.
SpectralDecomposition eig_unitary(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("eig_unitary needs a square matrix");
  const Eigen::Index n = u.rows();
  if (n > 0 && (u.adjoint() * u - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("eig_unitary: matrix is not unitary");

  const MatrixXcd hpart = 0.5 * (u + u.adjoint());
  auto [cosines, q] = hermitian_pairs(hpart);
  const MatrixXcd uq = u * q;

  constexpr double kClusterTol = 1e-6;
  Eigen::VectorXcd values(n);
  MatrixXcd vectors(n, n);
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index end = start + 1;
    while (end < n && cosines(end) - cosines(end - 1) <= kClusterTol) ++end;
    const Eigen::Index k = end - start;
    const MatrixXcd block = q.middleCols(start, k).adjoint() * uq.middleCols(start, k);
    if (k == 1) {
      values(start) = block(0, 0);
      vectors.col(start) = q.col(start);
    } else {
      Eigen::ComplexSchur<MatrixXcd> schur(block);
      if (schur.info() != Eigen::Success) throw NonConvergenceError("cluster Schur form did not converge");
      values.segment(start, k) = schur.matrixT().diagonal();
      vectors.middleCols(start, k) = q.middleCols(start, k) * schur.matrixU();
    }
    start = end;
  }

  for (Eigen::Index j = 0; j < n; ++j) values(j) /= std::abs(values(j));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phase(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) phase[static_cast<std::size_t>(j)] = wrap_phase(std::arg(values(j)));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return phase[static_cast<std::size_t>(a)] < phase[static_cast<std::size_t>(b)];
  });

  SpectralDecomposition d;
  d.eigenvalues.resize(n);
  d.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d.eigenvalues(j) = values(order[static_cast<std::size_t>(j)]);
    d.eigenvectors.col(j) = vectors.col(order[static_cast<std::size_t>(j)]);
  }
  d.residual = max_column_residual(u, d.eigenvectors, d.eigenvalues);
  if (d.residual > 1e-6) throw NonConvergenceError("eig_unitary residual " + std::to_string(d.residual));
  return d;
}

StateVector evolve(const SpectralDecomposition& hd, double t, const StateVector& psi) {
  if (psi.dimension() != hd.dimension()) throw std::invalid_argument("evolve: dimension mismatch");
  Eigen::VectorXcd coeff = hd.eigenvectors.adjoint() * psi.amplitudes;
  for (Eigen::Index j = 0; j < coeff.size(); ++j) coeff(j) *= std::exp(cd(0.0, -hd.eigenvalues(j).real() * t));
  return {hd.eigenvectors * coeff, psi.basis};
}

StateVector evolve(const Eigen::MatrixXcd& h, double t, const StateVector& psi) {
  if (psi.dimension() != h.rows()) throw std::invalid_argument("evolve: dimension mismatch");
  return evolve(eig_hermitian(h), t, psi);
}

Eigen::VectorXd overlap_weights(const SpectralDecomposition& d, const StateVector& psi) {
  if (psi.dimension() != d.dimension()) throw std::invalid_argument("overlap: dimension mismatch");
  return (d.eigenvectors.adjoint() * psi.amplitudes).cwiseAbs2();
}

std::vector<OverlapEntry> spectral_overlap_profile(const SpectralDecomposition& d, const StateVector& psi,
                                                   double merge_tol) {
  require_unit(psi);
  const VectorXd w = overlap_weights(d, psi);
  std::vector<OverlapEntry> out;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (!out.empty() && std::abs(out.back().eigenvalue - d.eigenvalues(j)) <= merge_tol) {
      out.back().weight += w(j);
    } else {
      out.push_back({d.eigenvalues(j), w(j)});
    }
  }
  // Phase-sorted unitary spectra wrap around at -pi/pi.
  if (out.size() > 1 && std::abs(out.front().eigenvalue - out.back().eigenvalue) <= merge_tol) {
    out.back().weight += out.front().weight;
    out.erase(out.begin());
  }
  return out;
}

double register_phase(std::uint64_t m, int bits) {
  const double phase = 2 * kPi * static_cast<double>(m) / std::ldexp(1.0, bits);
  return phase > kPi ? phase - 2 * kPi : phase;
}

Eigen::VectorXd qpe_outcome_distribution(const Eigen::VectorXd& phases, const Eigen::VectorXd& weights, int bits) {
  if (bits < 1 || bits > 20) throw std::invalid_argument("phase estimation needs 1..20 ancilla bits");
  if (phases.size() != weights.size()) throw std::invalid_argument("phases/weights size mismatch");
  const auto outcomes = static_cast<Eigen::Index>(1) << bits;
  const double scale = std::ldexp(1.0, bits);
  VectorXd p = VectorXd::Zero(outcomes);
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    if (weights(j) == 0.0) continue;
    for (Eigen::Index m = 0; m < outcomes; ++m) {
      const double delta = phases(j) - 2 * kPi * static_cast<double>(m) / scale;
      const double den = std::sin(delta / 2);
      double kernel;
      if (std::abs(den) < 1e-12) {
        kernel = 1.0;
      } else {
        const double num = std::sin(scale * delta / 2);
        kernel = num * num / (scale * scale * den * den);
      }
      p(m) += weights(j) * kernel;
    }
  }
  return p;
}

PhaseEstimate qpe_simulate(const SpectralDecomposition& ud, const StateVector& psi, int bits, std::uint64_t shots,
                           std::uint64_t seed, QueryLedger* ledger) {
  require_unit(psi);
  if (shots == 0) throw std::invalid_argument("phase estimation needs at least one shot");
  const VectorXd p = qpe_outcome_distribution(ud.phases(), overlap_weights(ud, psi), bits);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::uint64_t> dist(p.data(), p.data() + p.size());
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(p.size()), 0);
  for (std::uint64_t s = 0; s < shots; ++s) ++counts[dist(rng)];

  PhaseEstimate est;
  est.bits = bits;
  est.shots = shots;
  est.seed = seed;
  for (std::size_t m = 0; m < counts.size(); ++m)
    if (counts[m] > 0) est.samples.emplace_back(register_phase(m, bits), counts[m]);
  std::sort(est.samples.begin(), est.samples.end());
  if (ledger) ledger->charge(shots * ((std::uint64_t{1} << bits) - 1));
  return est;
}

PhaseEstimate qpe_simulate(const Eigen::MatrixXcd& u, const StateVector& psi, int bits, std::uint64_t shots,
                           std::uint64_t seed, QueryLedger* ledger) {
  return qpe_simulate(eig_unitary(u), psi, bits, shots, seed, ledger);
}

double PhaseEstimate::modal_phase() const {
  if (samples.empty()) throw std::logic_error("empty phase estimate");
  auto best = samples.front();
  for (const auto& s : samples) {
    if (s.second > best.second || (s.second == best.second && std::abs(s.first) < std::abs(best.first))) best = s;
  }
  return best.first;
}

double PhaseEstimate::modal_frequency() const {
  if (samples.empty() || shots == 0) return 0.0;
  std::uint64_t best = 0;
  for (const auto& s : samples) best = std::max(best, s.second);
  return static_cast<double>(best) / static_cast<double>(shots);
}

StateVector apply_steps(const Eigen::MatrixXcd& u, const StateVector& psi, int steps, QueryLedger* ledger) {
  if (steps < 0) throw std::invalid_argument("apply_steps: negative step count");
  if (psi.dimension() != u.cols()) throw std::invalid_argument("apply_steps: dimension mismatch");
  StateVector out = psi;
  for (int s = 0; s < steps; ++s) out.amplitudes = u * out.amplitudes;
  if (ledger) ledger->charge(static_cast<std::uint64_t>(steps));
  return out;
}

GapReport summarize_gap(std::string measure, const Eigen::VectorXd& distances, const Eigen::VectorXd& weights,
                        double zero_tol, double orth_tol, double threshold) {
  if (distances.size() != weights.size()) throw std::invalid_argument("summarize_gap: size mismatch");
  GapReport r;
  r.measure = std::move(measure);
  r.zero_tol = zero_tol;
  r.orth_tol = orth_tol;
  r.threshold = threshold;
  for (Eigen::Index j = 0; j < distances.size(); ++j) {
    const double dist = distances(j);
    if (dist <= zero_tol) r.reference_mass += weights(j);
    if (dist <= threshold) r.threshold_mass += weights(j);
    if (weights(j) > orth_tol) {
      if (!r.min_relevant_distance || dist < *r.min_relevant_distance) r.min_relevant_distance = dist;
      if (dist > zero_tol && (!r.min_relevant_gap || dist < *r.min_relevant_gap)) r.min_relevant_gap = dist;
    }
  }
  return r;
}

}  // namespace nandwalk
