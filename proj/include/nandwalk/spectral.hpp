#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nandwalk/formula.hpp"
#include "nandwalk/graphs.hpp"

namespace nandwalk {

using ComplexVector = Eigen::VectorXcd;

struct BasisTag {
  enum class Kind { Vertex, EdgeState, Plain };
  Kind kind = Kind::Plain;
  BasisId id = 0;

  static BasisTag vertices(const AugmentedGraph& g) { return {Kind::Vertex, g.basis_id()}; }
  static BasisTag edges(const EdgeStateSpace& s) { return {Kind::EdgeState, s.basis_id()}; }
  friend bool operator==(const BasisTag&, const BasisTag&) = default;
};

struct StateVector {
  ComplexVector amplitudes;
  BasisTag basis;

  int dimension() const { return static_cast<int>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
};

/// Throws std::invalid_argument unless the state has unit norm within tol.
void require_unit(const StateVector& psi, double tol = 1e-9);
/// Throws std::invalid_argument when the state was built for another basis.
void require_basis(const StateVector& psi, const BasisTag& basis);

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectralDecomposition {
  ComplexVector eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // orthonormal columns
  double residual = 0.0;          // max_j ||A v_j - lambda_j v_j||

  int dimension() const { return static_cast<int>(eigenvalues.size()); }
  /// Eigenphases arg(lambda) in (-pi, pi].
  Eigen::VectorXd phases() const;
};

/// Ascending real eigenvalues. Requires ||H - H^dagger||_max <= 1e-10.
SpectralDecomposition eig_hermitian(const Eigen::MatrixXcd& h);

/// Eigenvalues on the unit circle sorted by phase, orthonormal eigenvectors
/// even inside degenerate eigenspaces. Requires ||U^dagger U - I||_max <= 1e-8.
SpectralDecomposition eig_unitary(const Eigen::MatrixXcd& u);

/// exp(-iHt) psi through the eigenbasis.
StateVector evolve(const Eigen::MatrixXcd& h, double t, const StateVector& psi);
StateVector evolve(const SpectralDecomposition& hd, double t, const StateVector& psi);

struct OverlapEntry {
  std::complex<double> eigenvalue;
  double weight = 0.0;
};

/// |<v|psi>|^2 per eigenvalue, degenerate eigenvalues (within merge_tol)
/// merged with their weights summed. Requires unit psi.
std::vector<OverlapEntry> spectral_overlap_profile(const SpectralDecomposition& d, const StateVector& psi,
                                                   double merge_tol = 1e-9);

/// Per-eigenvector weights |<v_j|psi>|^2, in decomposition order.
Eigen::VectorXd overlap_weights(const SpectralDecomposition& d, const StateVector& psi);

struct PhaseEstimate {
  std::vector<std::pair<double, std::uint64_t>> samples;  // (phase in (-pi, pi], multiplicity), by phase
  int bits = 0;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  /// Most frequent phase; ties go to the smaller |phase|.
  double modal_phase() const;
  /// Fraction of shots on the modal phase.
  double modal_frequency() const;
};

/// Exact distribution over the 2^b register outcomes of textbook phase
/// estimation. Entry m is the probability of reading phase 2 pi m / 2^b.
Eigen::VectorXd qpe_outcome_distribution(const Eigen::VectorXd& phases, const Eigen::VectorXd& weights, int bits);

/// Register value m mapped to its phase in (-pi, pi].
double register_phase(std::uint64_t m, int bits);

/// Samples phase estimation from the exact outcome distribution. The ledger,
/// when given, is charged shots * (2^b - 1) controlled applications of U.
PhaseEstimate qpe_simulate(const SpectralDecomposition& ud, const StateVector& psi, int bits, std::uint64_t shots,
                           std::uint64_t seed, QueryLedger* ledger = nullptr);
PhaseEstimate qpe_simulate(const Eigen::MatrixXcd& u, const StateVector& psi, int bits, std::uint64_t shots,
                           std::uint64_t seed, QueryLedger* ledger = nullptr);

/// U^steps psi, charging one query per application.
StateVector apply_steps(const Eigen::MatrixXcd& u, const StateVector& psi, int steps, QueryLedger* ledger = nullptr);

/// Summary of where a start state's spectral mass sits relative to a
/// reference point. `measure` names the quantity the distances are taken of
/// (eigenvalue, phase, or real part), all distances are already absolute.
struct GapReport {
  std::string measure;
  double reference_mass = 0.0;  // weight with distance <= zero_tol
  double threshold_mass = 0.0;  // weight with distance <= threshold
  std::optional<double> min_relevant_distance;  // over weight > orth_tol
  std::optional<double> min_relevant_gap;       // same, excluding distance <= zero_tol
  double zero_tol = 1e-10;
  double orth_tol = 1e-8;
  double threshold = 0.0;
};

GapReport summarize_gap(std::string measure, const Eigen::VectorXd& distances, const Eigen::VectorXd& weights,
                        double zero_tol, double orth_tol, double threshold);

}  // namespace nandwalk
