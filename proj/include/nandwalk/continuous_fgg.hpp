#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nandwalk/formula.hpp"
#include "nandwalk/graphs.hpp"
#include "nandwalk/spectral.hpp"

namespace nandwalk {

struct ScatteringResult {
  double energy = 0.0;
  double theta = 0.0;
  std::complex<double> reflection;
  std::complex<double> transmission;
  double residual = 0.0;  // max violation of the eigenvalue equation

  double flux() const { return std::norm(reflection) + std::norm(transmission); }
};

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& message, double theta) : std::runtime_error(message), theta_(theta) {}
  double theta() const { return theta_; }

 private:
  double theta_;
};

/// Energy at which the plane wave e^{i theta n} solves the free runway
/// equation, read off numerically from the runway adjacency.
double runway_energy(double theta);

/// Plane-wave scattering off an obstacle hanging from runway site 0. The
/// obstacle is given by its adjacency matrix; `attach` is the obstacle vertex
/// joined to site 0. An empty obstacle is a free runway.
ScatteringResult scattering_coefficients(const Eigen::MatrixXd& obstacle, int attach, double theta);
/// The obstacle is the tree with its input pendants.
ScatteringResult scattering_coefficients(const NandTree& tree, const Assignment& x, double theta);

struct BandCentreLimit {
  std::complex<double> reflection;
  std::complex<double> transmission;
  std::vector<double> offsets;             // theta = pi/2 - offset
  std::vector<ScatteringResult> samples;
  double max_flux_error = 0.0;
};

/// Reflection and transmission at zero energy, extrapolated from
/// theta = pi/2 - offset over the given offsets (polynomial extrapolation to
/// offset 0). Zero energy itself is avoided.
BandCentreLimit band_centre_limit(const NandTree& tree, const Assignment& x,
                                  std::vector<double> offsets = {1e-2, 1e-3, 1e-4});

struct RunwaySplit {
  double left = 0.0;   // runway sites n < 0
  double tree = 0.0;   // tree vertices and pendants
  double right = 0.0;  // runway sites n >= 0
};

RunwaySplit runway_split(const AugmentedGraph& g, const StateVector& psi);

/// Standing wave of 2L sites alternating in sign at even distance from the
/// root, starting at the root and running out along the left runway.
StateVector psi_start_runway(const AugmentedGraph& g, int half_width);

struct FggParams {
  int half_width = 0;   // L: the start state covers 2L sites
  int half_length = 0;  // M: runway sites -M..M
  double time = 0.0;
  double threshold = 0.25;  // decide 1 iff prob-right >= threshold
};

/// L = 4 ceil(sqrt N), M = 24 ceil(sqrt N), t = 8 sqrt N, threshold 0.25.
FggParams fgg_defaults(int leaf_count);

struct FggOutcome {
  RunwaySplit split;
  bool decision = false;
  double margin = 0.0;  // prob-right - threshold
  FggParams params;
};

FggOutcome run_fgg(const NandTree& tree, const Assignment& x, const FggParams& params, QueryLedger* ledger = nullptr);

struct KernelCheck {
  double residual = 0.0;  // ||H psi|| over rows away from the runway ends, relative to ||psi||
  StateVector state;
};

/// Builds the zero-energy pattern on the left runway, fits the tree
/// amplitudes by least squares and reports how far the result is from a
/// zero-energy state. Only meaningful when the formula evaluates to 0.
KernelCheck kernel_state_check(const NandTree& tree, const Assignment& x, int half_length);

}  // namespace nandwalk
