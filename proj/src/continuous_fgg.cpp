#include "nandwalk/continuous_fgg.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/QR>

namespace nandwalk {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

int ceil_sqrt(int n) { return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-12)); }

// Obstacle adjacency (tree plus pendants) in the runway graph's order, with
// the runway stripped off. The root comes first.
Eigen::MatrixXd obstacle_matrix(const NandTree& tree, const Assignment& x) {
  const AugmentedGraph g = build_fgg_graph(tree, x, 1);
  const Eigen::MatrixXd h = adjacency_matrix(g).real();
  const int offset = 3;  // runway sites -1, 0, 1
  return h.bottomRightCorner(h.rows() - offset, h.cols() - offset);
}

}  // namespace

double runway_energy(double theta) {
  // Free path of five sites; the middle row gives the eigenvalue the plane
  // wave needs.
  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i + 1 < 5; ++i) path(i, i + 1) = path(i + 1, i) = 1.0;
  Eigen::VectorXcd wave(5);
  for (int n = -2; n <= 2; ++n) wave(n + 2) = std::exp(kI * (theta * n));
  const cd hwave = (path.cast<cd>() * wave)(2);
  return (hwave / wave(2)).real();
}

ScatteringResult scattering_coefficients(const Eigen::MatrixXd& obstacle, int attach, double theta) {
  if (!(theta > 1e-6 && theta < std::numbers::pi - 1e-6))
    throw std::invalid_argument("theta must lie in (0, pi) away from the band edges");
  const double energy = runway_energy(theta);
  const Eigen::Index m = obstacle.rows();
  if (m > 0 && (attach < 0 || attach >= m)) throw std::invalid_argument("attachment vertex out of range");

  // Unknowns: R, T, then the obstacle amplitudes.
  const Eigen::Index n = m + 2;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  const cd ek = std::exp(kI * theta);
  // The two halves of the ansatz agree at site 0: 1 + R = T.
  a(0, 0) = 1.0;
  a(0, 1) = -1.0;
  b(0) = -1.0;
  // Site 0: psi(-1) + psi(1) + psi(attach) = E psi(0).
  a(1, 0) = ek;
  a(1, 1) = ek - energy;
  if (m > 0) a(1, 2 + attach) = 1.0;
  b(1) = -std::conj(ek);
  for (Eigen::Index v = 0; v < m; ++v) {
    for (Eigen::Index u = 0; u < m; ++u) a(2 + v, 2 + u) = obstacle(v, u);
    a(2 + v, 2 + v) -= energy;
    if (v == attach) a(2 + v, 1) += 1.0;
  }

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  if (lu.rank() < n) throw SingularSystemError("scattering system is singular", theta);
  const Eigen::VectorXcd s = lu.solve(b);

  ScatteringResult r;
  r.energy = energy;
  r.theta = theta;
  r.reflection = s(0);
  r.transmission = s(1);

  // Re-check the eigenvalue equation on the runway around the junction and
  // on every obstacle vertex, using the full ansatz.
  const auto runway = [&](int site) -> cd {
    if (site < 0) return std::exp(kI * (theta * site)) + r.reflection * std::exp(-kI * (theta * site));
    return r.transmission * std::exp(kI * (theta * site));
  };
  const cd attach_amp = m > 0 ? s(2 + attach) : cd{};
  double residual = 0.0;
  for (int site = -2; site <= 2; ++site) {
    cd lhs = runway(site - 1) + runway(site + 1) - energy * runway(site);
    if (site == 0) lhs += attach_amp;
    residual = std::max(residual, std::abs(lhs));
  }
  // Continuity: the left form evaluated at site 0 must equal T.
  residual = std::max(residual, std::abs(1.0 + r.reflection - r.transmission));
  for (Eigen::Index v = 0; v < m; ++v) {
    cd lhs = -energy * s(2 + v);
    for (Eigen::Index u = 0; u < m; ++u) lhs += obstacle(v, u) * s(2 + u);
    if (v == attach) lhs += runway(0);
    residual = std::max(residual, std::abs(lhs));
  }
  r.residual = residual;
  return r;
}

ScatteringResult scattering_coefficients(const NandTree& tree, const Assignment& x, double theta) {
  return scattering_coefficients(obstacle_matrix(tree, x), 0, theta);
}

BandCentreLimit band_centre_limit(const NandTree& tree, const Assignment& x, std::vector<double> offsets) {
  if (offsets.size() < 2) throw std::invalid_argument("extrapolation needs at least two offsets");
  BandCentreLimit out;
  out.offsets = offsets;
  const Eigen::MatrixXd obstacle = obstacle_matrix(tree, x);
  std::vector<cd> rs, ts;
  for (double off : offsets) {
    const auto s = scattering_coefficients(obstacle, 0, std::numbers::pi / 2 - off);
    out.max_flux_error = std::max(out.max_flux_error, std::abs(s.flux() - 1.0));
    rs.push_back(s.reflection);
    ts.push_back(s.transmission);
    out.samples.push_back(s);
  }
  // Neville's scheme evaluated at offset 0.
  const auto extrapolate = [&](std::vector<cd> p) {
    const std::size_t k = offsets.size();
    for (std::size_t level = 1; level < k; ++level)
      for (std::size_t i = 0; i + level < k; ++i) {
        const double xi = offsets[i], xj = offsets[i + level];
        p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
      }
    return p[0];
  };
  out.reflection = extrapolate(rs);
  out.transmission = extrapolate(ts);
  return out;
}

RunwaySplit runway_split(const AugmentedGraph& g, const StateVector& psi) {
  if (g.attachment() != AugmentedGraph::Attachment::Runway) throw std::invalid_argument("runway_split needs a runway graph");
  require_basis(psi, BasisTag::vertices(g));
  RunwaySplit s;
  for (int i = 0; i < g.dimension(); ++i) {
    const double p = std::norm(psi.amplitudes(i));
    const VertexId& v = g.vertices()[static_cast<std::size_t>(i)];
    if (v.kind != VertexId::Kind::Runway) s.tree += p;
    else if (v.index < 0) s.left += p;
    else s.right += p;
  }
  return s;
}

StateVector psi_start_runway(const AugmentedGraph& g, int half_width) {
  if (g.attachment() != AugmentedGraph::Attachment::Runway) throw std::invalid_argument("psi_start_runway needs a runway graph");
  if (half_width < 1) throw std::invalid_argument("start-state half-width L must be at least 1");
  if (4 * half_width > g.length())
    throw std::invalid_argument("start state does not fit on the runway (need 4L <= M)");
  StateVector psi{Eigen::VectorXcd::Zero(g.dimension()), BasisTag::vertices(g)};
  const double amp = 1.0 / std::sqrt(2.0 * half_width);
  // Distance 2j from the root: the root itself for j = 0, runway site
  // -(2j - 1) otherwise.
  for (int j = 0; j < 2 * half_width; ++j) {
    const VertexId v = j == 0 ? VertexId::tree(0) : VertexId::runway(-(2 * j - 1));
    psi.amplitudes(g.index_of(v)) = (j % 2 == 0 ? amp : -amp);
  }
  return psi;
}

FggParams fgg_defaults(int leaf_count) {
  const int s = ceil_sqrt(leaf_count);
  FggParams p;
  p.half_width = 4 * s;
  p.half_length = 24 * s;
  p.time = 8.0 * std::sqrt(static_cast<double>(leaf_count));
  p.threshold = 0.25;
  return p;
}

FggOutcome run_fgg(const NandTree& tree, const Assignment& x, const FggParams& params, QueryLedger* ledger) {
  const AugmentedGraph g = build_fgg_graph(tree, x, params.half_length);
  const StateVector start = psi_start_runway(g, params.half_width);
  const StateVector end = evolve(adjacency_matrix(g), params.time, start);
  if (ledger) ledger->charge_time(params.time);
  FggOutcome out;
  out.split = runway_split(g, end);
  out.decision = out.split.right >= params.threshold;
  out.margin = out.split.right - params.threshold;
  out.params = params;
  return out;
}

KernelCheck kernel_state_check(const NandTree& tree, const Assignment& x, int half_length) {
  if (evaluate(tree, x)) throw std::invalid_argument("kernel_state_check is only meaningful when F = 0");
  const AugmentedGraph g = build_fgg_graph(tree, x, half_length);
  const Eigen::MatrixXd h = adjacency_matrix(g).real();
  const int dim = g.dimension();

  Eigen::VectorXd fixed = Eigen::VectorXd::Zero(dim);
  fixed(g.index_of(VertexId::tree(0))) = 1.0;
  for (int j = 1; 2 * j - 1 <= half_length; ++j)
    fixed(g.index_of(VertexId::runway(-(2 * j - 1)))) = (j % 2 == 0 ? 1.0 : -1.0);

  std::vector<int> unknowns, rows;
  for (int i = 0; i < dim; ++i) {
    const VertexId& v = g.vertices()[static_cast<std::size_t>(i)];
    const bool runway = v.kind == VertexId::Kind::Runway;
    if (!runway && !(v.kind == VertexId::Kind::Tree && v.index == 0)) unknowns.push_back(i);
    if (!(runway && std::abs(v.index) == half_length)) rows.push_back(i);
  }
  Eigen::MatrixXd a(rows.size(), unknowns.size());
  Eigen::VectorXd rhs(rows.size());
  const Eigen::VectorXd hfixed = h * fixed;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rhs(static_cast<Eigen::Index>(r)) = -hfixed(rows[r]);
    for (std::size_t c = 0; c < unknowns.size(); ++c)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = h(rows[r], unknowns[c]);
  }
  const Eigen::VectorXd alpha = a.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd psi = fixed;
  for (std::size_t c = 0; c < unknowns.size(); ++c) psi(unknowns[c]) = alpha(static_cast<Eigen::Index>(c));

  const Eigen::VectorXd hpsi = h * psi;
  double res2 = 0.0;
  for (int r : rows) res2 += hpsi(r) * hpsi(r);
  KernelCheck out;
  out.residual = std::sqrt(res2) / psi.norm();
  out.state = StateVector{(psi / psi.norm()).cast<std::complex<double>>(), BasisTag::vertices(g)};
  return out;
}

}  // namespace nandwalk
