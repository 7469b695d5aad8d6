#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nandwalk/spectral.hpp"
#include "oracles.hpp"

using namespace nandwalk;
using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

MatrixXcd random_unitary(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
  Eigen::HouseholderQR<MatrixXcd> qr(a);
  return qr.householderQ();
}

StateVector plain(const VectorXcd& v) { return {v, BasisTag{}}; }

StateVector random_state(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
  return plain(v.normalized());
}

double reconstruction_error(const MatrixXcd& a, const SpectralDecomposition& d) {
  const MatrixXcd r = d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.adjoint();
  return (a - r).cwiseAbs().maxCoeff();
}

double gram_error(const SpectralDecomposition& d) {
  const auto n = d.eigenvectors.cols();
  return (d.eigenvectors.adjoint() * d.eigenvectors - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("eig_hermitian small spectra") {
  MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  const auto dx = eig_hermitian(x);
  CHECK(dx.eigenvalues(0).real() == doctest::Approx(-1.0));
  CHECK(dx.eigenvalues(1).real() == doctest::Approx(1.0));

  const auto dz = eig_hermitian(MatrixXcd::Zero(3, 3));
  CHECK(dz.eigenvalues.cwiseAbs().maxCoeff() == 0.0);

  MatrixXcd p = MatrixXcd::Zero(3, 3);
  p(0, 1) = p(1, 0) = p(1, 2) = p(2, 1) = 1;
  const auto dp = eig_hermitian(p);
  CHECK(dp.eigenvalues(0).real() == doctest::Approx(-std::sqrt(2.0)));
  CHECK(std::abs(dp.eigenvalues(1).real()) < 1e-12);
  CHECK(dp.eigenvalues(2).real() == doctest::Approx(std::sqrt(2.0)));

  MatrixXcd bad = x;
  bad(0, 1) = 2;
  CHECK_THROWS_AS(eig_hermitian(bad), std::invalid_argument);
}

TEST_CASE("eig_hermitian matches a Jacobi oracle on the real embedding") {
  const MatrixXcd h = random_hermitian(12, 3);
  const auto d = eig_hermitian(h);
  Eigen::MatrixXd embed(24, 24);
  embed << h.real(), -h.imag(), h.imag(), h.real();
  const Eigen::VectorXd ref = oracle::jacobi_eigenvalues(embed);
  for (int j = 0; j < 12; ++j) {
    CHECK(d.eigenvalues(j).real() == doctest::Approx(ref(2 * j)).epsilon(1e-9));
    CHECK(d.eigenvalues(j).real() == doctest::Approx(ref(2 * j + 1)).epsilon(1e-9));
  }
  CHECK(d.residual <= 1e-8 * h.norm());
  CHECK(gram_error(d) <= 1e-8);
  CHECK(reconstruction_error(h, d) <= 1e-7 * h.norm());
  for (int j = 1; j < 12; ++j) CHECK(d.eigenvalues(j - 1).real() <= d.eigenvalues(j).real());
}

TEST_CASE("eig_unitary small cases") {
  const auto di = eig_unitary(MatrixXcd::Identity(4, 4));
  for (int j = 0; j < 4; ++j) CHECK(std::abs(di.eigenvalues(j) - 1.0) < 1e-14);

  MatrixXcd z = MatrixXcd::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  const auto ph = eig_unitary(z).phases();
  CHECK(ph(0) == doctest::Approx(0.0));
  CHECK(ph(1) == doctest::Approx(std::numbers::pi));

  CHECK_THROWS_AS(eig_unitary(2.0 * MatrixXcd::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("eig_unitary on a random unitary") {
  const MatrixXcd u = random_unitary(40, 11);
  const auto d = eig_unitary(u);
  CHECK(d.residual <= 1e-8);
  CHECK(gram_error(d) <= 1e-8);
  CHECK(reconstruction_error(u, d) <= 1e-7);
  for (int j = 0; j < 40; ++j) CHECK(std::abs(std::abs(d.eigenvalues(j)) - 1.0) <= 1e-8);
  const auto ph = d.phases();
  for (int j = 1; j < 40; ++j) CHECK(ph(j - 1) <= ph(j));
  // Characteristic check: det(U - lambda I) vanishes at each eigenvalue.
  for (int j = 0; j < 40; j += 7)
    CHECK(std::abs((u - d.eigenvalues(j) * MatrixXcd::Identity(40, 40)).determinant()) < 1e-8);
}

TEST_CASE("eig_unitary keeps degenerate eigenspaces orthonormal") {
  // Product of two real reflections with large +-1 eigenspaces.
  const Eigen::MatrixXd qr = random_unitary(30, 5).real().householderQr().householderQ();
  const MatrixXcd q = qr.cast<cd>();
  Eigen::VectorXd signs(30);
  for (int i = 0; i < 30; ++i) signs(i) = i < 12 ? 1.0 : -1.0;
  const MatrixXcd r1 = q * signs.cast<cd>().asDiagonal() * q.adjoint();
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(30);
  for (int i = 0; i < 30; i += 4) diag(i) = -1;
  const MatrixXcd u = diag.cast<cd>().asDiagonal() * r1;
  const auto d = eig_unitary(u);
  CHECK(d.residual <= 1e-8);
  CHECK(gram_error(d) <= 1e-8);
  // A real matrix has a spectrum closed under conjugation.
  for (int j = 0; j < 30; ++j) CHECK((d.eigenvalues.array() - std::conj(d.eigenvalues(j))).abs().minCoeff() < 1e-8);
}

TEST_CASE("evolve") {
  MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  VectorXcd e0(2);
  e0 << 1, 0;
  const StateVector psi = plain(e0);
  CHECK((evolve(x, 0.0, psi).amplitudes - e0).norm() < 1e-14);
  CHECK((evolve(x, std::numbers::pi, psi).amplitudes + e0).norm() < 1e-12);

  const MatrixXcd h = random_hermitian(10, 21);
  const StateVector s = random_state(10, 4);
  const auto d = eig_hermitian(h);
  for (double t : {0.3, 1.7, 5.0}) {
    const StateVector out = evolve(d, t, s);
    CHECK(std::abs(out.norm() - 1.0) < 1e-8);
    CHECK((out.amplitudes - oracle::taylor_evolve(h, t, s.amplitudes)).norm() < 1e-9);
  }
  const StateVector twice = evolve(d, 0.4, evolve(d, 1.1, s));
  CHECK((twice.amplitudes - evolve(d, 1.5, s).amplitudes).cwiseAbs().maxCoeff() < 1e-7);
  CHECK_THROWS_AS(evolve(h, 1.0, random_state(3, 1)), std::invalid_argument);
}

TEST_CASE("spectral overlap profile") {
  const MatrixXcd h = random_hermitian(8, 2);
  const auto d = eig_hermitian(h);
  const auto single = spectral_overlap_profile(d, plain(d.eigenvectors.col(3)));
  double total = 0;
  for (const auto& e : single) {
    total += e.weight;
    if (std::abs(e.eigenvalue - d.eigenvalues(3)) < 1e-12) CHECK(e.weight == doctest::Approx(1.0));
    else CHECK(e.weight <= 1e-10);
  }
  CHECK(total == doctest::Approx(1.0));

  // A fully degenerate spectrum collapses to one entry.
  const auto dp = eig_hermitian(MatrixXcd::Zero(3, 3));
  const auto merged = spectral_overlap_profile(dp, random_state(3, 9));
  CHECK(merged.size() == 1);
  CHECK(merged[0].weight == doctest::Approx(1.0));

  VectorXcd big = VectorXcd::Ones(8);
  CHECK_THROWS_AS(spectral_overlap_profile(d, plain(big)), std::invalid_argument);
}

TEST_CASE("phase estimation on exact register phases") {
  const int bits = 5;
  Eigen::VectorXcd ev(3);
  for (int j = 0; j < 3; ++j) ev(j) = std::exp(cd(0, 2 * std::numbers::pi * (3 + 7 * j) / 32.0));
  const MatrixXcd u = ev.asDiagonal();
  VectorXcd e1 = VectorXcd::Zero(3);
  e1(1) = 1;
  QueryLedger ledger;
  const PhaseEstimate est = qpe_simulate(u, plain(e1), bits, 500, 7, &ledger);
  REQUIRE(est.samples.size() == 1);
  CHECK(est.samples[0].first == doctest::Approx(2 * std::numbers::pi * 10 / 32.0));
  CHECK(est.samples[0].second == 500);
  CHECK(ledger.count() == 500u * 31u);

  const PhaseEstimate id = qpe_simulate(MatrixXcd::Identity(4, 4), random_state(4, 3), 6, 200, 1);
  REQUIRE(id.samples.size() == 1);
  CHECK(id.samples[0].first == 0.0);
  CHECK(id.modal_frequency() == 1.0);
  CHECK_THROWS(qpe_simulate(MatrixXcd::Identity(2, 2), random_state(2, 3), 0, 10, 1));
  CHECK_THROWS(qpe_simulate(MatrixXcd::Identity(2, 2), random_state(2, 3), 4, 0, 1));
}

TEST_CASE("phase estimation frequencies follow the overlap weights") {
  Eigen::VectorXcd ev(2);
  ev << std::exp(cd(0, 2 * std::numbers::pi * 5 / 64.0)), std::exp(cd(0, -2 * std::numbers::pi * 20 / 64.0));
  VectorXcd psi(2);
  psi << std::sqrt(0.75), std::sqrt(0.25);
  const std::uint64_t shots = 10000;
  const PhaseEstimate est = qpe_simulate(MatrixXcd(ev.asDiagonal()), plain(psi), 6, shots, 99);
  std::uint64_t first = 0;
  for (const auto& [phase, count] : est.samples)
    if (std::abs(phase - 2 * std::numbers::pi * 5 / 64.0) < 1e-12) first = count;
  const double sigma = std::sqrt(shots * 0.75 * 0.25);
  CHECK(std::abs(static_cast<double>(first) - 0.75 * shots) <= 3 * sigma);
  std::uint64_t sum = 0;
  for (const auto& s : est.samples) sum += s.second;
  CHECK(sum == shots);
}

TEST_CASE("phase estimation concentrates at high precision") {
  const MatrixXcd u = random_unitary(12, 8);
  const auto d = eig_unitary(u);
  const StateVector psi = random_state(12, 5);
  const int bits = 12;
  const Eigen::VectorXd p = qpe_outcome_distribution(d.phases(), overlap_weights(d, psi), bits);
  CHECK(p.sum() == doctest::Approx(1.0));
  const double bin = 2 * std::numbers::pi / (1 << bits);
  double near = 0;
  for (Eigen::Index m = 0; m < p.size(); ++m) {
    const double ph = register_phase(static_cast<std::uint64_t>(m), bits);
    bool close = false;
    for (Eigen::Index j = 0; j < d.phases().size(); ++j) {
      double diff = std::abs(ph - d.phases()(j));
      diff = std::min(diff, 2 * std::numbers::pi - diff);
      close = close || diff < bin;
    }
    if (close) near += p(m);
  }
  // The two bins around a phase carry at least 8/pi^2 of its weight.
  CHECK(near >= 8 / (std::numbers::pi * std::numbers::pi) - 1e-9);
}

TEST_CASE("apply_steps charges one query per step") {
  const MatrixXcd u = random_unitary(5, 2);
  const StateVector psi = random_state(5, 1);
  QueryLedger ledger;
  const StateVector out = apply_steps(u, psi, 3, &ledger);
  CHECK(ledger.count() == 3);
  CHECK((out.amplitudes - u * u * u * psi.amplitudes).norm() < 1e-12);
}

TEST_CASE("summarize_gap") {
  Eigen::VectorXd dist(4), w(4);
  dist << 0.0, 0.05, 0.3, 0.9;
  w << 0.6, 1e-12, 0.3, 0.1;
  const GapReport g = summarize_gap("phase", dist, w, 1e-8, 1e-8, 0.2);
  CHECK(g.reference_mass == doctest::Approx(0.6));
  CHECK(g.threshold_mass == doctest::Approx(0.6));
  CHECK(*g.min_relevant_distance == 0.0);
  CHECK(*g.min_relevant_gap == doctest::Approx(0.3));
}
