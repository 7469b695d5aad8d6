#pragma once

// Independent reference computations shared by the unit tests. None of these
// go through the library code they are used to check.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Evaluates formula text directly, reading x_i by its written index.
class TextEvaluator {
 public:
  TextEvaluator(std::string text, std::vector<int> values) : text_(std::move(text)), values_(std::move(values)) {}
  int value() {
    pos_ = 0;
    return parse();
  }

 private:
  int parse() {
    skip();
    if (text_[pos_] == 'x') {
      ++pos_;
      int idx = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        idx = idx * 10 + (text_[pos_++] - '0');
      return values_.at(static_cast<std::size_t>(idx - 1));
    }
    std::string name;
    while (std::isalpha(static_cast<unsigned char>(text_[pos_]))) name += text_[pos_++];
    skip();
    ++pos_;  // '('
    std::vector<int> args;
    for (;;) {
      args.push_back(parse());
      skip();
      if (text_[pos_++] == ')') break;
    }
    const bool all = std::all_of(args.begin(), args.end(), [](int a) { return a == 1; });
    const bool any = std::any_of(args.begin(), args.end(), [](int a) { return a == 1; });
    if (name == "AND") return all ? 1 : 0;
    if (name == "OR") return any ? 1 : 0;
    return all ? 0 : 1;  // NAND
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  std::string text_;
  std::vector<int> values_;
  std::size_t pos_ = 0;
};

// Small symmetric eigenproblems by cyclic Jacobi rotations.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  Eigen::VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

// exp(-iHt) psi by a truncated Taylor series with scaling and squaring.
inline Eigen::VectorXcd taylor_evolve(const Eigen::MatrixXcd& h, double t, const Eigen::VectorXcd& psi) {
  const double norm = h.cwiseAbs().rowwise().sum().maxCoeff() * std::abs(t);
  const int steps = std::max(1, static_cast<int>(std::ceil(norm / 0.5)));
  const std::complex<double> factor(0.0, -t / steps);
  Eigen::VectorXcd v = psi;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXcd term = v, sum = v;
    for (int k = 1; k < 40; ++k) {
      term = (factor / static_cast<double>(k)) * (h * term);
      sum += term;
    }
    v = sum;
  }
  return v;
}

}  // namespace oracle
