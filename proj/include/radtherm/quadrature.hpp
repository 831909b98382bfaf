#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "radtherm/errors.hpp"

namespace radtherm {

/// Spectral band [lo, hi] in micrometres.
class Band {
 public:
  Band(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
      throw DomainError("band: require 0 <= lo < hi < inf");
    }
  }
  static Band centered(double center, double width) {
    return Band(center - 0.5 * width, center + 0.5 * width);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  double center() const { return 0.5 * (lo_ + hi_); }

  bool operator==(const Band&) const = default;

 private:
  double lo_;
  double hi_;
};

enum class QuadratureScheme { gauss_legendre, midpoint };

struct QuadratureConfig {
  int node_count = 64;
  QuadratureScheme scheme = QuadratureScheme::gauss_legendre;

  void validate() const {
    if (node_count < 8) throw DomainError("quadrature: node_count must be >= 8");
  }
};

template <typename Scalar>
struct QuadratureRule {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Nodes start from the Golub-Welsch
/// eigenvalues of the Jacobi matrix and are polished by Newton iteration on
/// P_n in the target scalar type.
template <typename Scalar>
QuadratureRule<Scalar> gauss_legendre_rule(int n) {
  if (n < 1) throw DomainError("gauss_legendre_rule: n must be positive");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  QuadratureRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    Scalar x = Scalar(solver.eigenvalues()[i]);
    Scalar dp = Scalar(0);
    for (int iter = 0; iter < 100; ++iter) {
      // Three-term recurrence for P_n(x) and its derivative.
      Scalar p0 = Scalar(1);
      Scalar p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      const Scalar pn = n == 1 ? x : p1;
      const Scalar pn_1 = n == 1 ? Scalar(1) : p0;
      dp = Scalar(n) * (x * pn - pn_1) / (x * x - Scalar(1));
      const Scalar step = pn / dp;
      x -= step;
      using std::abs;
      if (abs(step) <= std::numeric_limits<Scalar>::epsilon() * Scalar(2)) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
  }
  return rule;
}

/// Nodes and weights mapped onto `band`. Gauss-Legendre rules are cached per
/// node count.
QuadratureRule<double> band_rule(const Band& band, const QuadratureConfig& q);

/// Definite integral of `integrand` (a callable taking an Eigen::ArrayXd of
/// wavelengths and returning the same-size array) over the band.
template <typename F>
double integrate_band(F&& integrand, const Band& band, const QuadratureConfig& q = {}) {
  const auto rule = band_rule(band, q);
  const Eigen::ArrayXd values = integrand(rule.nodes);
  return (rule.weights * values).sum();
}

}  // namespace radtherm
