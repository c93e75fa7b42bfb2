#include "tpfem/reference_element.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tpfem/error.hpp"

namespace tpfem {

namespace {

struct Legendre {
  double value;
  double derivative;
};

// P_n(x) and P_n'(x) by the three-term recurrence, |x| < 1.
Legendre legendre(int n, double x) {
  double p_prev = 1.0;
  double p = x;
  if (n == 0) return {1.0, 0.0};
  for (int m = 2; m <= n; ++m) {
    const double next = ((2.0 * m - 1.0) * x * p - (m - 1.0) * p_prev) / m;
    p_prev = p;
    p = next;
  }
  const double dp = n * (x * p - p_prev) / (x * x - 1.0);
  return {p, dp};
}

}  // namespace

std::vector<double> lobatto_interior_points(int k) {
  std::vector<double> pts;
  for (int j = 1; j < k; ++j) {
    // Chebyshev-Gauss-Lobatto initial guess, then Newton on P_k'
    double x = -std::cos(std::numbers::pi * j / k);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(k, x);
      const double d2p = (2.0 * x * dp - k * (k + 1.0) * p) / (1.0 - x * x);
      const double step = dp / d2p;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

ReferenceElement::ReferenceElement(int k, NodePlacement placement) : k_(k), placement_(placement) {
  if (k < 1 || k > 10) {
    fail(ErrorKind::parameter, "element order must lie in [1, 10], got " + std::to_string(k));
  }
  nodes_.resize(static_cast<std::size_t>(k + 1));
  nodes_.front() = 0.0;
  nodes_.back() = 1.0;
  if (placement == NodePlacement::gauss_lobatto) {
    const auto interior = lobatto_interior_points(k);
    for (int j = 1; j < k; ++j) nodes_[j] = 0.5 * (1.0 + interior[j - 1]);
  } else {
    for (int j = 1; j < k; ++j) nodes_[j] = static_cast<double>(j) / k;
  }

  inv_denominators_.resize(nodes_.size());
  for (int j = 0; j <= k; ++j) {
    double d = 1.0;
    for (int m = 0; m <= k; ++m) {
      if (m != j) d *= nodes_[j] - nodes_[m];
    }
    inv_denominators_[j] = 1.0 / d;
  }
}

double ReferenceElement::basis(int j, double t) const {
  double v = inv_denominators_[j];
  for (int m = 0; m <= k_; ++m) {
    if (m != j) v *= t - nodes_[m];
  }
  return v;
}

double ReferenceElement::basis_derivative(int j, double t) const {
  double sum = 0.0;
  for (int l = 0; l <= k_; ++l) {
    if (l == j) continue;
    double prod = 1.0;
    for (int m = 0; m <= k_; ++m) {
      if (m != j && m != l) prod *= t - nodes_[m];
    }
    sum += prod;
  }
  return sum * inv_denominators_[j];
}

void ReferenceElement::evaluate(double t, std::span<double> values,
                                std::span<double> derivatives) const {
  for (int j = 0; j <= k_; ++j) {
    values[j] = basis(j, t);
    derivatives[j] = basis_derivative(j, t);
  }
}

QuadratureRule gauss_rule(int q) {
  if (q < 1 || q > 30) {
    fail(ErrorKind::parameter, "quadrature size must lie in [1, 30], got " + std::to_string(q));
  }
  QuadratureRule rule;
  rule.points.resize(static_cast<std::size_t>(q));
  rule.weights.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const auto lg = legendre(q, x);
      dp = lg.derivative;
      const double step = lg.value / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    dp = legendre(q, x).derivative;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // symmetric pair on [-1, 1] mapped to [0, 1]
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[q - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[q - 1 - i] = 0.5 * w;
  }
  if (q % 2 == 1) rule.points[q / 2] = 0.5;
  return rule;
}

}  // namespace tpfem
