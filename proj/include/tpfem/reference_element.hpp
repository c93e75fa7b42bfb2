#pragma once

#include <span>
#include <vector>

namespace tpfem {

enum class NodePlacement { gauss_lobatto, equispaced };

/// Lagrange basis of order k on [0, 1] with nodes 0 = t_0 < ... < t_k = 1.
class ReferenceElement {
 public:
  ReferenceElement(int k, NodePlacement placement = NodePlacement::gauss_lobatto);

  int order() const { return k_; }
  int num_basis() const { return k_ + 1; }
  NodePlacement placement() const { return placement_; }
  std::span<const double> nodes() const { return nodes_; }

  double basis(int j, double t) const;
  double basis_derivative(int j, double t) const;

  /// Fills values[j] = phi_j(t) and derivatives[j] = phi_j'(t), j = 0..k.
  void evaluate(double t, std::span<double> values, std::span<double> derivatives) const;

 private:
  int k_;
  NodePlacement placement_;
  std::vector<double> nodes_;
  std::vector<double> inv_denominators_;  // 1 / prod_{m != j} (t_j - t_m)
};

inline ReferenceElement reference_element(int k,
                                          NodePlacement placement = NodePlacement::gauss_lobatto) {
  return ReferenceElement(k, placement);
}

/// Gauss-Legendre rule mapped to [0, 1]; weights sum to one.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
  int exact_degree() const { return 2 * size() - 1; }
};

/// q-point Gauss-Legendre rule on [0, 1], 1 <= q <= 30.
QuadratureRule gauss_rule(int q);

/// Interior Gauss-Lobatto points of order k on [-1, 1] (the roots of P_k').
std::vector<double> lobatto_interior_points(int k);

}  // namespace tpfem
