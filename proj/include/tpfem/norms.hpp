#pragma once

#include <cmath>

#include "tpfem/femcore.hpp"
#include "tpfem/problem.hpp"

namespace tpfem {

struct ErrorReport {
  double energy = 0.0;          // |||u - u_N|||_eps
  double l2 = 0.0;              // ||u - u_N||
  double h1_semi = 0.0;         // |u - u_N|_1
  double interp_l2 = 0.0;       // ||u - u_I||
  double supercloseness = 0.0;  // |||u_I - u_N|||_eps
  int quadrature_points_per_element = 0;
  int subdivision_depth = 0;
};

/// Oversampled quadrature used for error measurement. Each element is split
/// into 2^subdiv equal pieces (2^subdiv_turning_point on the two elements
/// touching x = 0) with a q-point Gauss rule on each piece.
struct ErrorQuadrature {
  int q = 0;  // 0 means k + 3
  int subdiv = 2;
  int subdiv_turning_point = 5;
};

/// |||v|||_eps = (eps |v|_1^2 + ||v||^2)^(1/2)
inline double energy_norm(double eps, double l2, double h1_semi) {
  return std::sqrt(eps * h1_semi * h1_semi + l2 * l2);
}

/// Lagrange interpolant: DOF coefficients u(x_{i,j}).
FeFunction interpolant(const ScalarFunction& u, const DofMap& dofs);

/// Energy, L2 and H1-seminorm errors of u_N against the exact solution.
/// interp_l2 and supercloseness are left at zero.
ErrorReport error_norms(const ManufacturedSolution& solution, const FeFunction& uN, double eps,
                        const ErrorQuadrature& quad = {});

/// ||u - u_I|| with the same oversampled quadrature as error_norms.
double interpolation_l2_error(const ManufacturedSolution& solution, const FeFunction& uI,
                              const ErrorQuadrature& quad = {});

/// |||u_I - u_N|||_eps with a rule exact for the polynomial integrand.
double supercloseness(const FeFunction& uI, const FeFunction& uN, double eps);

/// Exact L2 norm of a piecewise linear function on (x_L, x_R):
/// sqrt(1/3 sum h_i (e_i^2 + e_i e_{i-1} + e_{i-1}^2)). Node indices run in
/// [-N, N].
double p1_exact_l2(const FeFunction& fe, int left, int right);

struct NormEquivalence {
  double lhs = 0.0;  // sum hbar_i |e_i| + (h_{L+1}|e_L| + h_R |e_R|) / 2
  double rhs = 0.0;  // sqrt(3) (x_R - x_L)^(1/2) ||e||_(x_L, x_R)
  bool holds = true;
};

NormEquivalence norm_equivalence_check(const FeFunction& fe, int left, int right);

}  // namespace tpfem
