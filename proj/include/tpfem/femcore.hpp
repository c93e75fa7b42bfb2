#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "tpfem/banded.hpp"
#include "tpfem/meshgen.hpp"
#include "tpfem/problem.hpp"
#include "tpfem/reference_element.hpp"

namespace tpfem {

/// Global left-to-right numbering of the continuous order-k Lagrange space:
/// element e (0-based, left node x_{e-N}) owns DOFs e*k .. e*k + k.
class DofMap {
 public:
  DofMap(std::shared_ptr<const GradedMesh> mesh, std::shared_ptr<const ReferenceElement> ref);

  int num_dofs() const { return mesh_->num_intervals() * ref_->order() + 1; }
  int num_elements() const { return mesh_->num_intervals(); }
  int order() const { return ref_->order(); }

  int global_index(int element, int local) const { return element * ref_->order() + local; }

  /// x_{i,j} = x_{i-1} + h_i t_j
  double coordinate(int dof) const;

  double element_left(int element) const { return mesh_->nodes()[element]; }
  double element_width(int element) const {
    return mesh_->nodes()[element + 1] - mesh_->nodes()[element];
  }

  /// Element containing x; at shared nodes the left element wins.
  int locate(double x) const;

  const GradedMesh& mesh() const { return *mesh_; }
  const ReferenceElement& reference() const { return *ref_; }
  const std::shared_ptr<const GradedMesh>& mesh_ptr() const { return mesh_; }
  const std::shared_ptr<const ReferenceElement>& reference_ptr() const { return ref_; }

 private:
  std::shared_ptr<const GradedMesh> mesh_;
  std::shared_ptr<const ReferenceElement> ref_;
};

/// A member of the continuous piecewise-polynomial space over a mesh.
class FeFunction {
 public:
  FeFunction(DofMap dofs, std::vector<double> coefficients);

  const DofMap& dofs() const { return dofs_; }
  std::span<const double> coefficients() const { return coefficients_; }
  int order() const { return dofs_.order(); }

  /// (value, derivative) at x in [-1, 1].
  std::pair<double, double> evaluate(double x) const;
  double value(double x) const { return evaluate(x).first; }

  /// (value, derivative) on element e at reference coordinate t.
  std::pair<double, double> evaluate_local(int element, double t) const;

 private:
  DofMap dofs_;
  std::vector<double> coefficients_;
};

/// Assembly and factorization run in extended precision: for order 4 on
/// strongly graded meshes the rounding of double entries dominates the
/// discretization error.
using SystemScalar = long double;

struct AssembledSystem {
  BasicBandedMatrix<SystemScalar> matrix;
  std::vector<SystemScalar> rhs;
  DofMap dofs;
};

/// Galerkin system for B_eps(u, v) = eps(u', v') + (a u', v) + (c u, v)
/// and the load (f, v), integrated element by element with `quad`.
AssembledSystem assemble(const SingularPerturbationProblem& problem,
                         std::shared_ptr<const GradedMesh> mesh,
                         std::shared_ptr<const ReferenceElement> ref, const QuadratureRule& quad);

/// Replaces the first and last rows by identity rows carrying the boundary
/// values and moves their columns to the right-hand side.
AssembledSystem apply_dirichlet(AssembledSystem system, double nu_left, double nu_right);

struct SolveResult {
  FeFunction solution;
  double relative_residual;  // |Ax - b|_inf / |b|_inf, or |Ax - b|_inf when b = 0
  int factor_upper_bandwidth;
};

SolveResult solve(const AssembledSystem& system);

/// Assemble, impose boundary values and solve in one step. q = k + 3 when
/// quad_points is zero.
SolveResult solve_problem(const SingularPerturbationProblem& problem,
                          std::shared_ptr<const GradedMesh> mesh,
                          std::shared_ptr<const ReferenceElement> ref, int quad_points = 0);

/// B_eps(w, v) for two discrete functions on the same mesh, by element
/// quadrature with `quad`.
double bilinear_form(const SingularPerturbationProblem& problem, const FeFunction& w,
                     const FeFunction& v, const QuadratureRule& quad);

}  // namespace tpfem
