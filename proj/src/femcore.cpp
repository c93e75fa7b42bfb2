#include "tpfem/femcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpfem/error.hpp"

namespace tpfem {

DofMap::DofMap(std::shared_ptr<const GradedMesh> mesh, std::shared_ptr<const ReferenceElement> ref)
    : mesh_(std::move(mesh)), ref_(std::move(ref)) {
  if (!mesh_ || !ref_) fail(ErrorKind::parameter, "DofMap needs a mesh and a reference element");
}

double DofMap::coordinate(int dof) const {
  const int k = ref_->order();
  if (dof == num_dofs() - 1) return 1.0;
  const int e = dof / k;
  const int j = dof % k;
  if (j == 0) return mesh_->nodes()[e];
  return element_left(e) + element_width(e) * ref_->nodes()[j];
}

int DofMap::locate(double x) const {
  if (!(x >= -1.0 && x <= 1.0)) {
    std::ostringstream os;
    os << "point " << x << " lies outside [-1, 1]";
    fail(ErrorKind::parameter, os.str());
  }
  const auto nodes = mesh_->nodes();
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
  const int e = static_cast<int>(it - nodes.begin()) - 1;
  return std::clamp(e, 0, num_elements() - 1);
}

FeFunction::FeFunction(DofMap dofs, std::vector<double> coefficients)
    : dofs_(std::move(dofs)), coefficients_(std::move(coefficients)) {
  if (static_cast<int>(coefficients_.size()) != dofs_.num_dofs()) {
    fail(ErrorKind::parameter, "coefficient count does not match the DOF count");
  }
}

std::pair<double, double> FeFunction::evaluate_local(int element, double t) const {
  const auto& ref = dofs_.reference();
  const int k = ref.order();
  double v = 0.0;
  double d = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double c = coefficients_[dofs_.global_index(element, j)];
    v += c * ref.basis(j, t);
    d += c * ref.basis_derivative(j, t);
  }
  return {v, d / dofs_.element_width(element)};
}

std::pair<double, double> FeFunction::evaluate(double x) const {
  const int e = dofs_.locate(x);
  const int k = dofs_.order();
  for (int j = 0; j <= k; ++j) {
    const int g = dofs_.global_index(e, j);
    if (x == dofs_.coordinate(g)) {
      return {coefficients_[g], evaluate_local(e, dofs_.reference().nodes()[j]).second};
    }
  }
  const double t = (x - dofs_.element_left(e)) / dofs_.element_width(e);
  return evaluate_local(e, t);
}

AssembledSystem assemble(const SingularPerturbationProblem& problem,
                         std::shared_ptr<const GradedMesh> mesh,
                         std::shared_ptr<const ReferenceElement> ref, const QuadratureRule& quad) {
  DofMap dofs(std::move(mesh), std::move(ref));
  const int k = dofs.order();
  const int nb = k + 1;
  const int nq = quad.size();

  // basis tables at the quadrature points
  std::vector<double> val(static_cast<std::size_t>(nq * nb));
  std::vector<double> der(static_cast<std::size_t>(nq * nb));
  for (int m = 0; m < nq; ++m) {
    dofs.reference().evaluate(quad.points[m], std::span(val).subspan(m * nb, nb),
                              std::span(der).subspan(m * nb, nb));
  }

  using R = SystemScalar;
  AssembledSystem sys{BasicBandedMatrix<R>(dofs.num_dofs(), k, k),
                      std::vector<R>(static_cast<std::size_t>(dofs.num_dofs()), R(0)), dofs};
  std::vector<R> local_a(static_cast<std::size_t>(nb * nb));
  std::vector<R> local_b(static_cast<std::size_t>(nb));

  for (int e = 0; e < dofs.num_elements(); ++e) {
    const double xl = dofs.element_left(e);
    const double h = dofs.element_width(e);
    if (!(h > 0.0)) {
      std::ostringstream os;
      os << "degenerate element " << e << " with width " << h;
      fail(ErrorKind::mesh, os.str());
    }
    std::fill(local_a.begin(), local_a.end(), R(0));
    std::fill(local_b.begin(), local_b.end(), R(0));
    const R eps = problem.eps;
    const R hr = h;
    for (int m = 0; m < nq; ++m) {
      const double x = xl + h * quad.points[m];
      const R w = hr * R(quad.weights[m]);
      const R a = problem.a(x);
      const R c = problem.c(x);
      const R f = problem.f(x);
      const double* phi = &val[m * nb];
      const double* dphi = &der[m * nb];
      for (int r = 0; r < nb; ++r) {
        const R vr = phi[r];
        const R dvr = R(dphi[r]) / hr;
        local_b[r] += w * f * vr;
        for (int s = 0; s < nb; ++s) {
          const R ds = R(dphi[s]) / hr;
          local_a[r * nb + s] += w * (eps * ds * dvr + a * ds * vr + c * R(phi[s]) * vr);
        }
      }
    }
    for (int r = 0; r < nb; ++r) {
      const int gr = dofs.global_index(e, r);
      sys.rhs[gr] += local_b[r];
      for (int s = 0; s < nb; ++s) sys.matrix(gr, dofs.global_index(e, s)) += local_a[r * nb + s];
    }
  }
  return sys;
}

AssembledSystem apply_dirichlet(AssembledSystem system, double nu_left, double nu_right) {
  auto& A = system.matrix;
  auto& b = system.rhs;
  const int n = A.size();
  const int k = A.lower();
  const int last = n - 1;

  for (int r = 1; r <= std::min(k, last); ++r) {
    if (A.in_band(r, 0)) {
      b[r] -= A(r, 0) * nu_left;
      A(r, 0) = 0.0;
    }
  }
  for (int r = std::max(0, last - k); r < last; ++r) {
    if (A.in_band(r, last)) {
      b[r] -= A(r, last) * nu_right;
      A(r, last) = 0.0;
    }
  }
  for (int c = 0; c <= std::min(A.upper(), last); ++c) A(0, c) = 0.0;
  for (int c = std::max(0, last - A.lower()); c <= last; ++c) A(last, c) = 0.0;
  A(0, 0) = 1.0;
  A(last, last) = 1.0;
  b[0] = nu_left;
  b[last] = nu_right;
  return system;
}

SolveResult solve(const AssembledSystem& system) {
  using R = SystemScalar;
  const BasicBandedLu<R> lu(system.matrix);
  const auto x = lu.solve(std::span<const R>(system.rhs));

  const auto ax = system.matrix.multiply(std::span<const R>(x));
  R res = 0;
  R bnorm = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    res = std::max(res, std::abs(ax[i] - system.rhs[i]));
    bnorm = std::max(bnorm, std::abs(system.rhs[i]));
  }
  const double rel = static_cast<double>(bnorm > 0 ? res / bnorm : res);
  std::vector<double> coeffs(x.begin(), x.end());
  return SolveResult{FeFunction(system.dofs, std::move(coeffs)), rel, lu.factor_upper_bandwidth()};
}

SolveResult solve_problem(const SingularPerturbationProblem& problem,
                          std::shared_ptr<const GradedMesh> mesh,
                          std::shared_ptr<const ReferenceElement> ref, int quad_points) {
  const int q = quad_points > 0 ? quad_points : ref->order() + 3;
  auto sys = assemble(problem, std::move(mesh), std::move(ref), gauss_rule(q));
  return solve(apply_dirichlet(std::move(sys), problem.nu_left, problem.nu_right));
}

double bilinear_form(const SingularPerturbationProblem& problem, const FeFunction& w,
                     const FeFunction& v, const QuadratureRule& quad) {
  const DofMap& dofs = w.dofs();
  if (dofs.num_elements() != v.dofs().num_elements()) {
    fail(ErrorKind::parameter, "bilinear form needs functions on the same mesh");
  }
  double sum = 0.0;
  for (int e = 0; e < dofs.num_elements(); ++e) {
    const double xl = dofs.element_left(e);
    const double h = dofs.element_width(e);
    for (int m = 0; m < quad.size(); ++m) {
      const double t = quad.points[m];
      const double x = xl + h * t;
      const auto [wv, wd] = w.evaluate_local(e, t);
      const auto [vv, vd] = v.evaluate_local(e, t);
      sum += h * quad.weights[m] *
             (problem.eps * wd * vd + problem.a(x) * wd * vv + problem.c(x) * wv * vv);
    }
  }
  return sum;
}

}  // namespace tpfem
