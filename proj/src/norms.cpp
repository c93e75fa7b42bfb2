#include "tpfem/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpfem/error.hpp"

namespace tpfem {

namespace {

struct Squares {
  double l2 = 0.0;
  double h1 = 0.0;
};

bool touches_turning_point(const DofMap& dofs, int e) {
  const auto nodes = dofs.mesh().nodes();
  return nodes[e] == 0.0 || nodes[e + 1] == 0.0;
}

// Integrates (u - v)^2 and (u' - v')^2 element by element, left to right.
Squares integrate_difference(const ManufacturedSolution& solution, const FeFunction& v,
                             const ErrorQuadrature& eq, bool with_derivative) {
  const DofMap& dofs = v.dofs();
  const int q = eq.q > 0 ? eq.q : dofs.order() + 3;
  const QuadratureRule rule = gauss_rule(q);
  Squares sum;
  for (int e = 0; e < dofs.num_elements(); ++e) {
    const int depth = touches_turning_point(dofs, e) ? eq.subdiv_turning_point : eq.subdiv;
    const int pieces = 1 << depth;
    const double xl = dofs.element_left(e);
    const double h = dofs.element_width(e);
    const double dt = 1.0 / pieces;
    Squares local;
    for (int s = 0; s < pieces; ++s) {
      for (int m = 0; m < rule.size(); ++m) {
        const double t = (s + rule.points[m]) * dt;
        const double x = xl + h * t;
        const double w = h * dt * rule.weights[m];
        const auto [vv, vd] = v.evaluate_local(e, t);
        const double diff = solution.u(x) - vv;
        local.l2 += w * diff * diff;
        if (with_derivative) {
          const double ddiff = solution.u_prime(x) - vd;
          local.h1 += w * ddiff * ddiff;
        }
      }
    }
    sum.l2 += local.l2;
    sum.h1 += local.h1;
  }
  return sum;
}

void check_p1(const FeFunction& fe, int left, int right) {
  if (fe.order() != 1) fail(ErrorKind::parameter, "only piecewise linear functions are supported");
  const int n = fe.dofs().mesh().half_count();
  if (!(-n <= left && left < right && right <= n)) {
    std::ostringstream os;
    os << "node range (" << left << ", " << right << ") outside [-" << n << ", " << n << "]";
    fail(ErrorKind::parameter, os.str());
  }
}

}  // namespace

FeFunction interpolant(const ScalarFunction& u, const DofMap& dofs) {
  std::vector<double> coeffs(static_cast<std::size_t>(dofs.num_dofs()));
  for (int g = 0; g < dofs.num_dofs(); ++g) coeffs[g] = u(dofs.coordinate(g));
  return FeFunction(dofs, std::move(coeffs));
}

ErrorReport error_norms(const ManufacturedSolution& solution, const FeFunction& uN, double eps,
                        const ErrorQuadrature& quad) {
  const Squares sq = integrate_difference(solution, uN, quad, true);
  ErrorReport r;
  r.l2 = std::sqrt(sq.l2);
  r.h1_semi = std::sqrt(sq.h1);
  r.energy = energy_norm(eps, r.l2, r.h1_semi);
  r.quadrature_points_per_element = quad.q > 0 ? quad.q : uN.order() + 3;
  r.subdivision_depth = quad.subdiv;
  return r;
}

double interpolation_l2_error(const ManufacturedSolution& solution, const FeFunction& uI,
                              const ErrorQuadrature& quad) {
  return std::sqrt(integrate_difference(solution, uI, quad, false).l2);
}

double supercloseness(const FeFunction& uI, const FeFunction& uN, double eps) {
  const DofMap& dofs = uI.dofs();
  if (dofs.num_dofs() != uN.dofs().num_dofs() || dofs.order() != uN.order()) {
    fail(ErrorKind::parameter, "supercloseness needs functions on the same mesh and order");
  }
  const auto a = dofs.mesh().nodes();
  const auto b = uN.dofs().mesh().nodes();
  if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
    fail(ErrorKind::parameter, "supercloseness needs functions on the same mesh");
  }
  const QuadratureRule rule = gauss_rule(dofs.order() + 1);
  double l2 = 0.0;
  double h1 = 0.0;
  for (int e = 0; e < dofs.num_elements(); ++e) {
    const double h = dofs.element_width(e);
    for (int m = 0; m < rule.size(); ++m) {
      const auto [iv, id] = uI.evaluate_local(e, rule.points[m]);
      const auto [nv, nd] = uN.evaluate_local(e, rule.points[m]);
      const double w = h * rule.weights[m];
      l2 += w * (iv - nv) * (iv - nv);
      h1 += w * (id - nd) * (id - nd);
    }
  }
  return energy_norm(eps, std::sqrt(l2), std::sqrt(h1));
}

double p1_exact_l2(const FeFunction& fe, int left, int right) {
  check_p1(fe, left, right);
  const auto& mesh = fe.dofs().mesh();
  const int n = mesh.half_count();
  const auto c = fe.coefficients();
  double sum = 0.0;
  for (int i = left + 1; i <= right; ++i) {
    const double ei = c[i + n];
    const double em = c[i - 1 + n];
    sum += mesh.interval(i) * (ei * ei + ei * em + em * em);
  }
  return std::sqrt(sum / 3.0);
}

NormEquivalence norm_equivalence_check(const FeFunction& fe, int left, int right) {
  check_p1(fe, left, right);
  const auto& mesh = fe.dofs().mesh();
  const int n = mesh.half_count();
  const auto c = fe.coefficients();
  NormEquivalence out;
  for (int i = left + 1; i <= right - 1; ++i) out.lhs += mesh.midspan(i) * std::abs(c[i + n]);
  out.lhs += 0.5 * (mesh.interval(left + 1) * std::abs(c[left + n]) +
                    mesh.interval(right) * std::abs(c[right + n]));
  out.rhs = std::sqrt(3.0) * std::sqrt(mesh.node(right) - mesh.node(left)) *
            p1_exact_l2(fe, left, right);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-14);
  return out;
}

}  // namespace tpfem
