#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "tpfem/error.hpp"
#include "tpfem/norms.hpp"
#include "tpfem/studies.hpp"

using namespace tpfem;

namespace {

DofMap dof_map(int n, double alpha, double eps, int k) {
  return DofMap(std::make_shared<const GradedMesh>(build_mesh(MeshParams::make(n, alpha, eps))),
                std::make_shared<const ReferenceElement>(k));
}

DofMap dof_map(std::vector<double> nodes, int k) {
  return DofMap(std::make_shared<const GradedMesh>(GradedMesh::from_nodes(std::move(nodes))),
                std::make_shared<const ReferenceElement>(k));
}

std::vector<double> random_nodes(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<double> gaps(2 * n);
  double total = 0.0;
  for (auto& g : gaps) total += (g = unit(rng));
  std::vector<double> nodes{-1.0};
  double acc = 0.0;
  for (int i = 0; i + 1 < 2 * n; ++i) nodes.push_back(-1.0 + 2.0 * (acc += gaps[i]) / total);
  nodes.push_back(1.0);
  return nodes;
}

FeFunction solved(const TestProblem& tp, int n, int k) {
  const double alpha = grading_exponent(k, tp.lambda, 1.0);
  auto mesh = std::make_shared<const GradedMesh>(build_mesh(MeshParams::make(n, alpha, tp.problem.eps)));
  return solve_problem(tp.problem, mesh, std::make_shared<const ReferenceElement>(k)).solution;
}

}  // namespace

TEST_CASE("interpolation reproduces polynomials of degree k") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  for (int k = 1; k <= 4; ++k) {
    const auto dofs = dof_map(8, 0.3, 1e-4, k);
    auto poly = [k](double x) {
      double v = 0.0;
      for (int p = 0; p <= k; ++p) v = v * x + (p + 1.0) / (k + 1.0);
      return v;
    };
    const auto uI = interpolant(poly, dofs);
    for (int s = 0; s < 100; ++s) {
      const double x = sym(rng);
      CHECK(uI.value(x) == doctest::Approx(poly(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("error norms of an exact interpolant vanish") {
  ManufacturedSolution cubic{[](double x) { return x * x * x - x; },
                             [](double x) { return 3 * x * x - 1; },
                             [](double x) { return 6 * x; }};
  const auto dofs = dof_map(16, 0.2, 1e-6, 3);
  const auto r = error_norms(cubic, interpolant(cubic.u, dofs), 1e-6);
  CHECK(r.energy <= 1e-11);
  CHECK(r.h1_semi <= 1e-10);
}

TEST_CASE("energy norm of v = x") {
  ManufacturedSolution lin{[](double x) { return x; }, [](double) { return 1.0; },
                           [](double) { return 0.0; }};
  for (double eps : {1.0, 1e-4, 1e-10}) {
    const auto dofs = dof_map(8, 0.5, eps, 1);
    const FeFunction z(dofs, std::vector<double>(dofs.num_dofs(), 0.0));
    const auto r = error_norms(lin, z, eps);
    CHECK(r.energy == doctest::Approx(std::sqrt(2.0 * eps + 2.0 / 3.0)).epsilon(1e-13));
    CHECK(r.energy * r.energy ==
          doctest::Approx(eps * r.h1_semi * r.h1_semi + r.l2 * r.l2).epsilon(1e-13));
    CHECK(r.energy >= r.l2);
  }
}

TEST_CASE("piecewise linear errors on the example at N = 512") {
  const auto tp = sun_stynes(1e-8, 0.005);
  const auto uN = solved(tp, 512, 1);
  const auto r = error_norms(tp.solution, uN, 1e-8);
  // reference values 9.04e-05 and 6.68e-07
  CHECK(r.energy == doctest::Approx(9.04e-5).epsilon(0.01));
  CHECK(r.l2 == doctest::Approx(6.68e-7).epsilon(0.01));
}

TEST_CASE("error quadrature refinement does not move the errors") {
  const auto tp = sun_stynes(1e-8, 0.005);
  for (int k = 1; k <= 3; ++k) {
    const auto uN = solved(tp, 64, k);
    const auto base = error_norms(tp.solution, uN, 1e-8);
    const auto more_q = error_norms(tp.solution, uN, 1e-8, ErrorQuadrature{2 * (k + 3), 2, 5});
    const auto more_sub = error_norms(tp.solution, uN, 1e-8, ErrorQuadrature{0, 3, 6});
    CHECK(std::abs(more_q.energy / base.energy - 1.0) <= 0.005);
    CHECK(std::abs(more_sub.energy / base.energy - 1.0) <= 0.005);
    CHECK(std::abs(more_sub.l2 / base.l2 - 1.0) <= 0.005);
    CHECK(base.quadrature_points_per_element > 0);
  }
}

TEST_CASE("interpolation error rates") {
  const double eps = 1e-8;
  const auto tp = sun_stynes(eps, 0.005);
  for (int k = 1; k <= 3; ++k) {
    const double alpha = grading_exponent(k, 0.005, 1.0);
    std::vector<double> l2, energy;
    for (int n : {128, 256}) {
      const auto dofs = dof_map(n, alpha, eps, k);
      const auto uI = interpolant(tp.solution.u, dofs);
      l2.push_back(interpolation_l2_error(tp.solution, uI));
      energy.push_back(error_norms(tp.solution, uI, eps).energy);
    }
    INFO("k=" << k);
    CHECK(convergence_rate(l2[0], l2[1]) == doctest::Approx(k + 1.0).epsilon(0.1 / (k + 1.0)));
    CHECK(convergence_rate(energy[0], energy[1]) == doctest::Approx(k).epsilon(0.1 / k));
  }
}

TEST_CASE("supercloseness") {
  const double eps = 1e-8;
  const auto tp = sun_stynes(eps, 0.005);
  const auto uN = solved(tp, 16, 1);
  CHECK(supercloseness(uN, uN, eps) == 0.0);

  std::vector<double> sc;
  for (int n : {256, 512}) {
    const auto u = solved(tp, n, 1);
    const auto uI = interpolant(tp.solution.u, u.dofs());
    const double s = supercloseness(uI, u, eps);
    const auto full = error_norms(tp.solution, u, eps);
    const auto interp = error_norms(tp.solution, uI, eps);
    // triangle inequality through u_I
    CHECK(full.energy <= (interp.energy + s) * (1.0 + 1e-12));
    sc.push_back(s);
  }
  CHECK(convergence_rate(sc[0], sc[1]) == doctest::Approx(2.0).epsilon(0.075));

  const auto other = solved(tp, 32, 1);
  CHECK_THROWS_AS(supercloseness(uN, other, eps), Error);
}

TEST_CASE("exact L2 norm of piecewise linears") {
  const auto dofs = dof_map({-1.0, 0.0, 1.0}, 1);
  const FeFunction hat(dofs, {0.0, 1.0, 0.0});
  CHECK(p1_exact_l2(hat, -1, 1) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  const FeFunction z(dofs, {0.0, 0.0, 0.0});
  CHECK(p1_exact_l2(z, -1, 1) == 0.0);
  CHECK_THROWS_AS(p1_exact_l2(hat, 1, -1), Error);

  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    const auto rd = dof_map(random_nodes(rng, 6), 1);
    std::vector<double> c(rd.num_dofs());
    for (auto& v : c) v = d(rng);
    const FeFunction fe(rd, c);
    ManufacturedSolution as_exact{[&fe](double x) { return fe.value(x); },
                                  [](double) { return 0.0; }, [](double) { return 0.0; }};
    const FeFunction zero_fe(rd, std::vector<double>(rd.num_dofs(), 0.0));
    const double quad = error_norms(as_exact, zero_fe, 1.0).l2;
    CHECK(p1_exact_l2(fe, -6, 6) == doctest::Approx(quad).epsilon(1e-12));
  }
}

TEST_CASE("discrete norm equivalence") {
  const auto dofs = dof_map({-1.0, 0.0, 1.0}, 1);
  const auto hat = norm_equivalence_check(FeFunction(dofs, {0.0, 1.0, 0.0}), -1, 1);
  CHECK(hat.lhs == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hat.rhs == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(hat.holds);

  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int s = 0; s < 1000; ++s) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const auto rd = dof_map(random_nodes(rng, n), 1);
    std::vector<double> c(rd.num_dofs());
    for (auto& v : c) v = d(rng);
    const int left = -n + static_cast<int>(rng() % n);
    const int right = left + 1 + static_cast<int>(rng() % (n - left));
    const auto r = norm_equivalence_check(FeFunction(rd, c), left, right);
    CHECK(r.holds);
  }
}

TEST_CASE("norm equivalence is for piecewise linears only") {
  const auto dofs = dof_map({-1.0, 0.0, 1.0}, 2);
  CHECK_THROWS_AS(p1_exact_l2(FeFunction(dofs, std::vector<double>(5, 0.0)), -1, 1), Error);
}
