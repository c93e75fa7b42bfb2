#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "tpfem/error.hpp"
#include "tpfem/meshgen.hpp"

using namespace tpfem;

namespace {

// log-uniform sample in [10^lo, 1]
double log_uniform(std::mt19937_64& rng, double lo) {
  std::uniform_real_distribution<double> d(lo, 0.0);
  return std::pow(10.0, d(rng));
}

}  // namespace

TEST_CASE("bracket collapses to one at alpha = 1") {
  for (double eps : {1.0, 1e-2, 1e-8, 1e-14}) CHECK(bracket(1.0, eps) == 1.0);
}

TEST_CASE("bracket against 50-digit reference values") {
  // reference values from mpmath at 50 digits
  CHECK(bracket(0.5, 1.0) == doctest::Approx(0.41421356237309504880).epsilon(1e-15));
  const double small = bracket(1e-6, 1e-12);
  CHECK(std::abs(small - 1.381541612423727455177e-5) / 1.381541612423727455177e-5 <= 1e-12);
}

TEST_CASE("kappa values") {
  for (double eps : {1.0, 1e-2, 1e-8, 1e-16}) CHECK(kappa(1.0, eps) == 1.0);
  CHECK(kappa(0.5, 1.0) == doctest::Approx(0.82842712474619009760).epsilon(1e-15));
}

TEST_CASE("kappa two-sided bound on a 50x50 log grid") {
  for (int i = 0; i < 50; ++i) {
    const double alpha = std::pow(10.0, -10.0 + 10.0 * i / 49.0);
    for (int j = 0; j < 50; ++j) {
      const double eps = std::pow(10.0, -16.0 + 16.0 * j / 49.0);
      const double k = kappa(alpha, eps);
      const double upper = std::min(1.0 / alpha, 1.0 + std::abs(std::log2(std::sqrt(eps))));
      CHECK(k >= std::log(2.0) * (1.0 - 1e-14));
      CHECK(k <= upper * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("bracket rejects parameters outside (0, 1]") {
  CHECK_THROWS_AS(bracket(0.0, 0.5), Error);
  CHECK_THROWS_AS(bracket(1.5, 0.5), Error);
  CHECK_THROWS_AS(bracket(0.5, 0.0), Error);
  CHECK_THROWS_AS(bracket(0.5, 2.0), Error);
  try {
    kappa(-1.0, 0.5);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parameter);
  }
}

TEST_CASE("phi endpoints and alpha = 1 identity") {
  const auto p = MeshParams::make(8, 0.3, 1e-6);
  CHECK(phi(0.0, p) == 0.0);
  CHECK(phi(1.0, p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phi(-1.0, p) == doctest::Approx(-1.0).epsilon(1e-14));
  const auto uniform = MeshParams::make(8, 1.0, 1e-6);
  for (double xi : {-1.0, -0.3, 0.0, 0.125, 0.77, 1.0}) CHECK(phi(xi, uniform) == xi);
}

TEST_CASE("phi at alpha = 0.5, eps = 0.25, xi = 0.5") {
  // (0.25^0.25 + 0.5 (1.5^0.5 - 0.25^0.25))^2 - 0.5 at 50 digits
  const auto p = MeshParams::make(4, 0.5, 0.25);
  CHECK(phi(0.5, p) == doctest::Approx(0.43301270189221932338).epsilon(1e-14));
}

TEST_CASE("phi rejects |xi| > 1") {
  const auto p = MeshParams::make(4, 0.5, 0.25);
  CHECK_THROWS_AS(phi(1.0000001, p), Error);
  CHECK_THROWS_AS(phi(-2.0, p), Error);
}

TEST_CASE("phi is odd bit for bit") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 2000; ++s) {
    const auto p = MeshParams::make(8, log_uniform(rng, -10.0), log_uniform(rng, -16.0));
    const double xi = unit(rng);
    CHECK(phi(-xi, p) == -phi(xi, p));
  }
}

TEST_CASE("phi is strictly increasing on random samples") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  int violations = 0;
  for (int s = 0; s < 10000; ++s) {
    const auto p = MeshParams::make(8, log_uniform(rng, -10.0), log_uniform(rng, -16.0));
    double a = sym(rng);
    double b = sym(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    // gaps below the resolution of the image are not meaningful in double
    if (b - a < 1e-9) continue;
    if (!(phi(a, p) < phi(b, p))) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("uniform mesh at alpha = 1") {
  const auto mesh = build_mesh(MeshParams::make(4, 1.0, 1e-8));
  const std::vector<double> expected{-1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1};
  REQUIRE(mesh.num_nodes() == 9);
  for (int i = 0; i < 9; ++i) CHECK(mesh.nodes()[i] == expected[i]);

  const auto big = build_mesh(MeshParams::make(100, 1.0, 1e-3));
  for (int i = -100; i <= 100; ++i) {
    const double exact = i / 100.0;
    CHECK(std::abs(big.node(i) - exact) <= std::numeric_limits<double>::epsilon() * std::abs(exact));
  }
}

TEST_CASE("graded mesh invariants") {
  std::mt19937_64 rng(13);
  for (int s = 0; s < 50; ++s) {
    const int n = 2 + static_cast<int>(rng() % 300);
    const auto p = MeshParams::make(n, log_uniform(rng, -10.0), log_uniform(rng, -14.0));
    const auto mesh = build_mesh(p);
    CHECK(mesh.node(-n) == -1.0);
    CHECK(mesh.node(0) == 0.0);
    CHECK(mesh.node(n) == 1.0);
    for (int i = -n + 1; i <= n; ++i) CHECK(mesh.node(i - 1) < mesh.node(i));
    for (int i = 0; i <= n; ++i) CHECK(mesh.node(-i) == -mesh.node(i));
    CHECK(mesh.kappa() >= std::log(2.0) * (1 - 1e-14));
    CHECK(mesh.midspan(1) == doctest::Approx(0.5 * (mesh.interval(1) + mesh.interval(2))));
  }
}

TEST_CASE("mesh parameters are validated") {
  CHECK_THROWS_AS(MeshParams::make(1, 0.5, 0.5), Error);
  CHECK_THROWS_AS(MeshParams::make(8, 0.0, 0.5), Error);
  CHECK_THROWS_AS(build_mesh(MeshParams{8, 2.0, 0.5}), Error);
}

TEST_CASE("custom meshes must be increasing and span [-1, 1]") {
  CHECK_NOTHROW(GradedMesh::from_nodes({-1.0, 0.0, 1.0}));
  CHECK_THROWS_AS(GradedMesh::from_nodes({-1.0, 0.5, 0.0, 0.7, 1.0}), Error);
  CHECK_THROWS_AS(GradedMesh::from_nodes({-1.0, 0.0, 0.9}), Error);
  CHECK_THROWS_AS(GradedMesh::from_nodes({-1.0, 1.0}), Error);
  const auto custom = GradedMesh::from_nodes({-1.0, 0.0, 1.0});
  CHECK_FALSE(custom.params().has_value());
  CHECK_THROWS_AS(verify_mesh_lemmas(custom, 0.5, 1), Error);
}

TEST_CASE("first node bound when eps lies below h^(2/alpha)") {
  // alpha = 1/8, N = 64: h^(2/alpha) = 64^-16 ~ 1.3e-29, so eps = 1e-40 is in
  // range and x_1 <= (eps^(alpha/2) + h B)^(1/alpha) <= (2h)^(1/alpha) <= 2^8 h^4.
  const auto p = MeshParams::make(64, 0.125, 1e-40);
  const auto mesh = build_mesh(p);
  const double h = p.h();
  CHECK(mesh.interval(1) <= std::pow(2.0, 8.0) * std::pow(h, 8.0));
  CHECK(mesh.interval(1) <= std::pow(2.0, 8.0) * std::pow(h, 4.0));
  const auto report = verify_mesh_lemmas(mesh, 0.5, 4);
  const auto* first = report.find("first_node");
  REQUIRE(first != nullptr);
  CHECK(first->applicable);
  CHECK(first->fitted_constant <= std::pow(2.0, 8.0));

  // for eps = 1e-8 the same N is outside the lemma's range
  const auto coarse = build_mesh(MeshParams::make(64, 0.125, 1e-8));
  CHECK_FALSE(verify_mesh_lemmas(coarse, 0.5, 4).find("first_node")->applicable);
}

TEST_CASE("interval lemma on the uniform mesh") {
  const auto mesh = build_mesh(MeshParams::make(32, 1.0, 1e-6));
  const auto report = verify_mesh_lemmas(mesh, 1.0, 1);
  CHECK(report.find("interval")->fitted_constant == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(report.find("interval_difference")->applicable);
  CHECK(report.ok());
}

TEST_CASE("lemma fitted constants are stable under N doubling") {
  const std::vector<int> ns{64, 128, 256};
  const double alpha = 0.25;
  const double eps = 1e-8;

  // h_i <= C h and the weighted h_i^k bound with hat-alpha = lambda
  for (const auto& s : lemma_stability(alpha, eps, ns, 0.5, 2)) {
    INFO(s.name);
    for (std::size_t i = 1; i < s.constants.size(); ++i) {
      if (std::isnan(s.constants[i])) continue;
      const double ratio = s.constants[i] / s.constants[i - 1];
      CHECK(ratio >= 0.5);
      CHECK(ratio <= 2.0);
    }
    CHECK(s.stable);
  }

  // weighted difference bound with hat-alpha = 2 alpha
  const auto diff = lemma_stability(alpha, eps, ns, 2.0 * alpha, 1);
  bool seen = false;
  for (const auto& s : diff) {
    if (s.name != "weighted_interval_difference") continue;
    seen = true;
    CHECK(s.stable);
    CHECK(s.max_ratio <= 1.25);
    CHECK(std::isfinite(s.constants.back()));
  }
  CHECK(seen);
}

TEST_CASE("lemma stability across the admissible alpha range") {
  const std::vector<int> ns{64, 128, 256, 512};
  for (double eps : {1.0, 1e-4, 1e-8, 1e-12}) {
    for (int k : {1, 2, 3, 4}) {
      const double lambda = 0.005;
      const double alpha = std::min(lambda / (k + 1), 1.0 / (2.0 * (k + 1)));
      for (const auto& s : lemma_stability(alpha, eps, ns, lambda, k)) {
        INFO(s.name << " eps=" << eps << " k=" << k << " max ratio " << s.max_ratio);
        CHECK(s.stable);
      }
    }
  }
}

TEST_CASE("auxiliary scalar inequalities hold on random points") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tol = 1e-12;
  for (int s = 0; s < 1000; ++s) {
    const double alpha = std::max(1e-3, unit(rng));
    const double a = 10.0 * unit(rng) + 1e-12;
    const double b = 10.0 * unit(rng) + 1e-12;
    // convexity of t^(1/alpha); alpha bounded away from 0 to keep powers finite
    const double lhs1 = std::pow(a + b, 1.0 / alpha);
    const double rhs1 = std::pow(2.0, 1.0 / alpha - 1.0) * (std::pow(a, 1.0 / alpha) + std::pow(b, 1.0 / alpha));
    if (std::isfinite(rhs1)) CHECK(lhs1 <= rhs1 * (1.0 + tol));
    CHECK(std::pow(a + b, alpha) <= (std::pow(a, alpha) + std::pow(b, alpha)) * (1.0 + tol));
  }
  for (int s = 0; s < 1000; ++s) {
    const double alpha = unit(rng);
    const double c = unit(rng);
    const double mid = std::pow(1.0 + c, alpha) - std::pow(c, alpha);
    CHECK(std::pow(2.0, alpha) - 1.0 <= mid + tol);
    CHECK(mid <= 1.0 + tol);
  }
  for (int s = 0; s < 1000; ++s) {
    const double alpha = 1.0 - unit(rng);  // (0, 1]
    const double two = std::expm1(alpha * std::log(2.0));
    CHECK(alpha * std::log(2.0) <= two * (1.0 + tol));
    CHECK(two <= alpha * (1.0 + tol));
  }
}
