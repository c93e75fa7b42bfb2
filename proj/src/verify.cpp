#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <sstream>

#include "tpfem/error.hpp"
#include "tpfem/studies.hpp"

namespace tpfem {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Runs a check body, turning thrown errors into failures.
CheckOutcome guarded(const std::string& name, const std::function<CheckOutcome()>& body) {
  try {
    CheckOutcome out = body();
    out.name = name;
    return out;
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

double log_uniform(std::mt19937_64& rng, double lo) {
  return std::pow(10.0, std::uniform_real_distribution<double>(lo, 0.0)(rng));
}

std::vector<double> random_nodes(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> gap(0.05, 1.0);
  std::vector<double> g(static_cast<std::size_t>(2 * n));
  double total = 0.0;
  for (auto& v : g) total += (v = gap(rng));
  std::vector<double> nodes{-1.0};
  double acc = 0.0;
  for (int i = 0; i + 1 < 2 * n; ++i) nodes.push_back(-1.0 + 2.0 * (acc += g[i]) / total);
  nodes.push_back(1.0);
  return nodes;
}

DofMap p1_dofs(std::vector<double> nodes) {
  return DofMap(std::make_shared<const GradedMesh>(GradedMesh::from_nodes(std::move(nodes))),
                std::make_shared<const ReferenceElement>(1));
}

CheckOutcome mesh_oddness_monotonicity() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  int odd_fail = 0;
  int mono_fail = 0;
  for (int s = 0; s < 10000; ++s) {
    const auto p = MeshParams::make(8, log_uniform(rng, -10.0), log_uniform(rng, -16.0));
    double a = sym(rng);
    double b = sym(rng);
    if (phi(-a, p) != -phi(a, p)) ++odd_fail;
    if (a > b) std::swap(a, b);
    if (b - a >= 1e-9 && !(phi(a, p) < phi(b, p))) ++mono_fail;
  }
  for (int s = 0; s < 100; ++s) {
    const int n = 2 + static_cast<int>(rng() % 200);
    const auto mesh = build_mesh(MeshParams::make(n, log_uniform(rng, -10.0), log_uniform(rng, -14.0)));
    for (int i = 0; i <= n; ++i) {
      if (mesh.node(-i) != -mesh.node(i)) ++odd_fail;
      if (i > 0 && !(mesh.node(i - 1) < mesh.node(i))) ++mono_fail;
    }
  }
  return {"", odd_fail == 0 && mono_fail == 0,
          std::to_string(odd_fail) + " oddness and " + std::to_string(mono_fail) +
              " monotonicity violations"};
}

CheckOutcome kappa_bounds() {
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double alpha = std::pow(10.0, -10.0 + 10.0 * i / 49.0);
    for (int j = 0; j < 50; ++j) {
      const double eps = std::pow(10.0, -16.0 + 16.0 * j / 49.0);
      const double k = kappa(alpha, eps);
      const double upper = std::min(1.0 / alpha, 1.0 + std::abs(std::log2(std::sqrt(eps))));
      if (k < std::log(2.0) * (1.0 - 1e-14) || k > upper * (1.0 + 1e-14)) ++bad;
      worst = std::max(worst, k / upper);
    }
  }
  return {"", bad == 0, "2500 grid points, max kappa/upper = " + num(worst)};
}

CheckOutcome uniform_at_alpha_one() {
  double worst = 0.0;
  for (int n : {2, 4, 7, 100, 1024}) {
    const auto mesh = build_mesh(MeshParams::make(n, 1.0, 1e-6));
    for (int i = -n; i <= n; ++i) {
      const double exact = static_cast<double>(i) / n;
      if (exact != 0.0) worst = std::max(worst, std::abs(mesh.node(i) - exact) / std::abs(exact));
    }
  }
  return {"", worst <= 2.3e-16, "max relative deviation " + num(worst)};
}

CheckOutcome lemma_constants() {
  const std::vector<int> ns{64, 128, 256, 512};
  int unstable = 0;
  double worst = 0.0;
  for (double eps : {1.0, 1e-4, 1e-8, 1e-12}) {
    for (int k = 1; k <= 4; ++k) {
      const double alpha = grading_exponent(k, 0.005, 1.0);
      for (const auto& s : lemma_stability(alpha, eps, ns, 0.005, k)) {
        worst = std::max(worst, s.max_ratio);
        if (!s.stable) ++unstable;
      }
      for (const auto& s : lemma_stability(alpha, eps, ns, 2.0 * alpha, k)) {
        worst = std::max(worst, s.max_ratio);
        if (!s.stable) ++unstable;
      }
    }
  }
  return {"", unstable == 0, "max constant growth under doubling " + num(worst)};
}

CheckOutcome scalar_inequalities() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tol = 1e-12;
  int bad = 0;
  for (int s = 0; s < 1000; ++s) {
    const double alpha = std::max(1e-3, unit(rng));
    const double a = 10.0 * unit(rng) + 1e-12;
    const double b = 10.0 * unit(rng) + 1e-12;
    const double rhs = std::pow(2.0, 1.0 / alpha - 1.0) * (std::pow(a, 1.0 / alpha) + std::pow(b, 1.0 / alpha));
    if (std::isfinite(rhs) && std::pow(a + b, 1.0 / alpha) > rhs * (1.0 + tol)) ++bad;
    if (std::pow(a + b, alpha) > (std::pow(a, alpha) + std::pow(b, alpha)) * (1.0 + tol)) ++bad;
  }
  for (int s = 0; s < 1000; ++s) {
    const double alpha = unit(rng);
    const double c = unit(rng);
    const double mid = std::pow(1.0 + c, alpha) - std::pow(c, alpha);
    if (std::pow(2.0, alpha) - 1.0 > mid + tol || mid > 1.0 + tol) ++bad;
  }
  for (int s = 0; s < 1000; ++s) {
    const double alpha = 1.0 - unit(rng);
    const double two = std::expm1(alpha * std::log(2.0));
    if (alpha * std::log(2.0) > two * (1.0 + tol) || two > alpha * (1.0 + tol)) ++bad;
  }
  return {"", bad == 0, std::to_string(bad) + " violations in 3000 samples"};
}

CheckOutcome basis_properties() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const ReferenceElement ref(k);
    const auto t = ref.nodes();
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j) worst = std::max(worst, std::abs(ref.basis(j, t[i]) - (i == j)));
    for (int s = 0; s < 100; ++s) {
      const double x = unit(rng);
      double sum = 0.0;
      for (int j = 0; j <= k; ++j) sum += ref.basis(j, x);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return {"", worst <= 1e-12, "max Kronecker / partition-of-unity defect " + num(worst)};
}

CheckOutcome patch_test() {
  SingularPerturbationProblem p;
  p.eps = 1.0;
  p.a = [](double x) { return -x; };
  p.a_prime = [](double) { return -1.0; };
  p.c = [](double) { return 1.0; };
  p.f = [](double x) { return 3.0 + x * x; };
  double worst = 0.0;
  for (double alpha : {1.0, 0.3, 0.01}) {
    auto mesh = std::make_shared<const GradedMesh>(build_mesh(MeshParams::make(16, alpha, 1e-6)));
    const auto res = solve_problem(p, mesh, std::make_shared<const ReferenceElement>(2));
    const auto& dofs = res.solution.dofs();
    for (int d = 0; d < dofs.num_dofs(); ++d) {
      const double x = dofs.coordinate(d);
      worst = std::max(worst, std::abs(res.solution.coefficients()[d] - (1.0 - x * x)));
    }
  }
  return {"", worst <= 1e-10, "max DOF deviation " + num(worst)};
}

CheckOutcome p1_exact_norm() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const auto dofs = p1_dofs(random_nodes(rng, n));
    std::vector<double> c(static_cast<std::size_t>(dofs.num_dofs()));
    for (auto& v : c) v = d(rng);
    const FeFunction fe(dofs, c);
    const ManufacturedSolution as_exact{[&fe](double x) { return fe.value(x); },
                                        [](double) { return 0.0; }, [](double) { return 0.0; }};
    const FeFunction zero(dofs, std::vector<double>(c.size(), 0.0));
    const double quad = error_norms(as_exact, zero, 1.0).l2;
    const double exact = p1_exact_l2(fe, -n, n);
    worst = std::max(worst, std::abs(exact - quad) / std::max(exact, 1e-300));
  }
  return {"", worst <= 1e-12, "max relative difference " + num(worst)};
}

CheckOutcome norm_equivalence() {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  int bad = 0;
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const auto dofs = p1_dofs(random_nodes(rng, n));
    std::vector<double> c(static_cast<std::size_t>(dofs.num_dofs()));
    for (auto& v : c) v = d(rng);
    const int left = -n + static_cast<int>(rng() % n);
    const int right = left + 1 + static_cast<int>(rng() % (n - left));
    const auto r = norm_equivalence_check(FeFunction(dofs, c), left, right);
    if (!r.holds) ++bad;
    if (r.rhs > 0.0) worst = std::max(worst, r.lhs / r.rhs);
  }
  return {"", bad == 0, "1000 random functions, max lhs/rhs " + num(worst)};
}

CheckOutcome csv_determinism() {
  SweepSpec s;
  s.k_list = {1, 2};
  s.n_list = {8, 16, 32};
  s.eps_list = {1e-2, 1e-10};
  s.threads = 1;
  const auto serial = format_csv(run_sweep(s));
  s.threads = 4;
  const auto parallel = format_csv(run_sweep(s));
  const auto again = format_csv(run_sweep(s));
  return {"", serial == parallel && parallel == again, "three runs compared byte for byte"};
}

CheckOutcome derivative_consistency() {
  double worst = 0.0;
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  for (double eps : {1.0, 1e-4, 1e-8, 1e-14}) {
    for (double lambda : {1e-13, 0.005, 0.1}) {
      const auto tp = sun_stynes(eps, lambda);
      const auto& u = tp.solution.u;
      for (int s = 0; s < 50; ++s) {
        const double x = sym(rng);
        const double h = 1e-3 * (std::sqrt(eps) + std::abs(x));
        const double fd = (-u(x + 2 * h) + 8 * u(x + h) - 8 * u(x - h) + u(x - 2 * h)) / (12 * h);
        const double env = 1.0 + std::pow(std::sqrt(eps) + std::abs(x), lambda - 1.0);
        worst = std::max(worst, std::abs(fd - tp.solution.u_prime(x)) / env);
      }
    }
  }
  return {"", worst <= 1e-6, "max scaled u' defect " + num(worst)};
}

std::vector<int> powers_of_two(int lo, int hi) {
  std::vector<int> out;
  for (int n = lo; n <= hi; n *= 2) out.push_back(n);
  return out;
}

CheckOutcome from_report(const RegressionReport& report) {
  std::string detail = report.summary();
  detail.erase(0, detail.find(": ") + 2);
  while (!detail.empty() && detail.back() == '\n') detail.pop_back();
  return {"", report.passed, detail};
}

}  // namespace

std::vector<CheckOutcome> run_property_checks() {
  return {
      guarded("mesh oddness and monotonicity", mesh_oddness_monotonicity),
      guarded("kappa bounds", kappa_bounds),
      guarded("uniform mesh at alpha = 1", uniform_at_alpha_one),
      guarded("mesh lemma constants stable", lemma_constants),
      guarded("auxiliary scalar inequalities", scalar_inequalities),
      guarded("basis Kronecker and partition of unity", basis_properties),
      guarded("quadratic patch test", patch_test),
      guarded("exact P1 norm against quadrature", p1_exact_norm),
      guarded("discrete norm equivalence", norm_equivalence),
      guarded("manufactured derivative consistency", derivative_consistency),
      guarded("CSV determinism", csv_determinism),
  };
}

std::vector<CheckOutcome> run_regression_checks(const VerifyOptions& options) {
  std::vector<CheckOutcome> out;
  out.push_back(guarded("reference table linear", [&] {
    SweepSpec s;
    s.k_list = {1};
    s.n_list = powers_of_two(8, 4096);
    s.eps_list = {1e-8, 1e-12};
    s.threads = options.threads;
    return from_report(compare_reference(run_sweep(s), ReferenceTable::linear,
                                         options.linear_tolerance_factor,
                                         options.linear_rate_tolerance));
  }));
  out.push_back(guarded("reference table high-order", [&] {
    SweepSpec s;
    s.k_list = {1, 2, 3, 4};
    s.n_list = {512, 1024};
    s.eps_list = {1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14};
    s.threads = options.threads;
    return from_report(compare_reference(run_sweep(s), ReferenceTable::high_order,
                                         options.high_order_tolerance_factor,
                                         options.high_order_rate_tolerance));
  }));
  return out;
}

std::vector<CheckOutcome> run_verification(const VerifyOptions& options) {
  auto out = run_property_checks();
  for (auto& c : run_regression_checks(options)) out.push_back(std::move(c));
  return out;
}

}  // namespace tpfem
