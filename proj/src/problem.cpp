#include "tpfem/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpfem/error.hpp"

namespace tpfem {

namespace {

// log(x^2 + eps) without losing x^2 when it is far below eps.
double log_shifted_square(double x, double eps) {
  const double x2 = x * x;
  if (x2 < eps) return std::log(eps) + std::log1p(x2 / eps);
  return std::log(x2 + eps);
}

std::vector<double> validation_grid(int grid_size) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(grid_size) + 2002);
  for (int i = 0; i <= grid_size; ++i) {
    grid.push_back(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_size));
  }
  // 10^3 points clustered geometrically on both sides of the turning point
  for (int i = 0; i < 500; ++i) {
    const double x = std::pow(10.0, -12.0 + 12.0 * static_cast<double>(i) / 500.0);
    grid.push_back(x);
    grid.push_back(-x);
  }
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

SpectralParams validate(const SingularPerturbationProblem& problem, int grid_size,
                        std::optional<double> lambda) {
  if (grid_size < 100) fail(ErrorKind::parameter, "validation grid needs at least 100 points");
  if (!problem.a || !problem.a_prime || !problem.c || !problem.f) {
    fail(ErrorKind::validation, "problem is missing a coefficient function");
  }
  if (!(problem.eps > 0.0 && problem.eps <= 1.0)) {
    fail(ErrorKind::parameter, "eps must lie in (0, 1]");
  }

  std::vector<std::string> violations;
  const double x0 = problem.x0;
  if (x0 != 0.0) violations.push_back("turning point must be at x0 = 0");
  if (!(std::abs(problem.a(x0)) <= 1e-12)) {
    violations.push_back("a(x0) != 0: not a turning point problem");
  }

  const auto grid = validation_grid(grid_size);
  double gamma = std::numeric_limits<double>::infinity();
  bool b_ok = true;
  bool c_ok = true;
  for (double x : grid) {
    if (x != x0) {
      const double b = -problem.a(x) / (x - x0);
      if (!(b > 0.0)) b_ok = false;
    }
    if (!(problem.c(x) >= 0.0)) c_ok = false;
    gamma = std::min(gamma, problem.c(x) - 0.5 * problem.a_prime(x));
  }
  if (!b_ok) violations.push_back("b(x) = -a(x)/(x - x0) is not positive on the grid");
  if (!c_ok) violations.push_back("c(x) is negative somewhere on the grid");
  const double c0 = problem.c(x0);
  if (!(c0 > 0.0)) violations.push_back("c(x0) must be positive");
  if (!(gamma > 0.0)) {
    std::ostringstream os;
    os << "coercivity margin min(c - a'/2) = " << gamma
       << " is not positive; transform the problem before solving";
    violations.push_back(os.str());
  }

  const double slope = std::abs(problem.a_prime(x0));
  const double lambda_bar = slope > 0.0 ? c0 / slope : std::numeric_limits<double>::infinity();
  const double lam = lambda.value_or(lambda_bar);
  if (!(lam > 0.0 && lam <= lambda_bar)) {
    std::ostringstream os;
    os << "lambda = " << lam << " must lie in (0, lambda_bar = " << lambda_bar << "]";
    violations.push_back(os.str());
  }

  if (!violations.empty()) {
    std::ostringstream os;
    os << "problem validation failed:";
    for (const auto& v : violations) os << "\n  - " << v;
    fail(ErrorKind::validation, os.str());
  }
  return SpectralParams{lambda_bar, lam, gamma};
}

TestProblem sun_stynes(double eps, double lambda) {
  if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorKind::parameter, "eps must lie in (0, 1]");
  if (!(lambda > 0.0)) fail(ErrorKind::parameter, "lambda must be positive");

  const double shift = std::pow(1.0 + eps, 0.5 * lambda);
  const double slope = shift / std::sqrt(1.0 + eps);
  const double p = 0.5 * lambda;          // exponent of the even part
  const double q = 0.5 * (lambda - 1.0);  // exponent of the odd part

  ManufacturedSolution sol;
  sol.u = [=](double x) {
    const double ls = log_shifted_square(x, eps);
    return std::exp(p * ls) + x * std::exp(q * ls) - shift - slope * x;
  };
  sol.u_prime = [=](double x) {
    const double ls = log_shifted_square(x, eps);
    const double x2 = x * x;
    // d/dx s^p = 2p x s^(p-1);  d/dx x s^q = s^q + 2q x^2 s^(q-1)
    return 2.0 * p * x * std::exp((p - 1.0) * ls) + std::exp(q * ls) +
           2.0 * q * x2 * std::exp((q - 1.0) * ls) - slope;
  };
  sol.u_double_prime = [=](double x) {
    const double ls = log_shifted_square(x, eps);
    const double x2 = x * x;
    const double even = 2.0 * p * std::exp((p - 1.0) * ls) +
                        4.0 * p * (p - 1.0) * x2 * std::exp((p - 2.0) * ls);
    const double odd = 6.0 * q * x * std::exp((q - 1.0) * ls) +
                       4.0 * q * (q - 1.0) * x2 * x * std::exp((q - 2.0) * ls);
    return even + odd;
  };

  SingularPerturbationProblem prob;
  prob.eps = eps;
  prob.a = [](double x) { return -x * (1.0 + x * x); };
  prob.a_prime = [](double x) { return -(1.0 + 3.0 * x * x); };
  prob.c = [lambda](double x) { return lambda * (1.0 + x * x * x); };
  prob.f = [eps, lambda, sol](double x) {
    const double a = -x * (1.0 + x * x);
    const double c = lambda * (1.0 + x * x * x);
    return -eps * sol.u_double_prime(x) + a * sol.u_prime(x) + c * sol.u(x);
  };
  return TestProblem{std::move(prob), std::move(sol), lambda};
}

TestProblem make_problem(const std::string& name, double eps, double lambda) {
  if (name == "sun-stynes") return sun_stynes(eps, lambda);
  fail(ErrorKind::parameter, "unknown problem '" + name + "' (known: sun-stynes)");
}

double derivative_envelope_check(const ManufacturedSolution& solution, double eps, double lambda,
                                 int order) {
  if (order < 0 || order > 2) fail(ErrorKind::parameter, "derivative order must be 0, 1 or 2");
  const ScalarFunction& g = order == 0   ? solution.u
                            : order == 1 ? solution.u_prime
                                         : solution.u_double_prime;
  const double root_eps = std::sqrt(eps);
  double worst = 0.0;
  auto visit = [&](double x) {
    const double envelope = 1.0 + std::pow(root_eps + std::abs(x), lambda - order);
    worst = std::max(worst, std::abs(g(x)) / envelope);
  };
  constexpr int uniform = 2000;
  for (int i = 0; i <= uniform; ++i) visit(-1.0 + 2.0 * i / static_cast<double>(uniform));
  // geometric cluster from far below sqrt(eps) up to 1
  const double lo = std::log10(root_eps) - 4.0;
  constexpr int clustered = 2000;
  for (int i = 0; i <= clustered; ++i) {
    const double x = std::pow(10.0, lo + (0.0 - lo) * i / static_cast<double>(clustered));
    visit(x);
    visit(-x);
  }
  visit(0.0);
  return worst;
}

}  // namespace tpfem
