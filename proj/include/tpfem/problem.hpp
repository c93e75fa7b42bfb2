#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tpfem {

using ScalarFunction = std::function<double(double)>;

/// -eps u'' + a u' + c u = f on (-1, 1), u(-1) = nu_left, u(1) = nu_right,
/// with a simple interior turning point a(x0) = 0 at x0 = 0.
struct SingularPerturbationProblem {
  double eps = 1.0;
  double x0 = 0.0;
  ScalarFunction a;
  ScalarFunction a_prime;
  ScalarFunction c;
  ScalarFunction f;
  double nu_left = 0.0;
  double nu_right = 0.0;
};

struct SpectralParams {
  double lambda_bar = 0.0;  // c(0) / |a'(0)|
  double lambda = 0.0;      // layer exponent in (0, lambda_bar]
  double gamma = 0.0;       // min over the grid of c - a'/2
};

struct ManufacturedSolution {
  ScalarFunction u;
  ScalarFunction u_prime;
  ScalarFunction u_double_prime;
};

struct TestProblem {
  SingularPerturbationProblem problem;
  ManufacturedSolution solution;
  double lambda = 0.0;
};

/// Checks the turning point structure, b > 0, c >= 0, c(0) > 0 and the
/// coercivity margin c - a'/2 > 0 on a grid of `grid_size` uniform points
/// plus a geometric cluster around x = 0. Every violated assumption is
/// listed in the thrown ErrorKind::validation message.
/// `lambda` defaults to lambda_bar.
SpectralParams validate(const SingularPerturbationProblem& problem, int grid_size = 10000,
                        std::optional<double> lambda = std::nullopt);

/// The cusp-layer example with a = -x(1 + x^2), c = lambda(1 + x^3) and
/// exact solution
///   u = (x^2+eps)^(lambda/2) + x (x^2+eps)^((lambda-1)/2)
///       - (1+eps)^(lambda/2) (1 + x (1+eps)^(-1/2)).
TestProblem sun_stynes(double eps, double lambda);

/// Looks a named problem up. Only "sun-stynes" is known.
TestProblem make_problem(const std::string& name, double eps, double lambda);

/// max |u^(order)(x)| / (1 + (sqrt(eps) + |x|)^(lambda - order)) over a grid
/// clustered at the turning point.
double derivative_envelope_check(const ManufacturedSolution& solution, double eps, double lambda,
                                 int order);

}  // namespace tpfem
