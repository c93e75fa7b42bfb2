#include "tpfem/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tpfem/error.hpp"

namespace tpfem {

namespace {

void check_alpha_eps(double alpha, double eps) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "alpha must lie in (0, 1], got " << alpha;
    fail(ErrorKind::parameter, os.str());
  }
  if (!(eps > 0.0 && eps <= 1.0)) {
    std::ostringstream os;
    os << "eps must lie in (0, 1], got " << eps;
    fail(ErrorKind::parameter, os.str());
  }
}

// Positive branch: sqrt(eps) * ((1 + xi * B * eps^(-alpha/2))^(1/alpha) - 1),
// written with log1p/expm1 so that neither small alpha nor small xi cancels.
double phi_positive(double xi, double alpha, double eps) {
  if (alpha == 1.0) return xi;
  const double scaled = xi * bracket(alpha, eps) * std::exp(-0.5 * alpha * std::log(eps));
  return std::sqrt(eps) * std::expm1(std::log1p(scaled) / alpha);
}

}  // namespace

MeshParams MeshParams::make(int n, double alpha, double eps) {
  if (n < 2) {
    fail(ErrorKind::parameter, "mesh half-count N must be at least 2, got " + std::to_string(n));
  }
  check_alpha_eps(alpha, eps);
  return MeshParams{n, alpha, eps};
}

double bracket(double alpha, double eps) {
  check_alpha_eps(alpha, eps);
  if (alpha == 1.0) return 1.0;
  const double grown = std::expm1(alpha * std::log1p(std::sqrt(eps)));
  const double shrunk = std::expm1(0.5 * alpha * std::log(eps));
  return grown - shrunk;
}

double kappa(double alpha, double eps) { return bracket(alpha, eps) / alpha; }

double phi(double xi, const MeshParams& params) {
  if (!(std::abs(xi) <= 1.0)) {
    std::ostringstream os;
    os << "phi is defined on [-1, 1], got xi = " << xi;
    fail(ErrorKind::parameter, os.str());
  }
  check_alpha_eps(params.alpha, params.eps);
  if (xi == 0.0) return 0.0;
  if (xi < 0.0) return -phi_positive(-xi, params.alpha, params.eps);
  return phi_positive(xi, params.alpha, params.eps);
}

GradedMesh GradedMesh::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 3 || nodes.size() % 2 == 0) {
    fail(ErrorKind::mesh, "a mesh needs an odd number of nodes, at least 3");
  }
  if (nodes.front() != -1.0 || nodes.back() != 1.0) {
    fail(ErrorKind::mesh, "mesh must span [-1, 1] exactly");
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i - 1] < nodes[i])) {
      fail(ErrorKind::mesh, "mesh nodes must be strictly increasing");
    }
  }
  GradedMesh mesh;
  mesh.n_ = static_cast<int>(nodes.size() / 2);
  mesh.nodes_ = std::move(nodes);
  mesh.kappa_ = std::numeric_limits<double>::quiet_NaN();
  return mesh;
}

GradedMesh build_mesh(const MeshParams& params) {
  const MeshParams p = MeshParams::make(params.n, params.alpha, params.eps);
  const int n = p.n;

  GradedMesh mesh;
  mesh.n_ = n;
  mesh.params_ = p;
  mesh.kappa_ = kappa(p.alpha, p.eps);
  mesh.nodes_.assign(static_cast<std::size_t>(2 * n + 1), 0.0);

  for (int i = 1; i < n; ++i) {
    const double x = phi(static_cast<double>(i) / static_cast<double>(n), p);
    mesh.nodes_[static_cast<std::size_t>(n + i)] = x;
    mesh.nodes_[static_cast<std::size_t>(n - i)] = -x;
  }
  mesh.nodes_.front() = -1.0;
  mesh.nodes_[static_cast<std::size_t>(n)] = 0.0;
  mesh.nodes_.back() = 1.0;

  for (std::size_t i = 1; i < mesh.nodes_.size(); ++i) {
    if (!(mesh.nodes_[i - 1] < mesh.nodes_[i])) {
      std::ostringstream os;
      os << "graded mesh is not strictly increasing at storage index " << i
         << " (N = " << n << ", alpha = " << p.alpha << ", eps = " << p.eps << ")";
      fail(ErrorKind::mesh, os.str());
    }
  }
  return mesh;
}

bool MeshLemmaReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.passed; });
}

const LemmaCheck* MeshLemmaReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

MeshLemmaReport verify_mesh_lemmas(const GradedMesh& mesh, double lambda, int k, double ceiling) {
  if (!mesh.params()) {
    fail(ErrorKind::parameter, "mesh lemmas apply to generated meshes only");
  }
  if (!(lambda > 0.0)) fail(ErrorKind::parameter, "lambda must be positive");
  if (k < 1) fail(ErrorKind::parameter, "element order must be at least 1");

  const MeshParams& p = *mesh.params();
  const int n = p.n;
  const double alpha = p.alpha;
  const double root_eps = std::sqrt(p.eps);
  const double h = p.h();
  const double log_h = std::log(h);
  const double kd = static_cast<double>(k);
  // eps >= h^(2/alpha), compared in logarithms
  const bool eps_above = std::log(p.eps) >= (2.0 / alpha) * log_h;

  MeshLemmaReport report;
  auto add = [&](std::string name, bool applicable, double constant) {
    LemmaCheck c;
    c.name = std::move(name);
    c.applicable = applicable;
    c.fitted_constant = applicable ? constant : std::numeric_limits<double>::quiet_NaN();
    c.passed = !applicable || constant <= ceiling;
    report.checks.push_back(std::move(c));
  };

  {
    double c = 0.0;
    for (int i = 1; i <= n; ++i) c = std::max(c, mesh.interval(i) / h);
    add("interval", true, c);
  }

  {
    const bool applicable = alpha <= std::min(lambda / kd, 1.0);
    double c = 0.0;
    if (applicable) {
      for (int i = 2; i <= n; ++i) {
        const double log_term = kd * std::log(mesh.interval(i)) +
                                (lambda - kd) * std::log(mesh.node(i - 1) + root_eps) - kd * log_h;
        c = std::max(c, std::exp(log_term));
      }
      if (eps_above) {
        const double log_first = kd * std::log(mesh.interval(1)) +
                                 0.5 * (lambda - kd) * std::log(p.eps) - kd * log_h;
        c = std::max(c, std::exp(log_first));
      }
    }
    add("weighted_interval_power", applicable, c);
  }

  {
    const bool applicable = alpha <= 1.0 / kd && !eps_above;
    const double c = applicable ? std::exp(std::log(mesh.node(1)) - kd * log_h) : 0.0;
    add("first_node", applicable, c);
  }

  {
    const bool applicable = alpha <= 0.5;
    double c = 0.0;
    if (applicable) {
      for (int i = 2; i <= n; ++i) {
        const double diff = mesh.interval(i) - mesh.interval(i - 1);
        const double scale = h * h * std::pow(mesh.node(i) + root_eps, 1.0 - 2.0 * alpha);
        c = std::max(c, diff / scale);
      }
    }
    add("interval_difference", applicable, c);
  }

  {
    const bool applicable = alpha <= std::min(lambda / 2.0, 0.5);
    double c = 0.0;
    if (applicable) {
      for (int i = 2; i <= n; ++i) {
        const double diff = mesh.interval(i) - mesh.interval(i - 1);
        const double weight = std::pow(mesh.node(i - 1) + root_eps, lambda - 1.0);
        c = std::max(c, diff * weight / (h * h));
      }
    }
    add("weighted_interval_difference", applicable, c);
  }

  return report;
}

std::vector<LemmaStability> lemma_stability(double alpha, double eps, std::span<const int> n_values,
                                            double lambda, int k, double max_growth) {
  std::vector<LemmaStability> out;
  for (std::size_t run = 0; run < n_values.size(); ++run) {
    const auto mesh = build_mesh(MeshParams::make(n_values[run], alpha, eps));
    // An unbounded ceiling: only growth is judged here.
    const auto report = verify_mesh_lemmas(mesh, lambda, k, std::numeric_limits<double>::infinity());
    if (out.empty()) {
      for (const auto& c : report.checks) out.push_back(LemmaStability{c.name, {}, {}, 0.0, true});
    }
    for (std::size_t j = 0; j < report.checks.size(); ++j) {
      out[j].n_values.push_back(n_values[run]);
      out[j].constants.push_back(report.checks[j].fitted_constant);
    }
  }
  for (auto& s : out) {
    for (std::size_t i = 1; i < s.constants.size(); ++i) {
      const double prev = s.constants[i - 1];
      const double next = s.constants[i];
      if (std::isnan(prev) || std::isnan(next) || prev <= 0.0) continue;
      const double ratio = next / prev;
      s.max_ratio = std::max(s.max_ratio, ratio);
      if (ratio > max_growth) s.stable = false;
    }
  }
  return out;
}

}  // namespace tpfem
