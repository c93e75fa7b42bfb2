#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tpfem {

/// Parameters of the graded mesh: N half-intervals per side, grading
/// exponent alpha and perturbation parameter eps.
struct MeshParams {
  int n = 0;
  double alpha = 1.0;
  double eps = 1.0;

  double h() const { return 1.0 / static_cast<double>(n); }

  /// Checked constructor. Throws ErrorKind::parameter on N < 2 or
  /// alpha, eps outside (0, 1].
  static MeshParams make(int n, double alpha, double eps);
};

/// (1 + sqrt(eps))^alpha - eps^(alpha/2), evaluated without cancellation
/// for small alpha.
double bracket(double alpha, double eps);

/// bracket(alpha, eps) / alpha. Bounded by ln 2 from below and by
/// min(1/alpha, 1 + |log2 sqrt(eps)|) from above.
double kappa(double alpha, double eps);

/// Mesh generating function on [-1, 1]. Odd, increasing, phi(0) = 0,
/// phi(+-1) = +-1.
double phi(double xi, const MeshParams& params);

/// The 2N+1 mesh nodes x_{-N}, ..., x_N on [-1, 1]. Indices follow the
/// symmetric convention: node(i) for i in [-N, N], interval(i) = x_i - x_{i-1}
/// for i in [-N+1, N], midspan(i) = (h_i + h_{i+1}) / 2 for i in [-N+1, N-1].
class GradedMesh {
 public:
  /// Wraps an arbitrary strictly increasing node set with an odd number of
  /// points from -1 to 1. Used for custom meshes and randomized tests.
  static GradedMesh from_nodes(std::vector<double> nodes);

  int half_count() const { return n_; }
  int num_intervals() const { return 2 * n_; }
  int num_nodes() const { return 2 * n_ + 1; }

  double node(int i) const { return nodes_[static_cast<std::size_t>(i + n_)]; }
  double interval(int i) const { return node(i) - node(i - 1); }
  double midspan(int i) const { return 0.5 * (interval(i) + interval(i + 1)); }

  /// Nodes in storage order, x_{-N} first.
  std::span<const double> nodes() const { return nodes_; }

  /// Generator parameters; empty for meshes built with from_nodes.
  const std::optional<MeshParams>& params() const { return params_; }

  /// kappa(alpha, eps) of the generator; NaN for custom meshes.
  double kappa() const { return kappa_; }

 private:
  friend GradedMesh build_mesh(const MeshParams& params);
  GradedMesh() = default;

  int n_ = 0;
  std::vector<double> nodes_;
  std::optional<MeshParams> params_;
  double kappa_ = 0.0;
};

GradedMesh build_mesh(const MeshParams& params);

struct LemmaCheck {
  std::string name;
  bool applicable = false;
  double fitted_constant = 0.0;
  bool passed = true;
};

struct MeshLemmaReport {
  std::vector<LemmaCheck> checks;

  bool ok() const;
  const LemmaCheck* find(const std::string& name) const;
};

/// Fitted constants of the mesh interval bounds. `lambda` plays the role of
/// the exponent hat-alpha in the weighted bounds; `k` is the element order.
/// A check is failed only when its fitted constant exceeds `ceiling`;
/// out-of-hypothesis checks are reported as not applicable.
MeshLemmaReport verify_mesh_lemmas(const GradedMesh& mesh, double lambda, int k,
                                   double ceiling = 1e3);

struct LemmaStability {
  std::string name;
  std::vector<int> n_values;
  std::vector<double> constants;  // one per N, NaN if not applicable
  double max_ratio = 0.0;         // largest C(2N) / C(N) over consecutive pairs
  bool stable = true;
};

/// Runs verify_mesh_lemmas for each N in `n_values` and flags any lemma
/// whose fitted constant grows by more than `max_growth` between
/// consecutive runs.
std::vector<LemmaStability> lemma_stability(double alpha, double eps,
                                            std::span<const int> n_values,
                                            double lambda, int k,
                                            double max_growth = 1.25);

}  // namespace tpfem
