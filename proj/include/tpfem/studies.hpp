#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tpfem/norms.hpp"
#include "tpfem/reference_element.hpp"

namespace tpfem {

/// Knobs that change how a case is discretized or measured.
struct CaseOverrides {
  int quad_points = 0;  // assembly rule size, 0 means k + 3
  ErrorQuadrature error_quadrature{};
  NodePlacement placement = NodePlacement::gauss_lobatto;
  std::optional<double> alpha;  // bypasses the alpha0 rule when set
};

struct CaseSpec {
  int k = 1;
  int n = 8;
  double eps = 1.0;
  double lambda = 0.005;
  double alpha0 = 1.0;
  std::string problem = "sun-stynes";
};

/// alpha = alpha0 * min(lambda / (k + 1), 1 / (2 (k + 1)))
double grading_exponent(int k, double lambda, double alpha0);

struct CaseResult {
  ErrorReport errors;
  double alpha = 0.0;
  double residual = 0.0;  // relative residual of the linear solve
};

/// Builds the mesh, assembles, solves and measures one case.
CaseResult run_case(const CaseSpec& spec, const CaseOverrides& overrides = {});

struct SweepSpec {
  std::vector<int> k_list{1};
  std::vector<int> n_list{8, 16, 32, 64, 128, 256, 512, 1024};
  std::vector<double> eps_list{1e-8};
  double lambda = 0.005;
  double alpha0 = 1.0;
  std::string problem = "sun-stynes";
  CaseOverrides overrides{};
  int threads = 0;  // 0 means hardware concurrency

  /// Throws ErrorKind::parameter when a list is empty or an N is odd or below 8.
  void check() const;
};

struct ConvergenceRow {
  int k = 1;
  int n = 0;
  double eps = 0.0;
  double lambda = 0.0;
  double alpha0 = 0.0;
  double alpha = 0.0;
  double energy_err = 0.0;
  double l2_err = 0.0;
  double h1semi_err = 0.0;
  double interp_l2 = 0.0;
  double supercloseness = 0.0;
  std::optional<double> energy_rate;  // from the (k, eps, 2N) row
  std::optional<double> l2_rate;
  std::optional<std::string> failure;  // set when the case threw
};

/// (ln E_N - ln E_2N) / ln 2
double convergence_rate(double coarse, double fine);

/// Runs every (k, N, eps) case, possibly concurrently, and returns rows
/// sorted by (k, eps, N) with rates filled from N -> 2N pairs.
std::vector<ConvergenceRow> run_sweep(const SweepSpec& spec);

/// Sorts rows by (k, eps, N) and recomputes rates from the rows' own errors.
void fill_rates(std::vector<ConvergenceRow>& rows);

enum class ReferenceTable {
  linear,      // energy and L2 errors with rates, k = 1, eps = 1e-8, 1e-12, N = 8..2048
  high_order,  // energy errors, k = 1..4, eps = 1..1e-14, N = 512, 1024
};

std::optional<ReferenceTable> parse_reference_table(const std::string& name);
std::string to_string(ReferenceTable table);

enum class Quantity { energy_error, l2_error, energy_rate, l2_rate };

struct ReferenceCell {
  int k = 1;
  int n = 0;
  double eps = 0.0;
  Quantity quantity = Quantity::energy_error;
  double value = 0.0;
  bool roundoff_dominated = false;
};

/// Reference values of a table, transcribed verbatim.
std::vector<ReferenceCell> reference_cells(ReferenceTable table);

struct CellComparison {
  ReferenceCell cell;
  std::optional<double> measured;
  bool passed = false;
  bool excluded = false;
  std::string note;
};

struct RegressionReport {
  ReferenceTable table = ReferenceTable::linear;
  std::vector<CellComparison> cells;
  bool complete = true;
  bool passed = true;

  std::string summary() const;
};

/// Errors pass when within `tolerance_factor` of the reference value in
/// either direction. Rates are checked for N >= min_rate_n: against the
/// printed rate for the linear table and against the order k for the
/// high-order table, which prints none.
RegressionReport compare_reference(const std::vector<ConvergenceRow>& rows, ReferenceTable table,
                                   double tolerance_factor = 2.0, double rate_tolerance = 0.05,
                                   int min_rate_n = 128);

/// CSV text with the fixed header, 6 significant digits, rows in (k, eps, N)
/// order and empty fields for absent rates.
std::string format_csv(std::vector<ConvergenceRow> rows);
void emit_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);

struct ReferenceCurve {
  int k = 1;
  double constant = 0.0;  // c_k in c_k N^-k
  std::vector<int> n_values;
  std::vector<double> values;
};

/// c_k N^-k curves with c_k fitted to the first anchor row of each order.
std::vector<ReferenceCurve> emit_reference_curves(const std::vector<int>& k_list,
                                                  const std::vector<int>& n_list,
                                                  const std::vector<ConvergenceRow>& anchor_rows);

/// Two-column "N,value" CSV for one curve.
std::string format_curve_csv(const ReferenceCurve& curve);

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  double linear_tolerance_factor = 2.0;
  double linear_rate_tolerance = 0.05;
  double high_order_tolerance_factor = 3.0;
  double high_order_rate_tolerance = 0.15;
  int threads = 0;
};

/// Randomized invariants of the mesh, basis, solver, norms and CSV output.
std::vector<CheckOutcome> run_property_checks();

/// Sweeps covering both reference tables and their comparisons.
std::vector<CheckOutcome> run_regression_checks(const VerifyOptions& options = {});

/// The property and reference-regression battery behind `tpfem verify`.
std::vector<CheckOutcome> run_verification(const VerifyOptions& options = {});

}  // namespace tpfem
