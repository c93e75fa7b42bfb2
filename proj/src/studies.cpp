#include "tpfem/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>
#include <tuple>

#include "tpfem/error.hpp"

namespace tpfem {

double grading_exponent(int k, double lambda, double alpha0) {
  const double kp1 = static_cast<double>(k + 1);
  return alpha0 * std::min(lambda / kp1, 1.0 / (2.0 * kp1));
}

CaseResult run_case(const CaseSpec& spec, const CaseOverrides& overrides) {
  const TestProblem tp = make_problem(spec.problem, spec.eps, spec.lambda);
  const SpectralParams spectral = validate(tp.problem, 10000, spec.lambda);

  const double alpha =
      overrides.alpha.value_or(grading_exponent(spec.k, spectral.lambda, spec.alpha0));
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "grading exponent alpha = " << alpha << " outside (0, 1]";
    fail(ErrorKind::parameter, os.str());
  }

  auto mesh = std::make_shared<const GradedMesh>(build_mesh(MeshParams::make(spec.n, alpha, spec.eps)));
  auto ref = std::make_shared<const ReferenceElement>(spec.k, overrides.placement);
  const SolveResult solved = solve_problem(tp.problem, mesh, ref, overrides.quad_points);

  CaseResult out;
  out.alpha = alpha;
  out.residual = solved.relative_residual;
  out.errors = error_norms(tp.solution, solved.solution, spec.eps, overrides.error_quadrature);
  const FeFunction uI = interpolant(tp.solution.u, solved.solution.dofs());
  out.errors.interp_l2 = interpolation_l2_error(tp.solution, uI, overrides.error_quadrature);
  out.errors.supercloseness = supercloseness(uI, solved.solution, spec.eps);
  return out;
}

void SweepSpec::check() const {
  if (k_list.empty() || n_list.empty() || eps_list.empty()) {
    fail(ErrorKind::parameter, "sweep lists must be non-empty");
  }
  for (int n : n_list) {
    if (n < 8 || n % 2 != 0) {
      fail(ErrorKind::parameter, "sweep N values must be even and at least 8, got " + std::to_string(n));
    }
  }
  if (!(alpha0 > 0.0 && alpha0 <= 1.0)) fail(ErrorKind::parameter, "alpha0 must lie in (0, 1]");
}

double convergence_rate(double coarse, double fine) {
  return (std::log(coarse) - std::log(fine)) / std::log(2.0);
}

void fill_rates(std::vector<ConvergenceRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ConvergenceRow& a, const ConvergenceRow& b) {
    return std::tie(a.k, a.eps, a.n) < std::tie(b.k, b.eps, b.n);
  });
  for (auto& row : rows) {
    row.energy_rate.reset();
    row.l2_rate.reset();
    if (row.failure) continue;
    for (const auto& other : rows) {
      if (other.k == row.k && other.eps == row.eps && other.n == 2 * row.n && !other.failure) {
        row.energy_rate = convergence_rate(row.energy_err, other.energy_err);
        row.l2_rate = convergence_rate(row.l2_err, other.l2_err);
        break;
      }
    }
  }
}

std::vector<ConvergenceRow> run_sweep(const SweepSpec& spec) {
  spec.check();
  std::vector<CaseSpec> jobs;
  for (int k : spec.k_list) {
    for (double eps : spec.eps_list) {
      for (int n : spec.n_list) {
        jobs.push_back(CaseSpec{k, n, eps, spec.lambda, spec.alpha0, spec.problem});
      }
    }
  }

  std::vector<ConvergenceRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const CaseSpec& job = jobs[i];
      ConvergenceRow& row = rows[i];
      row.k = job.k;
      row.n = job.n;
      row.eps = job.eps;
      row.lambda = job.lambda;
      row.alpha0 = job.alpha0;
      try {
        const CaseResult r = run_case(job, spec.overrides);
        row.alpha = r.alpha;
        row.energy_err = r.errors.energy;
        row.l2_err = r.errors.l2;
        row.h1semi_err = r.errors.h1_semi;
        row.interp_l2 = r.errors.interp_l2;
        row.supercloseness = r.errors.supercloseness;
      } catch (const Error& e) {
        row.failure = e.what();
      }
    }
  };

  unsigned threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  fill_rates(rows);
  return rows;
}

std::optional<ReferenceTable> parse_reference_table(const std::string& name) {
  if (name == "linear") return ReferenceTable::linear;
  if (name == "high-order") return ReferenceTable::high_order;
  return std::nullopt;
}

std::string to_string(ReferenceTable table) {
  return table == ReferenceTable::linear ? "linear" : "high-order";
}

namespace {

std::string quantity_name(Quantity q) {
  switch (q) {
    case Quantity::energy_error:
      return "energy";
    case Quantity::l2_error:
      return "l2";
    case Quantity::energy_rate:
      return "energy_rate";
    case Quantity::l2_rate:
      return "l2_rate";
  }
  return "?";
}

bool same_eps(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

std::optional<double> lookup(const std::vector<ConvergenceRow>& rows, const ReferenceCell& cell) {
  for (const auto& r : rows) {
    if (r.k != cell.k || r.n != cell.n || !same_eps(r.eps, cell.eps) || r.failure) continue;
    switch (cell.quantity) {
      case Quantity::energy_error:
        return r.energy_err;
      case Quantity::l2_error:
        return r.l2_err;
      case Quantity::energy_rate:
        return r.energy_rate;
      case Quantity::l2_rate:
        return r.l2_rate;
    }
  }
  return std::nullopt;
}

std::string format_sci(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return buf;
}

}  // namespace

std::vector<ReferenceCell> reference_cells(ReferenceTable table) {
  std::vector<ReferenceCell> cells;
  if (table == ReferenceTable::linear) {
    struct Line {
      int n;
      double e8, r8, l8, lr8, e12, r12, l12, lr12;
    };
    // N, then (energy, rate, L2, rate) for eps = 1e-8 and eps = 1e-12
    static constexpr Line lines[] = {
        {8, 7.58e-03, 1.402, 4.11e-03, 2.467, 2.22e-03, 1.623, 2.06e-03, 1.846},
        {16, 2.87e-03, 0.986, 7.43e-04, 2.108, 7.22e-04, 1.460, 5.72e-04, 1.853},
        {32, 1.45e-03, 1.002, 1.72e-04, 2.009, 2.62e-04, 1.203, 1.59e-04, 1.947},
        {64, 7.23e-04, 1.001, 4.28e-05, 2.002, 1.14e-04, 1.070, 4.11e-05, 1.986},
        {128, 3.62e-04, 1.000, 1.07e-05, 2.000, 5.43e-05, 1.019, 1.04e-05, 1.997},
        {256, 1.81e-04, 1.000, 2.67e-06, 2.000, 2.68e-05, 1.005, 2.60e-06, 1.999},
        {512, 9.04e-05, 1.000, 6.68e-07, 2.000, 1.33e-05, 1.001, 6.50e-07, 2.000},
        {1024, 4.52e-05, 1.000, 1.67e-07, 2.000, 6.66e-06, 1.000, 1.63e-07, 2.000},
        {2048, 2.26e-05, 1.000, 4.17e-08, 2.000, 3.33e-06, 1.000, 4.07e-08, 2.000},
    };
    for (const auto& l : lines) {
      cells.push_back({1, l.n, 1e-8, Quantity::energy_error, l.e8, false});
      cells.push_back({1, l.n, 1e-8, Quantity::energy_rate, l.r8, false});
      cells.push_back({1, l.n, 1e-8, Quantity::l2_error, l.l8, false});
      cells.push_back({1, l.n, 1e-8, Quantity::l2_rate, l.lr8, false});
      cells.push_back({1, l.n, 1e-12, Quantity::energy_error, l.e12, false});
      cells.push_back({1, l.n, 1e-12, Quantity::energy_rate, l.r12, false});
      cells.push_back({1, l.n, 1e-12, Quantity::l2_error, l.l12, false});
      cells.push_back({1, l.n, 1e-12, Quantity::l2_rate, l.lr12, false});
    }
    return cells;
  }

  struct Line {
    double eps;
    double e[4][2];  // [k-1][N = 512, 1024]
  };
  static constexpr Line lines[] = {
      {1e0, {{5.89e-04, 2.95e-04}, {2.36e-07, 5.91e-08}, {1.37e-10, 1.71e-11}, {1.49e-13, 2.06e-13}}},
      {1e-2, {{7.64e-04, 3.82e-04}, {1.31e-06, 3.28e-07}, {2.36e-09, 2.95e-10}, {4.07e-12, 3.06e-13}}},
      {1e-4, {{4.61e-04, 2.30e-04}, {1.52e-06, 3.81e-07}, {5.28e-09, 6.60e-10}, {1.75e-11, 1.10e-12}}},
      {1e-6, {{2.16e-04, 1.08e-04}, {1.07e-06, 2.68e-07}, {5.56e-09, 6.95e-10}, {2.76e-11, 1.73e-12}}},
      {1e-8, {{9.04e-05, 4.52e-05}, {6.12e-07, 1.53e-07}, {4.14e-09, 5.17e-10}, {2.75e-11, 1.72e-12}}},
      {1e-10, {{3.54e-05, 1.77e-05}, {3.69e-07, 9.17e-08}, {2.54e-09, 3.17e-10}, {2.17e-11, 1.35e-12}}},
      {1e-12, {{1.33e-05, 6.66e-06}, {3.53e-07, 8.79e-08}, {1.38e-09, 1.72e-10}, {1.80e-11, 1.12e-12}}},
      {1e-14, {{4.95e-06, 2.45e-06}, {4.49e-07, 1.12e-07}, {6.87e-10, 8.58e-11}, {2.31e-11, 1.44e-12}}},
  };
  for (const auto& l : lines) {
    for (int k = 1; k <= 4; ++k) {
      // P4 at eps = 1 sits on the double precision floor (the reference error
      // grows from 512 to 1024). At eps = 1e-2 the N = 1024 error is within a
      // factor 3 of that floor, so only its 512 -> 1024 rate is excluded.
      const bool roundoff = k == 4 && l.eps == 1.0;
      const bool rate_roundoff = roundoff || (k == 4 && l.eps == 1e-2);
      cells.push_back({k, 512, l.eps, Quantity::energy_error, l.e[k - 1][0], roundoff});
      cells.push_back({k, 1024, l.eps, Quantity::energy_error, l.e[k - 1][1], roundoff});
      cells.push_back({k, 512, l.eps, Quantity::energy_rate, static_cast<double>(k), rate_roundoff});
    }
  }
  return cells;
}

std::string RegressionReport::summary() const {
  std::ostringstream os;
  int compared = 0;
  int failed = 0;
  for (const auto& c : cells) {
    if (c.excluded) continue;
    ++compared;
    if (!c.passed) ++failed;
  }
  os << "reference table " << to_string(table) << ": " << compared << " cells compared, " << failed
     << " failed" << (complete ? "" : ", coverage incomplete") << " -> "
     << (passed ? "PASS" : "FAIL") << "\n";
  for (const auto& c : cells) {
    if (c.passed || c.excluded) continue;
    os << "  k=" << c.cell.k << " N=" << c.cell.n << " eps=" << format_sci(c.cell.eps, 1) << " "
       << quantity_name(c.cell.quantity) << ": reference " << c.cell.value << ", measured "
       << (c.measured ? format_sci(*c.measured, 4) : std::string("missing")) << " (" << c.note
       << ")\n";
  }
  return os.str();
}

RegressionReport compare_reference(const std::vector<ConvergenceRow>& rows, ReferenceTable table,
                                   double tolerance_factor, double rate_tolerance, int min_rate_n) {
  RegressionReport report;
  report.table = table;
  for (const auto& cell : reference_cells(table)) {
    CellComparison cmp;
    cmp.cell = cell;
    const bool is_rate = cell.quantity == Quantity::energy_rate || cell.quantity == Quantity::l2_rate;
    if (cell.roundoff_dominated) {
      cmp.excluded = true;
      cmp.note = "roundoff dominated";
    } else if (is_rate && cell.n < min_rate_n) {
      cmp.excluded = true;
      cmp.note = "pre-asymptotic";
    }
    cmp.measured = lookup(rows, cell);
    if (!cmp.excluded) {
      if (!cmp.measured) {
        cmp.passed = false;
        cmp.note = "missing";
        report.complete = false;
      } else if (is_rate) {
        cmp.passed = std::abs(*cmp.measured - cell.value) <= rate_tolerance;
        if (!cmp.passed) cmp.note = "rate outside tolerance";
      } else {
        const double ratio = *cmp.measured / cell.value;
        cmp.passed = ratio <= tolerance_factor && ratio >= 1.0 / tolerance_factor;
        if (!cmp.passed) cmp.note = "error outside tolerance factor";
      }
      if (!cmp.passed) report.passed = false;
    }
    report.cells.push_back(std::move(cmp));
  }
  return report;
}

std::string format_csv(std::vector<ConvergenceRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ConvergenceRow& a, const ConvergenceRow& b) {
    return std::tie(a.k, a.eps, a.n) < std::tie(b.k, b.eps, b.n);
  });
  std::ostringstream os;
  os << "k,N,eps,lambda,alpha0,alpha,energy_err,l2_err,h1semi_err,interp_l2,supercloseness,"
        "energy_rate,l2_rate\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_sci(*v, 6) : std::string(); };
  for (const auto& r : rows) {
    os << r.k << ',' << r.n << ',' << format_sci(r.eps, 6) << ',' << format_sci(r.lambda, 6) << ','
       << format_sci(r.alpha0, 6) << ',' << format_sci(r.alpha, 6) << ','
       << format_sci(r.energy_err, 6) << ',' << format_sci(r.l2_err, 6) << ','
       << format_sci(r.h1semi_err, 6) << ',' << format_sci(r.interp_l2, 6) << ','
       << format_sci(r.supercloseness, 6) << ',' << opt(r.energy_rate) << ',' << opt(r.l2_rate)
       << '\n';
  }
  return os.str();
}

void emit_csv(const std::vector<ConvergenceRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << format_csv(rows);
  if (!out) fail(ErrorKind::io, "failed writing '" + path + "'");
}

std::vector<ReferenceCurve> emit_reference_curves(const std::vector<int>& k_list,
                                                  const std::vector<int>& n_list,
                                                  const std::vector<ConvergenceRow>& anchor_rows) {
  std::vector<ReferenceCurve> curves;
  for (int k : k_list) {
    const ConvergenceRow* anchor = nullptr;
    for (const auto& r : anchor_rows) {
      if (r.k == k && !r.failure && (!anchor || r.n < anchor->n)) anchor = &r;
    }
    if (!anchor) fail(ErrorKind::parameter, "no anchor row for k = " + std::to_string(k));
    ReferenceCurve c;
    c.k = k;
    c.constant = anchor->energy_err * std::pow(static_cast<double>(anchor->n), k);
    for (int n : n_list) {
      c.n_values.push_back(n);
      c.values.push_back(anchor->energy_err * std::pow(static_cast<double>(anchor->n) / n, k));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

std::string format_curve_csv(const ReferenceCurve& curve) {
  std::ostringstream os;
  os << "N,reference\n";
  for (std::size_t i = 0; i < curve.n_values.size(); ++i) {
    os << curve.n_values[i] << ',' << format_sci(curve.values[i], 6) << '\n';
  }
  return os.str();
}

}  // namespace tpfem
