// Acceptance criteria 1-6. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tpfem/error.hpp"
#include "tpfem/studies.hpp"

using namespace tpfem;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<ConvergenceRow> sweep(std::vector<int> ks, std::vector<int> ns, std::vector<double> eps,
                                  double lambda = 0.005, double alpha0 = 1.0) {
  SweepSpec s;
  s.k_list = std::move(ks);
  s.n_list = std::move(ns);
  s.eps_list = std::move(eps);
  s.lambda = lambda;
  s.alpha0 = alpha0;
  return run_sweep(s);
}

const ConvergenceRow& row_at(const std::vector<ConvergenceRow>& rows, int k, int n, double eps) {
  for (const auto& r : rows)
    if (r.k == k && r.n == n && r.eps == eps) return r;
  fail(ErrorKind::regression, "missing row");
}

bool any_failure(const std::vector<ConvergenceRow>& rows, std::string& why) {
  for (const auto& r : rows) {
    if (r.failure) {
      why = "case k=" + std::to_string(r.k) + " N=" + std::to_string(r.n) + " failed: " + *r.failure;
      return true;
    }
  }
  return false;
}

Verdict table_reproduction_linear() {
  std::vector<int> ns;
  for (int n = 8; n <= 4096; n *= 2) ns.push_back(n);
  const auto rows = sweep({1}, ns, {1e-8, 1e-12});
  const auto report = compare_reference(rows, ReferenceTable::linear, 2.0, 0.05, 128);
  const auto& r = row_at(rows, 1, 512, 1e-8);
  std::ostringstream os;
  os << report.summary() << "  N=512 eps=1e-8: energy " << sci(r.energy_err) << " (9.04e-05), L2 "
     << sci(r.l2_err) << " (6.68e-07)";
  return {report.passed, os.str()};
}

Verdict table_reproduction_high_order() {
  const auto rows = sweep({1, 2, 3, 4}, {512, 1024},
                          {1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14});
  const auto report = compare_reference(rows, ReferenceTable::high_order, 3.0, 0.15, 128);
  const auto& r = row_at(rows, 3, 512, 1e-8);
  std::ostringstream os;
  os << report.summary() << "  P3 N=512 eps=1e-8: " << sci(r.energy_err) << " (4.14e-09)";
  int excluded = 0;
  for (const auto& c : report.cells) excluded += c.excluded;
  os << "; " << excluded << " roundoff-dominated cells excluded";
  return {report.passed, os.str()};
}

Verdict fitted_constants() {
  const std::vector<int> ns{64, 128, 256, 512};
  const std::vector<double> eps{1e-4, 1e-6, 1e-8, 1e-10, 1e-12};
  const auto rows = sweep({1, 2, 3, 4}, ns, eps);
  std::string why;
  if (any_failure(rows, why)) return {false, why};
  double lo = 1e300;
  double hi = 0.0;
  std::string worst;
  auto track = [&](double ratio, const std::string& where) {
    if (ratio < lo || ratio > hi) worst = where;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  };
  for (int k = 1; k <= 4; ++k) {
    for (double e : eps) {
      for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
        const auto& a = row_at(rows, k, ns[i], e);
        const auto& b = row_at(rows, k, ns[i + 1], e);
        const double ca = a.energy_err * std::pow(ns[i], k);
        const double cb = b.energy_err * std::pow(ns[i + 1], k);
        track(cb / ca, "energy k=" + std::to_string(k) + " eps=" + sci(e) + " N=" + std::to_string(ns[i]));
        if (k == 1) {
          const double la = a.l2_err * std::pow(ns[i], 2);
          const double lb = b.l2_err * std::pow(ns[i + 1], 2);
          track(lb / la, "L2 eps=" + sci(e) + " N=" + std::to_string(ns[i]));
        }
      }
    }
  }
  std::ostringstream os;
  os << "C(2N)/C(N) in [" << lo << ", " << hi << "], required [0.7, 1.4]; extreme at " << worst;
  return {lo >= 0.7 && hi <= 1.4, os.str()};
}

Verdict supercloseness_rate() {
  const auto rows = sweep({1}, {128, 256, 512, 1024}, {1e-8});
  std::string why;
  if (any_failure(rows, why)) return {false, why};
  std::ostringstream os;
  os << "rates";
  bool ok = true;
  for (int n : {128, 256, 512}) {
    const double rate = convergence_rate(row_at(rows, 1, n, 1e-8).supercloseness,
                                         row_at(rows, 1, 2 * n, 1e-8).supercloseness);
    os << " " << n << "->" << 2 * n << ": " << rate;
    ok = ok && std::abs(rate - 2.0) <= 0.15;
  }
  os << " (required 2 +- 0.15)";
  return {ok, os.str()};
}

Verdict robustness() {
  std::vector<double> lambdas;
  for (int e = -13; e <= -1; ++e) lambdas.push_back(std::pow(10.0, e));
  std::vector<double> alpha0s;
  for (int e = -10; e <= 0; ++e) alpha0s.push_back(std::pow(10.0, e));

  std::ostringstream os;
  bool ok = true;
  for (int k = 1; k <= 4; ++k) {
    double lo = 1e300, hi = 0.0;
    for (double lambda : lambdas) {
      const auto r = run_case(CaseSpec{k, 1024, 1e-8, lambda, 1.0});
      lo = std::min(lo, r.errors.energy);
      hi = std::max(hi, r.errors.energy);
    }
    double alo = 1e300, ahi = 0.0;
    for (double a0 : alpha0s) {
      const auto r = run_case(CaseSpec{k, 1024, 1e-8, 0.005, a0});
      alo = std::min(alo, r.errors.energy);
      ahi = std::max(ahi, r.errors.energy);
    }
    os << " k=" << k << " lambda " << hi / lo << ", alpha0 " << ahi / alo << ";";
    ok = ok && hi / lo < 3.0 && ahi / alo < 3.0;
  }
  return {ok, "max/min energy error:" + os.str() + " required < 3"};
}

Verdict property_suites() {
  const auto start = std::chrono::steady_clock::now();
  const auto outcomes = run_verification();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = seconds < 60.0;
  std::ostringstream os;
  int failed = 0;
  for (const auto& c : outcomes) {
    if (!c.passed) {
      ++failed;
      os << " [" << c.name << ": " << c.detail << "]";
    }
  }
  ok = ok && failed == 0;
  return {ok, std::to_string(outcomes.size()) + " checks, " + std::to_string(failed) +
                  " failed, full battery " + sci(seconds) + " s (limit 60 s)" + os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 linear table reproduction", table_reproduction_linear},
      {"2 high-order table reproduction", table_reproduction_high_order},
      {"3 fitted constants stable under N doubling", fitted_constants},
      {"4 supercloseness rate", supercloseness_rate},
      {"5 lambda and alpha0 robustness", robustness},
      {"6 property suites", property_suites},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::string detail = v.detail;
    std::replace(detail.begin(), detail.end(), '\n', ' ');
    std::cout << (v.passed ? "PASS" : "FAIL") << "  criterion " << name << ": " << detail << std::endl;
    failed += !v.passed;
  }
  return failed == 0 ? 0 : 1;
}
