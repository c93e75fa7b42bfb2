// tpfem: command line harness for the turning point FEM library.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tpfem/error.hpp"
#include "tpfem/studies.hpp"

using namespace tpfem;

namespace {

struct Options {
  std::vector<int> k_list{1};
  std::vector<int> n_list{8, 16, 32, 64, 128, 256, 512, 1024};
  std::vector<double> eps_list{1e-8};
  double lambda = 0.005;
  double alpha0 = 1.0;
  std::string problem = "sun-stynes";
  int quad_points = 0;
  std::optional<int> err_subdiv;
  std::string out;
  std::string reference_check;
  std::optional<double> tolerance_factor;
  std::optional<double> rate_tolerance;
  std::string curves;
  int threads = 0;
};

void add_case_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--k", o.k_list, "element orders")->delimiter(',');
  cmd->add_option("--n-list", o.n_list, "half interval counts N")->delimiter(',');
  cmd->add_option("--eps-list", o.eps_list, "perturbation parameters")->delimiter(',');
  cmd->add_option("--lambda", o.lambda, "layer exponent of the problem and the mesh");
  cmd->add_option("--alpha0", o.alpha0, "scaling of the grading exponent");
  cmd->add_option("--problem", o.problem, "named test problem");
}

void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--quad-points", o.quad_points, "assembly Gauss points (0: k + 3)");
  cmd->add_option("--err-subdiv", o.err_subdiv, "error quadrature subdivision depth");
}

CaseOverrides overrides_of(const Options& o) {
  CaseOverrides ov;
  ov.quad_points = o.quad_points;
  if (o.err_subdiv) {
    if (*o.err_subdiv < 0 || *o.err_subdiv > 12) fail(ErrorKind::parameter, "--err-subdiv must lie in [0, 12]");
    ov.error_quadrature.subdiv = *o.err_subdiv;
    ov.error_quadrature.subdiv_turning_point = *o.err_subdiv + 3;
  }
  return ov;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::io, "failed writing '" + path + "'");
}

template <class T>
T single(const std::vector<T>& v, const char* flag) {
  if (v.size() != 1) fail(ErrorKind::parameter, std::string(flag) + " takes a single value here");
  return v.front();
}

int cmd_mesh(const Options& o) {
  const int k = single(o.k_list, "--k");
  const int n = single(o.n_list, "--n-list");
  const double eps = single(o.eps_list, "--eps-list");
  const double alpha = grading_exponent(k, o.lambda, o.alpha0);
  const auto mesh = build_mesh(MeshParams::make(n, alpha, eps));
  std::string text;
  for (double x : mesh.nodes()) text += g17(x) + "\n";
  write_text(o.out, text);
  std::cerr << "mesh: N=" << n << " alpha=" << g6(alpha) << " kappa=" << g6(mesh.kappa()) << "\n";
  return 0;
}

int cmd_solve(const Options& o) {
  const int k = single(o.k_list, "--k");
  const int n = single(o.n_list, "--n-list");
  const double eps = single(o.eps_list, "--eps-list");
  const TestProblem tp = make_problem(o.problem, eps, o.lambda);
  const SpectralParams sp = validate(tp.problem, 10000, o.lambda);
  const double alpha = grading_exponent(k, sp.lambda, o.alpha0);
  auto mesh = std::make_shared<const GradedMesh>(build_mesh(MeshParams::make(n, alpha, eps)));
  auto ref = std::make_shared<const ReferenceElement>(k);
  const auto ov = overrides_of(o);
  const SolveResult res = solve_problem(tp.problem, mesh, ref, ov.quad_points);

  const auto& dofs = res.solution.dofs();
  std::string text;
  for (int d = 0; d < dofs.num_dofs(); ++d) {
    text += g17(dofs.coordinate(d)) + " " + g17(res.solution.coefficients()[d]) + "\n";
  }
  write_text(o.out, text);

  const auto errors = error_norms(tp.solution, res.solution, eps, ov.error_quadrature);
  std::cerr << "solve: k=" << k << " N=" << n << " eps=" << g6(eps) << " alpha=" << g6(alpha)
            << " energy_err=" << g6(errors.energy) << " l2_err=" << g6(errors.l2)
            << " residual=" << g6(res.relative_residual) << "\n";
  return 0;
}

int cmd_sweep(const Options& o) {
  SweepSpec s;
  s.k_list = o.k_list;
  s.n_list = o.n_list;
  s.eps_list = o.eps_list;
  s.lambda = o.lambda;
  s.alpha0 = o.alpha0;
  s.problem = o.problem;
  s.overrides = overrides_of(o);
  s.threads = o.threads;
  s.check();

  std::optional<ReferenceTable> table;
  if (!o.reference_check.empty()) {
    table = parse_reference_table(o.reference_check);
    if (!table) fail(ErrorKind::parameter, "unknown reference table '" + o.reference_check + "' (linear, high-order)");
  }
  // surface structural problems with the data before spending time on the sweep
  for (double eps : s.eps_list) validate(make_problem(s.problem, eps, s.lambda).problem, 10000, s.lambda);

  const auto rows = run_sweep(s);
  write_text(o.out, format_csv(rows));

  int failed = 0;
  for (const auto& r : rows) {
    if (!r.failure) continue;
    ++failed;
    std::cerr << "case k=" << r.k << " N=" << r.n << " eps=" << g6(r.eps) << " failed: " << *r.failure << "\n";
  }

  if (!o.curves.empty()) {
    for (const auto& c : emit_reference_curves(s.k_list, s.n_list, rows)) {
      write_text(o.curves + "_k" + std::to_string(c.k) + ".csv", format_curve_csv(c));
    }
  }

  if (failed > 0) return exit_code(ErrorKind::solver);

  if (table) {
    const bool linear = *table == ReferenceTable::linear;
    const double factor = o.tolerance_factor.value_or(linear ? 2.0 : 3.0);
    const double rate_tol = o.rate_tolerance.value_or(linear ? 0.05 : 0.15);
    const auto report = compare_reference(rows, *table, factor, rate_tol);
    std::cerr << report.summary();
    if (!report.passed) return exit_code(ErrorKind::regression);
  }
  return 0;
}

int cmd_verify(const Options& o) {
  VerifyOptions vo;
  vo.threads = o.threads;
  if (o.tolerance_factor) vo.linear_tolerance_factor = vo.high_order_tolerance_factor = *o.tolerance_factor;
  if (o.rate_tolerance) vo.linear_rate_tolerance = vo.high_order_rate_tolerance = *o.rate_tolerance;

  const auto start = std::chrono::steady_clock::now();
  const auto outcomes = run_verification(vo);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream os;
  bool ok = true;
  for (const auto& c : outcomes) {
    os << (c.passed ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << "\n";
    ok = ok && c.passed;
  }
  os << (ok ? "verify: all checks passed" : "verify: FAILED") << " in " << g6(seconds) << " s\n";
  write_text(o.out, os.str());
  return ok ? 0 : exit_code(ErrorKind::regression);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher order FEM on graded meshes for turning point problems"};
  app.require_subcommand(1);
  Options o;

  auto* mesh = app.add_subcommand("mesh", "print the mesh nodes, one per line");
  add_case_flags(mesh, o);
  mesh->add_option("--out", o.out, "output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "solve one case and print (x, u_N) at the DOF nodes");
  add_case_flags(solve, o);
  add_solver_flags(solve, o);
  solve->add_option("--out", o.out, "output file (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "run a convergence study and write CSV");
  add_case_flags(sweep, o);
  add_solver_flags(sweep, o);
  sweep->add_option("--out", o.out, "CSV file (default stdout)");
  sweep->add_option("--reference-check", o.reference_check, "compare with a reference table: linear, high-order");
  sweep->add_option("--tolerance-factor", o.tolerance_factor, "allowed error ratio against the reference");
  sweep->add_option("--rate-tolerance", o.rate_tolerance, "allowed rate deviation against the reference");
  sweep->add_option("--curves", o.curves, "write c N^-k reference curves to PREFIX_k<k>.csv");
  sweep->add_option("--threads", o.threads, "worker threads (0: all cores)");

  auto* verify = app.add_subcommand("verify", "run the property and reference regression battery");
  verify->add_option("--tolerance-factor", o.tolerance_factor, "override the error tolerance factor");
  verify->add_option("--rate-tolerance", o.rate_tolerance, "override the rate tolerance");
  verify->add_option("--out", o.out, "report file (default stdout)");
  verify->add_option("--threads", o.threads, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ErrorKind::parameter);
  }

  try {
    if (*mesh) return cmd_mesh(o);
    if (*solve) return cmd_solve(o);
    if (*sweep) return cmd_sweep(o);
    if (*verify) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
