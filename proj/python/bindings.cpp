#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "tpfem/error.hpp"
#include "tpfem/studies.hpp"

namespace py = pybind11;
using namespace tpfem;

namespace {

py::dict case_dict(const CaseResult& r) {
  py::dict d;
  d["alpha"] = r.alpha;
  d["residual"] = r.residual;
  d["energy_err"] = r.errors.energy;
  d["l2_err"] = r.errors.l2;
  d["h1semi_err"] = r.errors.h1_semi;
  d["interp_l2"] = r.errors.interp_l2;
  d["supercloseness"] = r.errors.supercloseness;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Higher order FEM on graded meshes for turning point problems";

  static py::exception<Error> base(m, "TpfemError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::parameter || e.kind() == ErrorKind::validation) {
        PyErr_SetString(PyExc_ValueError, e.what());
      } else {
        base(e.what());
      }
    }
  });

  m.def("bracket", &bracket, py::arg("alpha"), py::arg("eps"));
  m.def("kappa", py::overload_cast<double, double>(&kappa), py::arg("alpha"), py::arg("eps"));
  m.def("phi", [](double xi, int n, double alpha, double eps) {
    return phi(xi, MeshParams::make(n, alpha, eps));
  }, py::arg("xi"), py::arg("n"), py::arg("alpha"), py::arg("eps"));
  m.def("grading_exponent", &grading_exponent, py::arg("k"), py::arg("lambda_") = 0.005,
        py::arg("alpha0") = 1.0);

  m.def("build_mesh", [](int n, double alpha, double eps) {
    const auto mesh = build_mesh(MeshParams::make(n, alpha, eps));
    return std::vector<double>(mesh.nodes().begin(), mesh.nodes().end());
  }, py::arg("n"), py::arg("alpha"), py::arg("eps"), "The 2N+1 mesh nodes from -1 to 1.");

  m.def("solve", [](int k, int n, double eps, double lambda, double alpha0, const std::string& problem,
                    int quad_points) {
    const TestProblem tp = make_problem(problem, eps, lambda);
    const SpectralParams sp = validate(tp.problem, 10000, lambda);
    const double alpha = grading_exponent(k, sp.lambda, alpha0);
    auto mesh = std::make_shared<const GradedMesh>(build_mesh(MeshParams::make(n, alpha, eps)));
    const SolveResult res = solve_problem(tp.problem, mesh, std::make_shared<const ReferenceElement>(k),
                                          quad_points);
    const auto& dofs = res.solution.dofs();
    std::vector<double> x(static_cast<std::size_t>(dofs.num_dofs()));
    for (int d = 0; d < dofs.num_dofs(); ++d) x[d] = dofs.coordinate(d);
    const auto c = res.solution.coefficients();
    py::dict out;
    out["x"] = x;
    out["u"] = std::vector<double>(c.begin(), c.end());
    out["alpha"] = alpha;
    out["residual"] = res.relative_residual;
    return out;
  }, py::arg("k"), py::arg("n"), py::arg("eps"), py::arg("lambda_") = 0.005, py::arg("alpha0") = 1.0,
     py::arg("problem") = "sun-stynes", py::arg("quad_points") = 0,
     "Solve one case; returns DOF coordinates x and coefficients u.");

  m.def("run_case", [](int k, int n, double eps, double lambda, double alpha0, const std::string& problem) {
    return case_dict(run_case(CaseSpec{k, n, eps, lambda, alpha0, problem}));
  }, py::arg("k"), py::arg("n"), py::arg("eps"), py::arg("lambda_") = 0.005, py::arg("alpha0") = 1.0,
     py::arg("problem") = "sun-stynes");

  py::class_<ConvergenceRow>(m, "ConvergenceRow")
      .def_readonly("k", &ConvergenceRow::k)
      .def_readonly("n", &ConvergenceRow::n)
      .def_readonly("eps", &ConvergenceRow::eps)
      .def_readonly("lambda_", &ConvergenceRow::lambda)
      .def_readonly("alpha0", &ConvergenceRow::alpha0)
      .def_readonly("alpha", &ConvergenceRow::alpha)
      .def_readonly("energy_err", &ConvergenceRow::energy_err)
      .def_readonly("l2_err", &ConvergenceRow::l2_err)
      .def_readonly("h1semi_err", &ConvergenceRow::h1semi_err)
      .def_readonly("interp_l2", &ConvergenceRow::interp_l2)
      .def_readonly("supercloseness", &ConvergenceRow::supercloseness)
      .def_readonly("energy_rate", &ConvergenceRow::energy_rate)
      .def_readonly("l2_rate", &ConvergenceRow::l2_rate)
      .def_readonly("failure", &ConvergenceRow::failure)
      .def("__repr__", [](const ConvergenceRow& r) {
        return "<ConvergenceRow k=" + std::to_string(r.k) + " N=" + std::to_string(r.n) +
               " eps=" + std::to_string(r.eps) + ">";
      });

  m.def("sweep", [](std::vector<int> k_list, std::vector<int> n_list, std::vector<double> eps_list,
                    double lambda, double alpha0, const std::string& problem, int threads) {
    SweepSpec s;
    s.k_list = std::move(k_list);
    s.n_list = std::move(n_list);
    s.eps_list = std::move(eps_list);
    s.lambda = lambda;
    s.alpha0 = alpha0;
    s.problem = problem;
    s.threads = threads;
    py::gil_scoped_release release;
    return run_sweep(s);
  }, py::arg("k_list"), py::arg("n_list"), py::arg("eps_list"), py::arg("lambda_") = 0.005,
     py::arg("alpha0") = 1.0, py::arg("problem") = "sun-stynes", py::arg("threads") = 0);

  m.def("format_csv", &format_csv, py::arg("rows"));

  m.def("compare_reference", [](const std::vector<ConvergenceRow>& rows, const std::string& table,
                                double tolerance_factor, double rate_tolerance) {
    const auto t = parse_reference_table(table);
    if (!t) fail(ErrorKind::parameter, "unknown reference table '" + table + "'");
    const auto report = compare_reference(rows, *t, tolerance_factor, rate_tolerance);
    return py::make_tuple(report.passed, report.summary());
  }, py::arg("rows"), py::arg("table"), py::arg("tolerance_factor") = 2.0,
     py::arg("rate_tolerance") = 0.05, "Returns (passed, summary).");

  m.def("verify", [] {
    std::vector<CheckOutcome> out;
    {
      py::gil_scoped_release release;
      out = run_verification();
    }
    py::list checks;
    for (const auto& c : out) checks.append(py::make_tuple(c.name, c.passed, c.detail));
    return checks;
  }, "Run the verification battery; list of (name, passed, detail).");
}
