#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "saddleglt/experiments.hpp"
#include "saddleglt/fem.hpp"
#include "saddleglt/krylov.hpp"
#include "saddleglt/saddle.hpp"
#include "saddleglt/spectra.hpp"
#include "saddleglt/symbol.hpp"

namespace py = pybind11;
using namespace saddleglt;

namespace {

py::tuple csr_arrays(const SparseMatrixCSR& m) {
  return py::make_tuple(py::array_t<Index>(py::cast(m.row_offsets())),
                        py::array_t<Index>(py::cast(m.col_indices())),
                        py::array_t<double>(py::cast(m.values())),
                        py::make_tuple(m.rows(), m.cols()));
}

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Saddle-point spectral analysis core";

  py::class_<SparseMatrixCSR>(m, "SparseMatrixCSR")
      .def_property_readonly("shape",
                             [](const SparseMatrixCSR& a) {
                               return py::make_tuple(a.rows(), a.cols());
                             })
      .def_property_readonly("nnz", &SparseMatrixCSR::nnz)
      .def("coeff", &SparseMatrixCSR::coeff)
      .def("to_arrays", &csr_arrays,
           "CSR pieces as (row_offsets, col_indices, values, shape)")
      .def("matvec",
           [](const SparseMatrixCSR& a, const py::array_t<double>& x) {
             return a * as_vector(x);
           })
      .def("transpose", &SparseMatrixCSR::transpose)
      .def("max_abs", &SparseMatrixCSR::max_abs)
      .def("is_symmetric", &SparseMatrixCSR::is_symmetric, py::arg("tol") = 0.0);

  py::class_<UniformMesh>(m, "UniformMesh")
      .def(py::init<int>())
      .def_property_readonly("n", &UniformMesh::n)
      .def_property_readonly("h", &UniformMesh::h)
      .def_property_readonly("num_dofs", &UniformMesh::num_dofs)
      .def("node", &UniformMesh::node);

  m.def("assemble_mass", &assemble_mass);
  m.def("assemble_stiffness", &assemble_stiffness);
  m.def("assemble_convection", &assemble_convection);
  m.def("assemble_load", &assemble_load);
  m.def("interpolate", &interpolate);

  py::class_<MatrixSymbol>(m, "MatrixSymbol")
      .def(py::init<int, int, bool>(), py::arg("d"), py::arg("s"),
           py::arg("real_symmetric") = false)
      .def("add_coefficient",
           [](MatrixSymbol& sym, const std::vector<int>& j, const py::array_t<double>& block) {
             const int s = sym.block_size();
             Eigen::MatrixXd b(s, s);
             auto acc = block.unchecked<2>();
             for (int a = 0; a < s; ++a)
               for (int c = 0; c < s; ++c) b(a, c) = acc(a, c);
             sym.add_coefficient(j, b);
           })
      .def("validate", &MatrixSymbol::validate)
      .def_property_readonly("d", &MatrixSymbol::num_variables)
      .def_property_readonly("s", &MatrixSymbol::block_size)
      .def("to_json", &MatrixSymbol::to_json)
      .def_static("from_json", &MatrixSymbol::from_json);

  m.def("symbol_eval", [](const MatrixSymbol& sym, const std::vector<double>& theta) {
    const Eigen::MatrixXd r = symbol_eval(sym, theta);
    py::array_t<double> out({r.rows(), r.cols()});
    auto acc = out.mutable_unchecked<2>();
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index j = 0; j < r.cols(); ++j) acc(i, j) = r(i, j);
    return out;
  });
  m.def("toeplitz_build", [](const MatrixSymbol& sym, const std::vector<int>& n) {
    return toeplitz_build(sym, n);
  });
  m.def("predefined_symbols", [](double alpha) {
    const PredefinedSymbols s = predefined_symbols(alpha);
    return py::make_tuple(s.m, s.kappa, s.f);
  });

  py::enum_<ConstraintKind>(m, "ConstraintKind")
      .value("poisson", ConstraintKind::poisson)
      .value("advection", ConstraintKind::advection);
  py::enum_<PrecVariant>(m, "PrecVariant")
      .value("identity", PrecVariant::identity)
      .value("pn", PrecVariant::pn)
      .value("pbct", PrecVariant::pbct)
      .value("pd", PrecVariant::pd)
      .value("ptilde", PrecVariant::ptilde);

  py::class_<SaddleSystem>(m, "SaddleSystem")
      .def_readonly("n", &SaddleSystem::n)
      .def_readonly("h", &SaddleSystem::h)
      .def_readonly("alpha", &SaddleSystem::alpha)
      .def_readonly("M", &SaddleSystem::M)
      .def_readonly("K", &SaddleSystem::K)
      .def_readonly("Z", &SaddleSystem::Z)
      .def_readonly("A", &SaddleSystem::A)
      .def_readonly("b", &SaddleSystem::b)
      .def_readonly("b_unscaled", &SaddleSystem::b_unscaled)
      .def("unscaled_matrix", &SaddleSystem::unscaled_matrix)
      .def_property_readonly("size", &SaddleSystem::size);

  m.def(
      "build_system",
      [](int n, double alpha, ConstraintKind kind, const std::function<double(double, double)>& yd,
         const std::function<double(double, double)>& z, std::array<double, 2> c, double r) {
        return build_system(n, alpha, kind, yd, z, c, r);
      },
      py::arg("n"), py::arg("alpha"), py::arg("kind"), py::arg("y_d"), py::arg("z"),
      py::arg("c") = std::array<double, 2>{0.0, 0.0}, py::arg("r") = 0.0);
  m.def("build_test_system", [](int n, double alpha, ConstraintKind kind,
                                std::array<double, 2> c, double r) {
    const auto [y_d, z] = problem_fields(kind);
    return build_system(n, alpha, kind, y_d, z, c, r);
  }, py::arg("n"), py::arg("alpha"), py::arg("kind"),
     py::arg("c") = std::array<double, 2>{2.0, 3.0}, py::arg("r") = 1.0);
  m.def("unscale_solution", [](const SaddleSystem& sys, const std::vector<double>& y) {
    return unscale_solution(sys, y);
  });
  m.def("permute_to_block_toeplitz", &permute_to_block_toeplitz);

  py::class_<PreconditionerOp>(m, "PreconditionerOp")
      .def("apply",
           [](const PreconditionerOp& p, const std::vector<double>& r) {
             std::vector<double> z(r.size());
             p.apply(r, z);
             return z;
           })
      .def("assemble", &PreconditionerOp::assemble)
      .def_property_readonly("dim", &PreconditionerOp::dim);

  m.def(
      "make_preconditioner",
      [](const SaddleSystem& sys, PrecVariant v, const std::string& inner, double inner_tol) {
        InnerOptions opt;
        opt.mode = inner == "iterative" ? InnerMode::iterative : InnerMode::direct;
        opt.tol = inner_tol;
        return make_preconditioner(sys, v, opt);
      },
      py::arg("sys"), py::arg("variant"), py::arg("inner") = "direct",
      py::arg("inner_tol") = 1e-8);

  m.def("sample_symbol", [](double alpha, int g) {
    const SymbolSampling s = sample_symbol(alpha, g);
    py::dict d;
    d["grid"] = s.grid;
    d["block_size"] = s.block_size;
    py::list levels;
    for (int l = 0; l < s.block_size; ++l) {
      const auto lv = s.level(l);
      levels.append(py::array_t<double>(static_cast<py::ssize_t>(lv.size()), lv.data()));
    }
    d["levels"] = levels;
    return d;
  });
  m.def("interval_bounds", [](double alpha, int g) {
    const auto b = interval_bounds(alpha, g);
    py::list out;
    for (const auto& [lo, hi] : b) out.append(py::make_tuple(lo, hi));
    return out;
  });
  m.def("count_eigs_in_interval",
        [](const SparseMatrixCSR& a, double lo, double hi, const std::string& closedness) {
          IntervalClosedness c = IntervalClosedness::open_closed;
          if (closedness == "[)") c = IntervalClosedness::closed_open;
          else if (closedness == "()") c = IntervalClosedness::open_open;
          else if (closedness == "[]") c = IntervalClosedness::closed_closed;
          return count_eigs_in_interval(a, lo, hi, c);
        },
        py::arg("a"), py::arg("lo"), py::arg("hi"), py::arg("closedness") = "(]");
  m.def("full_spectrum", &full_spectrum, py::arg("a"), py::arg("dense_limit") = 6000);

  m.def(
      "gmres",
      [](const SparseMatrixCSR& a, const std::vector<double>& b, const PreconditionerOp* p,
         double tol, int maxit) {
        const LinearOperator op = LinearOperator::from_matrix(a);
        const KrylovResult r = gmres(op, p, b, tol, maxit);
        py::dict d;
        d["x"] = r.x;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["residual_history"] = r.residual_history;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("preconditioner") = nullptr, py::arg("tol") = 1e-6,
      py::arg("maxit") = 100);

  m.def("run_solve_case", [](const std::string& problem, int n, double alpha,
                             const std::string& prec, const std::string& solver,
                             const std::string& inner) {
    SolveCase c;
    c.problem = parse_problem(problem);
    c.n = n;
    c.alpha = alpha;
    c.prec = parse_prec(prec);
    c.solver = parse_solver(solver);
    c.inner = inner == "iterative" ? InnerMode::iterative : InnerMode::direct;
    const SolveRow row = run_solve_case(c);
    py::dict d;
    d["alpha"] = row.alpha;
    d["N"] = row.N;
    d["solver"] = row.solver;
    d["preconditioner"] = row.prec;
    d["iterations"] = row.iterations;
    d["converged"] = row.converged;
    d["time_s"] = row.seconds;
    return d;
  }, py::arg("problem"), py::arg("n"), py::arg("alpha"), py::arg("prec") = "pn",
     py::arg("solver") = "gmres", py::arg("inner") = "direct");
}
