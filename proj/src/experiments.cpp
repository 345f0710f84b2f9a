#include "saddleglt/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace saddleglt {

ScalarField poisson_desired_state() {
  return [](double x1, double x2) {
    return -std::sin(8 * M_PI * x1) * std::sin(8 * M_PI * x2) +
           std::sin(M_PI * x1) * std::sin(M_PI * x2);
  };
}

ScalarField poisson_forcing() {
  return [](double x1, double x2) {
    return 2 * M_PI * M_PI * std::sin(M_PI * x1) +
           std::sin(8 * M_PI * x1) * std::sin(8 * M_PI * x2) / (128 * M_PI * M_PI);
  };
}

ScalarField dcr_desired_state() {
  return [](double x1, double x2) {
    const double g1 = std::exp(-((x1 - 0.2) * (x1 - 0.2) + (x2 - 0.2) * (x2 - 0.2)) /
                               (2 * 0.07 * 0.07));
    const double g2 = std::exp(-((x1 - 0.6) * (x1 - 0.6) + (x2 - 0.6) * (x2 - 0.6)) /
                               (2 * 0.05 * 0.05));
    return 0.5 / (0.07 * std::sqrt(2 * M_PI)) * g1 + 0.8 / (0.05 * std::sqrt(2 * M_PI)) * g2;
  };
}

ScalarField dcr_forcing() {
  return [](double x1, double x2) { return std::sin(M_PI * x1) * std::sin(M_PI * x2); };
}

std::pair<ScalarField, ScalarField> problem_fields(ConstraintKind kind) {
  if (kind == ConstraintKind::poisson) return {poisson_desired_state(), poisson_forcing()};
  return {dcr_desired_state(), dcr_forcing()};
}

std::string prec_name(PrecVariant v) {
  switch (v) {
    case PrecVariant::identity: return "none";
    case PrecVariant::pn: return "pn";
    case PrecVariant::pbct: return "pbct";
    case PrecVariant::pd: return "pd";
    case PrecVariant::ptilde: return "ptilde";
  }
  return "?";
}

std::string solver_name(SolverKind s) {
  return s == SolverKind::gmres ? "gmres" : "fgmres";
}

PrecVariant parse_prec(const std::string& name) {
  if (name == "none") return PrecVariant::identity;
  if (name == "pn") return PrecVariant::pn;
  if (name == "pbct") return PrecVariant::pbct;
  if (name == "pd") return PrecVariant::pd;
  if (name == "ptilde") return PrecVariant::ptilde;
  throw std::invalid_argument("unknown preconditioner: " + name);
}

SolverKind parse_solver(const std::string& name) {
  if (name == "gmres") return SolverKind::gmres;
  if (name == "fgmres") return SolverKind::fgmres;
  throw std::invalid_argument("unknown solver: " + name);
}

ConstraintKind parse_problem(const std::string& name) {
  if (name == "poisson") return ConstraintKind::poisson;
  if (name == "advection") return ConstraintKind::advection;
  throw std::invalid_argument("unknown problem: " + name);
}

SolveRow run_solve_case(const SolveCase& c) {
  SolveRow row;
  row.alpha = c.alpha;
  row.N = 3 * static_cast<Index>(c.n) * c.n;
  row.solver = solver_name(c.solver);
  row.prec = prec_name(c.prec);

  const auto [y_d, z] = problem_fields(c.problem);
  const SaddleSystem sys =
      build_system(c.n, c.alpha, c.problem, y_d, z,
                   c.problem == ConstraintKind::advection ? c.c : std::array<double, 2>{0, 0},
                   c.problem == ConstraintKind::advection ? c.r : 0.0);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    const InnerOptions inner{c.inner, c.inner_tol, 0};
    const PreconditionerOp prec = make_preconditioner(sys, c.prec, inner);

    SparseMatrixCSR matrix = sys.A;
    std::vector<double> rhs = sys.b;
    if (prec.on_unscaled_system()) {
      matrix = sys.unscaled_matrix();
      rhs = sys.b_unscaled;
    } else if (prec.on_swapped_system()) {
      matrix = swap_first_two_blocks(sys.A, sys.block_order());
      rhs = swap_first_two_blocks(sys.b, sys.block_order());
    }
    const LinearOperator op = LinearOperator::from_matrix(matrix);
    const Preconditioner* p = c.prec == PrecVariant::identity ? nullptr : &prec;
    const KrylovResult res = c.solver == SolverKind::gmres
                                 ? gmres(op, p, rhs, c.tol, c.maxit)
                                 : fgmres(op, p, rhs, c.tol, c.maxit);
    row.converged = res.converged;
    row.iterations = res.converged ? res.iterations : -1;
    row.final_residual = res.residual_history.back();
  } catch (const InnerSolveError&) {
    row.converged = false;
    row.iterations = -1;
  } catch (const SolverBreakdown&) {
    row.converged = false;
    row.iterations = -1;
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

void write_solve_csv_header(std::ostream& os) {
  os << "alpha,N,solver,preconditioner,iterations,converged,time_s\n";
}

void write_solve_csv_row(std::ostream& os, const SolveRow& row) {
  os.precision(12);
  os << row.alpha << "," << row.N << "," << row.solver << "," << row.prec << ","
     << row.iterations << "," << (row.converged ? "true" : "false") << "," << row.seconds
     << "\n";
}

void write_count_csv_header(std::ostream& os) {
  os << "n,count_in,expected,count_out,ratio\n";
}

void write_count_csv_row(std::ostream& os, int n, const SpectralReport& rep) {
  os.precision(12);
  os << n << "," << rep.counts[1] << "," << rep.expected << "," << rep.outliers << ","
     << rep.outlier_ratio << "\n";
}

}  // namespace saddleglt
