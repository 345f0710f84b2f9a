#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "saddleglt/saddle.hpp"
#include "saddleglt/spectra.hpp"

namespace saddleglt {

// Test-problem data of the experiment suite.
ScalarField poisson_desired_state();
ScalarField poisson_forcing();
ScalarField dcr_desired_state();  // two Gaussian impulses
ScalarField dcr_forcing();

/// Desired state / forcing pair for a constraint kind.
std::pair<ScalarField, ScalarField> problem_fields(ConstraintKind kind);

enum class SolverKind { gmres, fgmres };

struct SolveCase {
  ConstraintKind problem = ConstraintKind::poisson;
  int n = 7;
  double alpha = 1e-3;
  PrecVariant prec = PrecVariant::pn;
  SolverKind solver = SolverKind::gmres;
  InnerMode inner = InnerMode::direct;
  double tol = 1e-6;
  int maxit = 100;
  double inner_tol = 1e-8;
  std::array<double, 2> c = {2.0, 3.0};
  double r = 1.0;
};

struct SolveRow {
  double alpha = 0.0;
  Index N = 0;
  std::string solver;
  std::string prec;
  int iterations = -1;  // -1 encodes failure to converge
  bool converged = false;
  double seconds = 0.0;
  double final_residual = 0.0;
};

/// Builds the system, runs the requested solver/preconditioner pair and
/// reports the iteration count.  Solver failures (no convergence within
/// maxit, inner-solve divergence, breakdowns) are recorded as rows with
/// iterations = -1, not raised.
SolveRow run_solve_case(const SolveCase& c);

std::string prec_name(PrecVariant v);
std::string solver_name(SolverKind s);
PrecVariant parse_prec(const std::string& name);
SolverKind parse_solver(const std::string& name);
ConstraintKind parse_problem(const std::string& name);

// Fixed-header table emitters.
void write_solve_csv_header(std::ostream& os);
void write_solve_csv_row(std::ostream& os, const SolveRow& row);
void write_count_csv_header(std::ostream& os);
void write_count_csv_row(std::ostream& os, int n, const SpectralReport& rep);

}  // namespace saddleglt
