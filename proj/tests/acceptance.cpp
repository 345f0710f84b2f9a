// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Expected values and tolerances are fixed in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "saddleglt/experiments.hpp"
#include "saddleglt/fem.hpp"
#include "saddleglt/saddle.hpp"
#include "saddleglt/spectra.hpp"
#include "saddleglt/symbol.hpp"

using namespace saddleglt;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct BNCache {
  int n = 0;
  SparseMatrixCSR b_n;
};

SparseMatrixCSR build_bn(int n, double alpha) {
  const auto [y_d, z] = problem_fields(ConstraintKind::poisson);
  const SaddleSystem sys = build_system(n, alpha, ConstraintKind::poisson, y_d, z);
  return permute_to_block_toeplitz(sys);
}

// --------------------------------------------------------------------------

std::array<std::pair<double, double>, 3> criterion_1_bounds() {
  const double t0 = now_seconds();
  const auto bounds = interval_bounds(1e-4, 3000);
  const double elapsed = now_seconds() - t0;

  const double expect[6] = {-8.006939205138657, -0.971179393341684,
                            0.0,                0.00006086664699,
                            0.971268643759555,  8.006939262908668};
  double maxdiff = 0.0;
  for (int l = 0; l < 3; ++l) {
    maxdiff = std::max(maxdiff, std::abs(bounds[l].first - expect[2 * l]));
    maxdiff = std::max(maxdiff, std::abs(bounds[l].second - expect[2 * l + 1]));
  }
  std::ostringstream d;
  d.precision(3);
  d << "max |bound - reference| = " << maxdiff << " (tol 1e-8), runtime " << elapsed
    << " s (limit 60)";
  report(1, "symbol bounds at alpha=1e-4, grid=3000", maxdiff <= 1e-8 && elapsed < 60.0,
         d.str());
  return bounds;
}

void criterion_2_and_3(const std::array<std::pair<double, double>, 3>& bounds) {
  const double alpha = 1e-4;
  const int ns[4] = {10, 20, 40, 80};
  const long expect_in[4] = {74, 353, 1421, 5694};
  const long expect_out[4] = {26, 47, 179, 706};
  const double expect_ratio[4] = {0.086, 0.039, 0.037, 0.036};

  bool ok2 = true;
  std::ostringstream d2;
  bool ok3 = true;
  std::ostringstream d3;
  for (int i = 0; i < 4; ++i) {
    const int n = ns[i];
    const SparseMatrixCSR b_n = build_bn(n, alpha);
    const SpectralReport rep = spectral_report(b_n, n, bounds);
    const bool row_ok = std::labs(rep.counts[1] - expect_in[i]) <= 2 &&
                        std::labs(rep.outliers - expect_out[i]) <= 2 &&
                        std::abs(rep.outlier_ratio - expect_ratio[i]) <= 0.005;
    ok2 = ok2 && row_ok;
    d2 << "n=" << n << ":" << rep.counts[1] << "/" << rep.outliers << " ";
    if (n == 40) {
      const long c1 = rep.counts[0], c2 = rep.counts[1], c3 = rep.counts[2];
      ok3 = std::labs(c1 - 1600) <= 2 && std::labs(c2 - 1421) <= 2 && std::labs(c3 - 1600) <= 2;
      d3 << "counts = (" << c1 << ", " << c2 << ", " << c3
         << "), expected (1600, 1421, 1600) +-2";
    }
  }
  d2 << "vs {74/26, 353/47, 1421/179, 5694/706} +-2";
  report(2, "interval counts for n in {10,20,40,80}", ok2, d2.str());
  report(3, "per-interval counts at n=40", ok3, d3.str());
}

void criterion_4() {
  bool ok = true;
  std::ostringstream d;
  const auto [y_d, z] = problem_fields(ConstraintKind::poisson);
  for (const int n : {4, 8}) {
    for (const double alpha : {1e-2, 1e-3}) {
      const SaddleSystem sys = build_system(n, alpha, ConstraintKind::poisson, y_d, z);
      for (const auto variant : {PrecVariant::pn, PrecVariant::pbct}) {
        const auto rep = preconditioned_spectrum_check(sys, variant);
        const bool case_ok = rep.unit_count >= 2L * n * n &&
                             rep.nonunit.size() == static_cast<std::size_t>(n) * n &&
                             rep.max_match_error <= 1e-8;
        ok = ok && case_ok;
        if (!case_ok)
          d << "[n=" << n << " alpha=" << alpha << " " << prec_name(variant)
            << ": unit=" << rep.unit_count << " err=" << rep.max_match_error << "] ";
      }
    }
  }
  if (ok) d << "unit count = 2n^2 and non-unit eigenvalues match 1+(h^4/a)mu to 1e-8";
  report(4, "preconditioned spectrum structure (pn, pbct)", ok, d.str());
}

void criterion_5() {
  // Non-unit eigenvalues of the preconditioned matrix via the defining
  // pencil M x = mu (K M^{-1} K) x, lambda = 1 + (h^4/alpha) mu.
  const auto pencil_lambdas = [](int n, double alpha) {
    const UniformMesh mesh(n);
    const double h = mesh.h();
    const SparseMatrixCSR Msp = (1.0 / (h * h)) * assemble_mass(mesh);
    const SparseMatrixCSR Ksp = assemble_stiffness(mesh);
    const Index nn = Msp.rows();
    Eigen::MatrixXd Md = Eigen::MatrixXd::Zero(nn, nn), Kd = Eigen::MatrixXd::Zero(nn, nn);
    for (Index i = 0; i < nn; ++i)
      for (Index j = 0; j < nn; ++j) {
        Md(i, j) = Msp.coeff(i, j);
        Kd(i, j) = Ksp.coeff(i, j);
      }
    const Eigen::MatrixXd G = Kd.transpose() * Md.ldlt().solve(Kd);
    std::vector<double> lam;
    {
      // mu ascending from the generalized problem; assemble lambdas
      Eigen::MatrixXd A = Md, B = G;
      // dsygv via full_spectrum-style call is not exposed; use Eigen's
      // generalized solver here (small orders only).
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B,
                                                                    Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < ges.eigenvalues().size(); ++i)
        lam.push_back(1.0 + h * h * h * h / alpha * ges.eigenvalues()[i]);
    }
    return lam;
  };

  bool ok = true;
  std::ostringstream d;
  double prev_fraction = 2.0;
  d << "fractions outside [0.99,1.01]: ";
  for (const int n : {8, 16, 32}) {
    const auto lam = pencil_lambdas(n, 1e-3);
    long out = 0;
    for (double l : lam)
      if (l < 0.99 || l > 1.01) ++out;
    const double fraction = static_cast<double>(out) / static_cast<double>(lam.size());
    d << fraction << " ";
    if (fraction > prev_fraction + 1e-12) ok = false;
    prev_fraction = fraction;
  }

  // lambda_max scaling: (lambda_max - 1) * alpha constant within factor 2.
  std::vector<double> scaled;
  for (const double alpha : {1e-2, 1e-3, 1e-4}) {
    const auto lam = pencil_lambdas(16, alpha);
    double lmax = 0.0;
    for (double l : lam) lmax = std::max(lmax, l);
    scaled.push_back((lmax - 1.0) * alpha);
  }
  const auto [mn, mx] = std::minmax_element(scaled.begin(), scaled.end());
  const double factor = *mx / *mn;
  d << "; (lambda_max-1)*alpha spread factor = " << factor << " (limit 2)";
  if (factor > 2.0) ok = false;
  report(5, "clustering trend and O(1/alpha) growth", ok, d.str());
}

void criterion_6() {
  const double t0 = now_seconds();
  bool ok = true;
  std::ostringstream d;

  const int ns_a[4] = {7, 15, 31, 63};
  const int expect_a[4] = {3, 3, 3, 2};
  d << "alpha=1e-3: ";
  for (int i = 0; i < 4; ++i) {
    SolveCase c;
    c.n = ns_a[i];
    c.alpha = 1e-3;
    const SolveRow row = run_solve_case(c);
    d << row.iterations << " ";
    if (!row.converged || std::abs(row.iterations - expect_a[i]) > 2) ok = false;
  }
  d << "(expect {3,3,3,2} +-2); alpha=1e-6: ";
  const int ns_b[3] = {7, 15, 31};
  const int expect_b[3] = {15, 14, 9};
  for (int i = 0; i < 3; ++i) {
    SolveCase c;
    c.n = ns_b[i];
    c.alpha = 1e-6;
    const SolveRow row = run_solve_case(c);
    d << row.iterations << " ";
    if (!row.converged || std::abs(row.iterations - expect_b[i]) > 3) ok = false;
  }
  d << "(expect {15,14,9} +-3); unpreconditioned N=675: ";
  {
    SolveCase c;
    c.n = 15;
    c.alpha = 1e-3;
    c.prec = PrecVariant::identity;
    const SolveRow row = run_solve_case(c);
    d << (row.converged ? "converged" : "dagger");
    if (row.converged) ok = false;
  }
  const double elapsed = now_seconds() - t0;
  d << "; runtime " << static_cast<int>(elapsed) << " s (limit 300)";
  if (elapsed >= 300.0) ok = false;
  report(6, "Poisson iteration counts (P_N/GMRES, exact inner)", ok, d.str());
}

void criterion_7() {
  bool ok = true;
  std::ostringstream d;
  const int ns[3] = {7, 15, 31};
  const int expect[3] = {5, 5, 4};
  for (int i = 0; i < 3; ++i) {
    SolveCase c;
    c.problem = ConstraintKind::advection;
    c.n = ns[i];
    c.alpha = 1e-3;
    c.prec = PrecVariant::pbct;
    const SolveRow row = run_solve_case(c);
    d << row.iterations << " ";
    if (!row.converged || std::abs(row.iterations - expect[i]) > 3) ok = false;
  }
  d << "(expect {5,5,4} +-3, advection c=(2,3), r=1)";
  report(7, "advection iteration counts (P_BCT/GMRES)", ok, d.str());
}

void criterion_8() {
  bool ok = true;
  std::ostringstream d;
  d << "alpha=1e-9, iterations: ";
  for (const int n : {7, 15, 31}) {
    SolveCase c;
    c.n = n;
    c.alpha = 1e-9;
    c.prec = PrecVariant::pd;
    const SolveRow row = run_solve_case(c);
    d << row.iterations << " ";
    if (!row.converged || row.iterations > 8) ok = false;
  }
  {
    SolveCase c;
    c.n = 63;
    c.alpha = 1e-9;
    c.prec = PrecVariant::pd;
    const SolveRow row = run_solve_case(c);
    d << "; N=11907 -> " << (row.converged ? std::to_string(row.iterations) : "dagger")
      << " (expect dagger)";
    if (row.converged) ok = false;
  }
  report(8, "P_D behavior on the unscaled system", ok, d.str());
}

void criterion_9() {
  bool ok_toeplitz = true;
  double worst = 0.0;
  const auto syms = predefined_symbols(1.0);
  // n starts at 2: at n = 1 the first-neighbour coefficients are out of
  // band and toeplitz_build reports them by contract.
  for (int n = 2; n <= 32; ++n) {
    const UniformMesh mesh(n);
    const double h = mesh.h();
    const std::array<int, 2> nn = {n, n};
    const double dm =
        SparseMatrixCSR::max_abs_diff(assemble_mass(mesh), h * h * toeplitz_build(syms.m, nn));
    const double dk =
        SparseMatrixCSR::max_abs_diff(assemble_stiffness(mesh), toeplitz_build(syms.kappa, nn));
    worst = std::max({worst, dm, dk});
    if (dm > 1e-14 || dk > 1e-14) ok_toeplitz = false;
  }

  bool ok_inertia = true;
  const auto bounds = interval_bounds(1e-4, 200);
  for (int n = 2; n <= 20; n += 2) {
    const SparseMatrixCSR b_n = build_bn(n, 1e-4);
    const auto spectrum = full_spectrum(b_n);
    const std::array<std::pair<double, double>, 3> iv = bounds;
    const long c1 =
        count_eigs_in_interval(b_n, iv[0].first, iv[0].second, IntervalClosedness::open_closed);
    const long c2 =
        count_eigs_in_interval(b_n, iv[1].first, iv[1].second, IntervalClosedness::open_closed);
    const long c3 =
        count_eigs_in_interval(b_n, iv[2].first, iv[2].second, IntervalClosedness::closed_open);
    long b1 = 0, b2 = 0, b3 = 0;
    for (double v : spectrum) {
      if (v > iv[0].first && v <= iv[0].second) ++b1;
      if (v > iv[1].first && v <= iv[1].second) ++b2;
      if (v >= iv[2].first && v < iv[2].second) ++b3;
    }
    if (c1 != b1 || c2 != b2 || c3 != b3) ok_inertia = false;
  }

  std::ostringstream d;
  d << "max FEM-vs-Toeplitz entry diff = " << worst
    << " (tol 1e-14); inertia equals brute force for n <= 20: "
    << (ok_inertia ? "yes" : "no");
  report(9, "oracle equivalence (Toeplitz identity, inertia)", ok_toeplitz && ok_inertia,
         d.str());
}

void criterion_10() {
  // (a) sign-flip symmetry: simultaneous flips for every symbol (the
  // cos(theta1+theta2) mode rules out independent flips for m and f),
  // plus each single flip for kappa.
  bool ok_sym = true;
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> theta(-M_PI, M_PI);
  for (const double alpha : {1e-2, 1e-4, 1e-6}) {
    const auto syms = predefined_symbols(alpha);
    for (int rep = 0; rep < 100; ++rep) {
      const double t1 = theta(rng), t2 = theta(rng);
      for (const MatrixSymbol* sym : {&syms.m, &syms.kappa, &syms.f}) {
        const Eigen::MatrixXd base = symbol_eval(*sym, std::array{t1, t2});
        if ((symbol_eval(*sym, std::array{-t1, -t2}) - base).cwiseAbs().maxCoeff() > 1e-13)
          ok_sym = false;
      }
      const Eigen::MatrixXd kbase = symbol_eval(syms.kappa, std::array{t1, t2});
      for (const auto& fl : {std::array{-t1, t2}, std::array{t1, -t2}})
        if ((symbol_eval(syms.kappa, fl) - kbase).cwiseAbs().maxCoeff() > 1e-13) ok_sym = false;
    }
  }

  // (b) pointwise ordering on all grids up to g = 200
  bool ok_order = true;
  for (const double alpha : {1e-2, 1e-4, 1e-6}) {
    for (int g = 2; g <= 200; ++g) {
      const auto s = sample_symbol(alpha, g);
      const auto l1 = s.level(0), l2 = s.level(1), l3 = s.level(2);
      for (std::size_t i = 0; i < l1.size(); ++i)
        if (!(l1[i] < 0.0 && l2[i] >= 0.0 && l2[i] < l3[i])) ok_order = false;
    }
  }

  // (c) permutation similarity for n <= 6
  bool ok_perm = true;
  for (int n = 2; n <= 6; ++n) {
    const auto [y_d, z] = problem_fields(ConstraintKind::poisson);
    const SaddleSystem sys = build_system(n, 1e-4, ConstraintKind::poisson, y_d, z);
    const auto ea = full_spectrum(sys.A);
    const auto eb = full_spectrum(permute_to_block_toeplitz(sys));
    for (std::size_t i = 0; i < ea.size(); ++i)
      if (std::abs(ea[i] - eb[i]) > 1e-10) ok_perm = false;
  }

  std::ostringstream d;
  d << "sign-flip symmetry: " << (ok_sym ? "ok" : "violated")
    << "; pointwise ordering: " << (ok_order ? "ok" : "violated")
    << "; permutation similarity: " << (ok_perm ? "ok" : "violated");
  report(10, "invariant suites", ok_sym && ok_order && ok_perm, d.str());
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  const auto bounds = criterion_1_bounds();
  criterion_2_and_3(bounds);
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("================\n%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
