#include "saddleglt/krylov.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace saddleglt {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseMatrixCSR& a) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(a.nnz()));
  const auto& rp = a.row_offsets();
  const auto& ci = a.col_indices();
  const auto& v = a.values();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k)
      trips.emplace_back(static_cast<int>(i), static_cast<int>(ci[static_cast<std::size_t>(k)]),
                         v[static_cast<std::size_t>(k)]);
  Eigen::SparseMatrix<double> m(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

void check_finite(std::span<const double> v, const char* where, int iteration) {
  for (double x : v)
    if (!std::isfinite(x)) throw SolverBreakdown(std::string(where) + ": non-finite value", iteration);
}

}  // namespace

LinearOperator LinearOperator::from_matrix(const SparseMatrixCSR& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("LinearOperator needs a square matrix");
  auto m = std::make_shared<SparseMatrixCSR>(a);
  return LinearOperator(m->rows(), [m](std::span<const double> x, std::span<double> y) {
    m->multiply(x, y);
  });
}

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  std::copy(r.begin(), r.end(), z.begin());
}

// ---------------------------------------------------------------------------
// GMRES / FGMRES share one Arnoldi loop; `flexible` selects which basis the
// solution is assembled from.
namespace {

KrylovResult gmres_impl(const LinearOperator& a, const Preconditioner* p,
                        std::span<const double> b, double tol, int maxit, bool flexible) {
  const Index n = a.dim();
  if (static_cast<Index>(b.size()) != n) throw std::invalid_argument("gmres: rhs size mismatch");
  if (tol <= 0.0) throw std::invalid_argument("gmres: tol must be positive");
  if (p && p->dim() != n) throw std::invalid_argument("gmres: preconditioner size mismatch");
  KrylovResult result;
  result.x.assign(static_cast<std::size_t>(n), 0.0);

  const double beta = norm2(b);
  if (beta == 0.0) {
    result.converged = true;
    result.residual_history = {0.0};
    return result;
  }
  result.residual_history = {1.0};

  std::vector<std::vector<double>> v;  // Arnoldi basis
  std::vector<std::vector<double>> z;  // preconditioned basis (flexible only)
  v.emplace_back(b.begin(), b.end());
  for (double& x : v[0]) x /= beta;

  const int m = maxit;
  std::vector<double> h(static_cast<std::size_t>(m + 1) * m, 0.0);  // column-major (m+1) x m
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(j) * (m + 1) + i]; };
  std::vector<double> g(static_cast<std::size_t>(m) + 1, 0.0);
  g[0] = beta;
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));

  std::vector<double> w(static_cast<std::size_t>(n)), t(static_cast<std::size_t>(n));

  auto assemble_solution = [&](int k) {
    // Solve the k x k triangular system H y = g.
    std::vector<double> y(g.begin(), g.begin() + k);
    for (int i = k - 1; i >= 0; --i) {
      for (int j = i + 1; j < k; ++j) y[static_cast<std::size_t>(i)] -= H(i, j) * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] /= H(i, i);
    }
    std::fill(t.begin(), t.end(), 0.0);
    if (flexible) {
      for (int j = 0; j < k; ++j) axpy(y[static_cast<std::size_t>(j)], z[static_cast<std::size_t>(j)], t);
      result.x = t;
    } else {
      for (int j = 0; j < k; ++j) axpy(y[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(j)], t);
      if (p) {
        p->apply(t, result.x);
      } else {
        result.x = t;
      }
    }
  };
  auto true_residual = [&] {
    std::vector<double> r(static_cast<std::size_t>(n));
    a.apply(result.x, r);
    for (Index i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
    return norm2(r) / beta;
  };

  for (int j = 0; j < m; ++j) {
    // w = A P^{-1} v_j
    if (p) {
      if (flexible) {
        z.emplace_back(static_cast<std::size_t>(n));
        p->apply(v[static_cast<std::size_t>(j)], z.back());
        a.apply(z.back(), w);
      } else {
        p->apply(v[static_cast<std::size_t>(j)], t);
        a.apply(t, w);
      }
    } else {
      if (flexible) z.emplace_back(v[static_cast<std::size_t>(j)]);
      a.apply(v[static_cast<std::size_t>(j)], w);
    }
    check_finite(w, "gmres", j);

    // Modified Gram-Schmidt with one reorthogonalization pass.
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) {
        const double c = dot(v[static_cast<std::size_t>(i)], w);
        if (pass == 0)
          H(i, j) = c;
        else
          H(i, j) += c;
        axpy(-c, v[static_cast<std::size_t>(i)], w);
      }
    const double hnorm = norm2(w);
    H(j + 1, j) = hnorm;

    // Apply previous Givens rotations, then form the new one.
    for (int i = 0; i < j; ++i) {
      const double tmp = cs[static_cast<std::size_t>(i)] * H(i, j) + sn[static_cast<std::size_t>(i)] * H(i + 1, j);
      H(i + 1, j) = -sn[static_cast<std::size_t>(i)] * H(i, j) + cs[static_cast<std::size_t>(i)] * H(i + 1, j);
      H(i, j) = tmp;
    }
    const double denom = std::hypot(H(j, j), H(j + 1, j));
    if (denom == 0.0) throw SolverBreakdown("gmres: zero Hessenberg column", j);
    cs[static_cast<std::size_t>(j)] = H(j, j) / denom;
    sn[static_cast<std::size_t>(j)] = H(j + 1, j) / denom;
    H(j, j) = denom;
    H(j + 1, j) = 0.0;
    g[static_cast<std::size_t>(j) + 1] = -sn[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
    g[static_cast<std::size_t>(j)] = cs[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];

    const double est = std::abs(g[static_cast<std::size_t>(j) + 1]) / beta;
    result.residual_history.push_back(est);
    result.iterations = j + 1;

    const bool happy = hnorm <= 1e-14 * beta;
    if (est <= tol || happy) {
      assemble_solution(j + 1);
      const double res = true_residual();
      if (res <= tol || happy) {
        result.residual_history.back() = res;
        result.converged = res <= tol;
        return result;
      }
      // Estimate and true residual disagree (heavy roundoff); keep iterating.
    }
    if (j + 1 < m) {
      if (hnorm == 0.0) throw SolverBreakdown("gmres: lucky breakdown without convergence", j);
      v.emplace_back(w);
      for (double& x : v.back()) x /= hnorm;
    }
  }

  assemble_solution(m);
  const double res = true_residual();
  result.residual_history.back() = res;
  result.converged = res <= tol;
  return result;
}

}  // namespace

KrylovResult gmres(const LinearOperator& a, const Preconditioner* p,
                   std::span<const double> b, double tol, int maxit) {
  return gmres_impl(a, p, b, tol, maxit, false);
}

KrylovResult fgmres(const LinearOperator& a, const Preconditioner* p,
                    std::span<const double> b, double tol, int maxit) {
  return gmres_impl(a, p, b, tol, maxit, true);
}

KrylovResult cg(const LinearOperator& a, const Preconditioner* p,
                std::span<const double> b, double tol, int maxit) {
  const Index n = a.dim();
  if (static_cast<Index>(b.size()) != n) throw std::invalid_argument("cg: rhs size mismatch");
  if (maxit <= 0) maxit = static_cast<int>(n);
  KrylovResult result;
  result.x.assign(static_cast<std::size_t>(n), 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    result.converged = true;
    result.residual_history = {0.0};
    return result;
  }
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> zv(static_cast<std::size_t>(n)), pv, ap(static_cast<std::size_t>(n));
  if (p)
    p->apply(r, zv);
  else
    zv = r;
  pv = zv;
  double rz = dot(r, zv);
  result.residual_history = {1.0};
  for (int it = 0; it < maxit; ++it) {
    a.apply(pv, ap);
    const double pap = dot(pv, ap);
    if (!(pap > 0.0)) throw SolverBreakdown("cg: operator is not positive definite", it);
    const double alpha = rz / pap;
    axpy(alpha, pv, result.x);
    axpy(-alpha, ap, r);
    const double res = norm2(r) / bnorm;
    result.residual_history.push_back(res);
    result.iterations = it + 1;
    if (res <= tol) {
      result.converged = true;
      return result;
    }
    if (p)
      p->apply(r, zv);
    else
      zv = r;
    const double rz_new = dot(r, zv);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (Index i = 0; i < n; ++i)
      pv[static_cast<std::size_t>(i)] = zv[static_cast<std::size_t>(i)] + beta * pv[static_cast<std::size_t>(i)];
  }
  return result;
}

KrylovResult bicgstab(const LinearOperator& a, const Preconditioner* p,
                      std::span<const double> b, double tol, int maxit) {
  const Index n = a.dim();
  if (static_cast<Index>(b.size()) != n) throw std::invalid_argument("bicgstab: rhs size mismatch");
  if (maxit <= 0) maxit = static_cast<int>(n);
  KrylovResult result;
  result.x.assign(static_cast<std::size_t>(n), 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    result.converged = true;
    result.residual_history = {0.0};
    return result;
  }
  std::vector<double> r(b.begin(), b.end());
  const std::vector<double> rhat = r;
  std::vector<double> pv(static_cast<std::size_t>(n), 0.0), vv(static_cast<std::size_t>(n), 0.0);
  std::vector<double> ph(static_cast<std::size_t>(n)), sh(static_cast<std::size_t>(n)),
      s(static_cast<std::size_t>(n)), tvec(static_cast<std::size_t>(n));
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  result.residual_history = {1.0};
  for (int it = 0; it < maxit; ++it) {
    const double rho_new = dot(rhat, r);
    if (rho_new == 0.0) throw SolverBreakdown("bicgstab: rho breakdown", it);
    if (it == 0) {
      pv = r;
    } else {
      if (omega == 0.0) throw SolverBreakdown("bicgstab: omega breakdown", it);
      const double beta = (rho_new / rho) * (alpha / omega);
      for (Index i = 0; i < n; ++i)
        pv[static_cast<std::size_t>(i)] =
            r[static_cast<std::size_t>(i)] +
            beta * (pv[static_cast<std::size_t>(i)] - omega * vv[static_cast<std::size_t>(i)]);
    }
    rho = rho_new;
    if (p)
      p->apply(pv, ph);
    else
      ph = pv;
    a.apply(ph, vv);
    const double rhv = dot(rhat, vv);
    if (rhv == 0.0) throw SolverBreakdown("bicgstab: stagnation (rhat, v) = 0", it);
    alpha = rho / rhv;
    for (Index i = 0; i < n; ++i)
      s[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] - alpha * vv[static_cast<std::size_t>(i)];
    if (norm2(s) / bnorm <= tol) {
      axpy(alpha, ph, result.x);
      result.iterations = it + 1;
      result.residual_history.push_back(norm2(s) / bnorm);
      result.converged = true;
      return result;
    }
    if (p)
      p->apply(s, sh);
    else
      sh = s;
    a.apply(sh, tvec);
    const double tt = dot(tvec, tvec);
    if (tt == 0.0) throw SolverBreakdown("bicgstab: t = 0", it);
    omega = dot(tvec, s) / tt;
    axpy(alpha, ph, result.x);
    axpy(omega, sh, result.x);
    for (Index i = 0; i < n; ++i)
      r[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] - omega * tvec[static_cast<std::size_t>(i)];
    check_finite(r, "bicgstab", it);
    const double res = norm2(r) / bnorm;
    result.residual_history.push_back(res);
    result.iterations = it + 1;
    if (res <= tol) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Direct factorization handles (Eigen-backed).

struct SparseCholesky::Impl {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  Index n = 0;
};

SparseCholesky::SparseCholesky(const SparseMatrixCSR& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix must be square");
  impl_->n = a.rows();
  impl_->llt.compute(to_eigen(a));
  if (impl_->llt.info() != Eigen::Success)
    throw std::runtime_error("cholesky: factorization failed (matrix not positive definite?)");
}

SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

Index SparseCholesky::dim() const { return impl_->n; }

void SparseCholesky::solve(std::span<const double> b, std::span<double> x) const {
  Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd xv = impl_->llt.solve(bm);
  std::copy(xv.data(), xv.data() + xv.size(), x.begin());
}

std::vector<double> SparseCholesky::solve(std::span<const double> b) const {
  std::vector<double> x(b.size());
  solve(b, x);
  return x;
}

struct SparseLU::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Index n = 0;
};

SparseLU::SparseLU(const SparseMatrixCSR& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lu: matrix must be square");
  impl_->n = a.rows();
  Eigen::SparseMatrix<double> m = to_eigen(a);
  impl_->lu.analyzePattern(m);
  impl_->lu.factorize(m);
  if (impl_->lu.info() != Eigen::Success)
    throw std::runtime_error("lu: factorization failed (singular matrix?)");
}

SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

Index SparseLU::dim() const { return impl_->n; }

void SparseLU::solve(std::span<const double> b, std::span<double> x) const {
  Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd xv = impl_->lu.solve(bm);
  std::copy(xv.data(), xv.data() + xv.size(), x.begin());
}

std::vector<double> SparseLU::solve(std::span<const double> b) const {
  std::vector<double> x(b.size());
  solve(b, x);
  return x;
}

// ---------------------------------------------------------------------------
// Incomplete factorizations.

namespace {

// Lower-triangular CSR factor storage for IC(0).
struct LowerFactor {
  std::vector<Index> row_ptr, col_idx;
  std::vector<double> values;  // diagonal stored last in each row
  Index n = 0;

  void forward(std::span<const double> b, std::span<double> y) const {
    for (Index i = 0; i < n; ++i) {
      double s = b[static_cast<std::size_t>(i)];
      const Index end = row_ptr[static_cast<std::size_t>(i) + 1] - 1;  // diag at `end`
      for (Index k = row_ptr[static_cast<std::size_t>(i)]; k < end; ++k)
        s -= values[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])];
      y[static_cast<std::size_t>(i)] = s / values[static_cast<std::size_t>(end)];
    }
  }
  void backward(std::span<const double> b, std::span<double> y) const {
    std::copy(b.begin(), b.end(), y.begin());
    for (Index i = n - 1; i >= 0; --i) {
      const Index end = row_ptr[static_cast<std::size_t>(i) + 1] - 1;
      const double yi = y[static_cast<std::size_t>(i)] / values[static_cast<std::size_t>(end)];
      y[static_cast<std::size_t>(i)] = yi;
      for (Index k = row_ptr[static_cast<std::size_t>(i)]; k < end; ++k)
        y[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])] -= values[static_cast<std::size_t>(k)] * yi;
    }
  }
};

// IC(0): zero-fill incomplete Cholesky on the lower-triangular pattern of A.
// Returns false when a pivot is nonpositive.
bool ic0_factor(const SparseMatrixCSR& a, double shift, LowerFactor& out) {
  const Index n = a.rows();
  out.n = n;
  out.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  out.col_idx.clear();
  out.values.clear();
  const auto& rp = a.row_offsets();
  const auto& ci = a.col_indices();
  const auto& av = a.values();
  for (Index i = 0; i < n; ++i) {
    bool saw_diag = false;
    for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
      const Index j = ci[static_cast<std::size_t>(k)];
      if (j > i) break;
      out.col_idx.push_back(j);
      double v = av[static_cast<std::size_t>(k)];
      if (j == i) {
        v += shift;
        saw_diag = true;
      }
      out.values.push_back(v);
    }
    if (!saw_diag) return false;
    out.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<Index>(out.col_idx.size());
  }

  // Up-looking factorization over the fixed pattern.
  for (Index i = 0; i < n; ++i) {
    const Index beg = out.row_ptr[static_cast<std::size_t>(i)];
    const Index end = out.row_ptr[static_cast<std::size_t>(i) + 1] - 1;  // diag position
    for (Index k = beg; k <= end; ++k) {
      const Index j = out.col_idx[static_cast<std::size_t>(k)];
      double s = out.values[static_cast<std::size_t>(k)];
      // dot of rows i and j over columns < j (both sorted)
      Index pi = beg;
      Index pj = out.row_ptr[static_cast<std::size_t>(j)];
      const Index ej = out.row_ptr[static_cast<std::size_t>(j) + 1] - 1;
      while (pi < k && pj < ej) {
        const Index cii = out.col_idx[static_cast<std::size_t>(pi)];
        const Index cjj = out.col_idx[static_cast<std::size_t>(pj)];
        if (cii == cjj) {
          s -= out.values[static_cast<std::size_t>(pi)] * out.values[static_cast<std::size_t>(pj)];
          ++pi;
          ++pj;
        } else if (cii < cjj) {
          ++pi;
        } else {
          ++pj;
        }
      }
      if (j < i) {
        out.values[static_cast<std::size_t>(k)] =
            s / out.values[static_cast<std::size_t>(out.row_ptr[static_cast<std::size_t>(j) + 1] - 1)];
      } else {
        if (s <= 0.0) return false;
        out.values[static_cast<std::size_t>(k)] = std::sqrt(s);
      }
    }
  }
  return true;
}

}  // namespace

struct IncompleteCholesky::Impl {
  LowerFactor ic;  // pattern0
  Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::AMDOrdering<int>> ict;  // threshold
  FillPolicy::Kind kind = FillPolicy::Kind::pattern0;
  Index n = 0;
  double shift = 0.0;
};

IncompleteCholesky::IncompleteCholesky(const SparseMatrixCSR& a, FillPolicy policy)
    : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("ic: matrix must be square");
  impl_->n = a.rows();
  impl_->kind = policy.kind;
  if (policy.kind == FillPolicy::Kind::threshold) {
    // Drop-tolerance variant backed by Eigen's shifted incomplete Cholesky.
    impl_->ict.setInitialShift(policy.drop_tol * 1e-3 + 1e-12);
    impl_->ict.compute(to_eigen(a));
    if (impl_->ict.info() != Eigen::Success)
      throw std::runtime_error("ic: threshold factorization failed");
    return;
  }
  double mean_diag = 0.0;
  for (Index i = 0; i < a.rows(); ++i) mean_diag += std::abs(a.coeff(i, i));
  mean_diag /= static_cast<double>(a.rows());
  double shift = 0.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (ic0_factor(a, shift, impl_->ic)) {
      impl_->shift = shift;
      return;
    }
    shift = shift == 0.0 ? 1e-3 * mean_diag : 2.0 * shift;
  }
  throw std::runtime_error("ic: breakdown persists after maximum shift retries");
}

IncompleteCholesky::~IncompleteCholesky() = default;

Index IncompleteCholesky::dim() const { return impl_->n; }
double IncompleteCholesky::shift_used() const { return impl_->shift; }

void IncompleteCholesky::apply(std::span<const double> r, std::span<double> z) const {
  if (impl_->kind == FillPolicy::Kind::threshold) {
    Eigen::Map<const Eigen::VectorXd> rm(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::VectorXd zv = impl_->ict.solve(rm);
    std::copy(zv.data(), zv.data() + zv.size(), z.begin());
    return;
  }
  std::vector<double> y(r.size());
  impl_->ic.forward(r, y);
  impl_->ic.backward(y, z);
}

struct IncompleteLU::Impl {
  // ILU(0) factors packed in one CSR matrix (strict L below, U on/above).
  std::vector<Index> row_ptr, col_idx, diag_pos;
  std::vector<double> values;
  Eigen::IncompleteLUT<double> ilut;
  FillPolicy::Kind kind = FillPolicy::Kind::pattern0;
  Index n = 0;
};

IncompleteLU::IncompleteLU(const SparseMatrixCSR& a, FillPolicy policy)
    : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("ilu: matrix must be square");
  impl_->n = a.rows();
  impl_->kind = policy.kind;
  if (policy.kind == FillPolicy::Kind::threshold) {
    impl_->ilut.setDroptol(policy.drop_tol);
    impl_->ilut.compute(to_eigen(a));
    if (impl_->ilut.info() != Eigen::Success)
      throw std::runtime_error("ilu: threshold factorization failed");
    return;
  }
  const Index n = a.rows();
  impl_->row_ptr = a.row_offsets();
  impl_->col_idx = a.col_indices();
  impl_->values = a.values();
  impl_->diag_pos.assign(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i)
    for (Index k = impl_->row_ptr[static_cast<std::size_t>(i)];
         k < impl_->row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      if (impl_->col_idx[static_cast<std::size_t>(k)] == i) impl_->diag_pos[static_cast<std::size_t>(i)] = k;
  for (Index i = 0; i < n; ++i)
    if (impl_->diag_pos[static_cast<std::size_t>(i)] < 0)
      throw std::runtime_error("ilu: zero diagonal entry in the pattern");

  // Standard ikj ILU(0).
  for (Index i = 1; i < n; ++i) {
    for (Index k = impl_->row_ptr[static_cast<std::size_t>(i)];
         k < impl_->row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const Index kc = impl_->col_idx[static_cast<std::size_t>(k)];
      if (kc >= i) break;
      const double dkk = impl_->values[static_cast<std::size_t>(impl_->diag_pos[static_cast<std::size_t>(kc)])];
      if (dkk == 0.0) throw std::runtime_error("ilu: zero pivot");
      const double lik = impl_->values[static_cast<std::size_t>(k)] / dkk;
      impl_->values[static_cast<std::size_t>(k)] = lik;
      // subtract lik * row kc (columns > kc) on the fixed pattern
      Index pk = impl_->diag_pos[static_cast<std::size_t>(kc)] + 1;
      Index pi = k + 1;
      const Index ek = impl_->row_ptr[static_cast<std::size_t>(kc) + 1];
      const Index ei = impl_->row_ptr[static_cast<std::size_t>(i) + 1];
      while (pk < ek && pi < ei) {
        const Index ck = impl_->col_idx[static_cast<std::size_t>(pk)];
        const Index cii = impl_->col_idx[static_cast<std::size_t>(pi)];
        if (ck == cii) {
          impl_->values[static_cast<std::size_t>(pi)] -= lik * impl_->values[static_cast<std::size_t>(pk)];
          ++pk;
          ++pi;
        } else if (ck < cii) {
          ++pk;
        } else {
          ++pi;
        }
      }
    }
  }
}

IncompleteLU::~IncompleteLU() = default;

Index IncompleteLU::dim() const { return impl_->n; }

void IncompleteLU::apply(std::span<const double> r, std::span<double> z) const {
  if (impl_->kind == FillPolicy::Kind::threshold) {
    Eigen::Map<const Eigen::VectorXd> rm(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::VectorXd zv = impl_->ilut.solve(rm);
    std::copy(zv.data(), zv.data() + zv.size(), z.begin());
    return;
  }
  const Index n = impl_->n;
  // L y = r (unit diagonal)
  std::vector<double> y(r.begin(), r.end());
  for (Index i = 0; i < n; ++i) {
    double s = y[static_cast<std::size_t>(i)];
    for (Index k = impl_->row_ptr[static_cast<std::size_t>(i)];
         k < impl_->diag_pos[static_cast<std::size_t>(i)]; ++k)
      s -= impl_->values[static_cast<std::size_t>(k)] *
           y[static_cast<std::size_t>(impl_->col_idx[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(i)] = s;
  }
  // U z = y
  for (Index i = n - 1; i >= 0; --i) {
    double s = y[static_cast<std::size_t>(i)];
    for (Index k = impl_->diag_pos[static_cast<std::size_t>(i)] + 1;
         k < impl_->row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      s -= impl_->values[static_cast<std::size_t>(k)] *
           z[static_cast<std::size_t>(impl_->col_idx[static_cast<std::size_t>(k)])];
    z[static_cast<std::size_t>(i)] = s / impl_->values[static_cast<std::size_t>(impl_->diag_pos[static_cast<std::size_t>(i)])];
  }
}

}  // namespace saddleglt
