#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "saddleglt/sparse.hpp"

namespace saddleglt {

/// Square linear map given by a matrix or an arbitrary apply callback.
class LinearOperator {
 public:
  using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

  LinearOperator(Index dim, ApplyFn apply) : dim_(dim), apply_(std::move(apply)) {}

  /// Keeps a copy of the matrix alive inside the operator.
  static LinearOperator from_matrix(const SparseMatrixCSR& a);

  Index dim() const { return dim_; }
  void apply(std::span<const double> x, std::span<double> y) const { apply_(x, y); }
  std::vector<double> operator()(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(dim_));
    apply_(x, y);
    return y;
  }

 private:
  Index dim_;
  ApplyFn apply_;
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual Index dim() const = 0;
  /// z = P^{-1} r
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  explicit IdentityPreconditioner(Index n) : n_(n) {}
  Index dim() const override { return n_; }
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  Index n_;
};

struct KrylovResult {
  std::vector<double> x;
  int iterations = 0;
  std::vector<double> residual_history;  // relative residuals, starting at 1
  bool converged = false;
};

/// Thrown on solver breakdown (NaN/Inf in the recurrence, zero rho, ...).
class SolverBreakdown : public std::runtime_error {
 public:
  SolverBreakdown(const std::string& what, int iteration)
      : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

/// Unrestarted right-preconditioned GMRES with modified Gram-Schmidt (one
/// reorthogonalization pass).  Stops when the true relative residual
/// ||b - A x|| / ||b|| falls below tol; converged=false at maxit.
KrylovResult gmres(const LinearOperator& a, const Preconditioner* p,
                   std::span<const double> b, double tol = 1e-6, int maxit = 100);

/// Flexible GMRES: stores the preconditioned basis so the preconditioner
/// may change between iterations (inexact inner solves).
KrylovResult fgmres(const LinearOperator& a, const Preconditioner* p,
                    std::span<const double> b, double tol = 1e-6, int maxit = 100);

/// Preconditioned conjugate gradient for SPD operators (and SPD
/// preconditioners).  Throws SolverBreakdown when a nonpositive curvature
/// p^T A p reveals a non-SPD operator.
KrylovResult cg(const LinearOperator& a, const Preconditioner* p,
                std::span<const double> b, double tol = 1e-8, int maxit = 0);

/// Right-preconditioned BiCGstab; rho/omega breakdowns are reported.
KrylovResult bicgstab(const LinearOperator& a, const Preconditioner* p,
                      std::span<const double> b, double tol = 1e-8, int maxit = 0);

/// Sparse Cholesky factorization handle for SPD matrices.
class SparseCholesky {
 public:
  explicit SparseCholesky(const SparseMatrixCSR& a);
  ~SparseCholesky();
  SparseCholesky(SparseCholesky&&) noexcept;
  SparseCholesky& operator=(SparseCholesky&&) noexcept;

  Index dim() const;
  void solve(std::span<const double> b, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Sparse LU factorization handle for general square nonsingular matrices.
class SparseLU {
 public:
  explicit SparseLU(const SparseMatrixCSR& a);
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;

  Index dim() const;
  void solve(std::span<const double> b, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct FillPolicy {
  enum class Kind { pattern0, threshold };
  Kind kind = Kind::pattern0;
  double drop_tol = 1e-2;  // threshold variants only
};

/// Incomplete Cholesky preconditioner.  The pattern0 variant is IC(0) on
/// the lower triangle of A; when a pivot goes nonpositive the diagonal is
/// shifted (starting at 1e-3 times the mean diagonal, doubling on retry).
class IncompleteCholesky final : public Preconditioner {
 public:
  IncompleteCholesky(const SparseMatrixCSR& a, FillPolicy policy = {});
  ~IncompleteCholesky();

  Index dim() const override;
  void apply(std::span<const double> r, std::span<double> z) const override;
  double shift_used() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Incomplete LU preconditioner (ILU(0) or threshold ILUT).
class IncompleteLU final : public Preconditioner {
 public:
  IncompleteLU(const SparseMatrixCSR& a, FillPolicy policy = {});
  ~IncompleteLU();

  Index dim() const override;
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace saddleglt
