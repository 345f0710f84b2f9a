#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "saddleglt/fem.hpp"
#include "saddleglt/krylov.hpp"
#include "saddleglt/sparse.hpp"

namespace saddleglt {

enum class ConstraintKind { poisson, advection };

/// The scaled 3x3-block saddle system
///   A = [ h^4 M   O    Z^T ]
///       [   O    aM   -M  ]        M = (1/h^2) Mbar,  Z = K (+ h V + r h^2 M)
///       [   Z    -M    O  ]
/// obtained from the assembled optimality system by the symmetric diagonal
/// scaling D1 * Abar * D2 with D1 = diag(h^2 I, I, I), D2 = diag(I, I/h^2, I/h^2).
struct SaddleSystem {
  int n = 0;
  double h = 0.0;
  double alpha = 0.0;
  ConstraintKind kind = ConstraintKind::poisson;
  std::array<double, 2> c = {0.0, 0.0};  // advection velocity
  double r = 0.0;                        // reaction coefficient

  SparseMatrixCSR M;  // scaled mass block (order n^2)
  SparseMatrixCSR K;  // stiffness block
  SparseMatrixCSR V;  // scaled convection block (empty for Poisson)
  SparseMatrixCSR Z;  // constraint block of the scaled system (K for Poisson)
  SparseMatrixCSR A;  // scaled saddle matrix, order 3 n^2
  std::vector<double> b;           // scaled right-hand side D1 * bbar
  std::vector<double> b_unscaled;  // bbar

  Index size() const { return 3 * static_cast<Index>(n) * n; }
  Index block_order() const { return static_cast<Index>(n) * n; }

  std::vector<double> d1() const;  // diagonal of D1
  std::vector<double> d2() const;  // diagonal of D2

  SparseMatrixCSR mass_unscaled() const;      // Mbar = h^2 M
  SparseMatrixCSR unscaled_matrix() const;    // Abar
};

/// Assembles the scaled system for the given constraint.  y_d is the
/// desired state (enters the rhs through Mbar * interpolate(y_d)), z the
/// forcing term (enters through its load vector).
SaddleSystem build_system(int n, double alpha, ConstraintKind kind, const ScalarField& y_d,
                          const ScalarField& z, std::array<double, 2> c = {0.0, 0.0},
                          double r = 0.0);

/// x_bar = D2 * y, so that Abar x_bar = bbar whenever A y = b.
std::vector<double> unscale_solution(const SaddleSystem& sys, std::span<const double> y);

/// Permutation interleaving the three unknowns per node: perm[3k+l] maps to
/// the original index l*n^2 + k.
std::vector<Index> interleave_permutation(int n);

/// B_N = Pi A Pi^T with the interleaving permutation (Poisson only; the
/// permuted matrix is the block Toeplitz matrix up to the h^4-mass term).
SparseMatrixCSR permute_to_block_toeplitz(const SaddleSystem& sys);

enum class PrecVariant { identity, pn, pbct, pd, ptilde };

enum class InnerMode { direct, iterative };

struct InnerOptions {
  InnerMode mode = InnerMode::direct;
  double tol = 1e-8;  // iterative mode
  int maxit = 0;      // 0 = problem size
};

/// Thrown when an inner solve of a preconditioner application diverges;
/// stage is the 1-based back-substitution step that failed.
class InnerSolveError : public std::runtime_error {
 public:
  InnerSolveError(const std::string& what, int stage)
      : std::runtime_error(what), stage(stage) {}
  int stage;
};

/// Back-substitution preconditioner.  apply() maps a residual to
/// P^{-1} r via three inner solves with K/K^T (or Z/Z^T) and M:
///
///   pn    : [ O  aZ^T  O ]   pbct : [ O   O   Z^T ]
///           [ O   aM  -M ]          [ O   aM  -M  ]
///           [ Z   -M   O ]          [ Z   -M   O  ]
///
/// pd drops the (2,2) block of the *unscaled* system and therefore acts on
/// Abar; ptilde is the lower anti-triangular part of the scaled system
/// rearranged so the control block comes first.
class PreconditionerOp final : public Preconditioner {
 public:
  ~PreconditionerOp() override;
  PreconditionerOp(PreconditionerOp&&) noexcept;

  Index dim() const override;
  void apply(std::span<const double> r, std::span<double> z) const override;

  PrecVariant variant() const;
  /// True for pd: the operator preconditions the unscaled system Abar.
  bool on_unscaled_system() const;
  /// True for ptilde: the operator preconditions the rearranged system.
  bool on_swapped_system() const;

  /// Explicit sparse assembly of the defining block matrix.
  SparseMatrixCSR assemble() const;
  /// y = P x (multiplication by the defining matrix, for verification).
  std::vector<double> multiply(std::span<const double> x) const;

  struct Impl;

 private:
  friend PreconditionerOp make_preconditioner(const SaddleSystem&, PrecVariant, InnerOptions);
  explicit PreconditionerOp(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

PreconditionerOp make_preconditioner(const SaddleSystem& sys, PrecVariant variant,
                                     InnerOptions inner = {});

/// System matrix with the first two block unknowns swapped (the ordering
/// ptilde is defined on), and the same swap for vectors.
SparseMatrixCSR swap_first_two_blocks(const SparseMatrixCSR& a, Index block_order);
std::vector<double> swap_first_two_blocks(std::span<const double> v, Index block_order);

}  // namespace saddleglt
