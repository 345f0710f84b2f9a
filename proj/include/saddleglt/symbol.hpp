#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "saddleglt/sparse.hpp"

namespace saddleglt {

/// d-variate s x s matrix-valued trigonometric polynomial stored by its
/// Fourier coefficients.  Unstored coefficients are zero.
///
/// When the real_symmetric flag is set, every stored coefficient j must
/// satisfy fhat(-j) = fhat(j)^T (verified at construction); evaluations of
/// such a symbol are real symmetric matrices.
class MatrixSymbol {
 public:
  using MultiIndex = std::vector<int>;

  MatrixSymbol(int d, int s, bool real_symmetric = false);

  int num_variables() const { return d_; }
  int block_size() const { return s_; }
  bool real_symmetric() const { return real_symmetric_; }

  /// Adds to the coefficient at j (accumulates if already present).
  void add_coefficient(const MultiIndex& j, const Eigen::MatrixXd& block);
  const std::map<MultiIndex, Eigen::MatrixXd>& coefficients() const { return coeffs_; }

  /// Called automatically by predefined constructors; throws if the
  /// real-symmetric pairing fails.
  void validate() const;

  MatrixSymbol scaled(double a) const;
  friend MatrixSymbol operator+(const MatrixSymbol& x, const MatrixSymbol& y);

  std::string to_json() const;
  static MatrixSymbol from_json(const std::string& text);

 private:
  int d_;
  int s_;
  bool real_symmetric_;
  std::map<MultiIndex, Eigen::MatrixXd> coeffs_;
};

/// Evaluates sum_j fhat_j * exp(i <j, theta>).  For real-symmetric symbols
/// the imaginary parts cancel; the residual is asserted below 1e-13 (times
/// the coefficient scale) and discarded.  Throws std::runtime_error when
/// the cancellation fails.
Eigen::MatrixXd symbol_eval(const MatrixSymbol& sym, std::span<const double> theta);

/// Multilevel block Toeplitz matrix of level orders n: entry at block
/// position (i, j) (multi-indices) is fhat_{i-j}.  Level 1 varies slowest.
/// Throws std::invalid_argument if a stored coefficient has |j_t| >= n_t
/// (it could never appear in the matrix).
SparseMatrixCSR toeplitz_build(const MatrixSymbol& sym, std::span<const int> n);

/// The generating functions of this problem family: the scaled mass symbol
/// m, the stiffness symbol kappa, and the 3x3 saddle symbol f(alpha).
struct PredefinedSymbols {
  MatrixSymbol m;
  MatrixSymbol kappa;
  MatrixSymbol f;
};
PredefinedSymbols predefined_symbols(double alpha);

}  // namespace saddleglt
