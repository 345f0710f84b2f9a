#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace saddleglt {

using Index = std::int64_t;

/// One (row, col, value) entry used while assembling a sparse matrix.
struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Real sparse matrix in compressed-sparse-row layout.
///
/// Column indices are sorted within each row and duplicates have been
/// summed; exact zeros produced during assembly are dropped.
class SparseMatrixCSR {
 public:
  SparseMatrixCSR() = default;
  SparseMatrixCSR(Index rows, Index cols);  // empty (all-zero) matrix

  static SparseMatrixCSR from_triplets(Index rows, Index cols,
                                       std::span<const Triplet> entries);
  static SparseMatrixCSR identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_offsets() const { return row_ptr_; }
  const std::vector<Index>& col_indices() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// Entry lookup by binary search; zero if not stored.
  double coeff(Index i, Index j) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  SparseMatrixCSR transpose() const;

  /// max_ij |A_ij - B_ij| over the union of sparsity patterns.
  static double max_abs_diff(const SparseMatrixCSR& a, const SparseMatrixCSR& b);

  double max_abs() const;
  double norm_inf() const;  // max absolute row sum
  bool is_symmetric(double tol = 0.0) const;

  /// Largest |i - j| over stored entries (0 for diagonal/empty matrices).
  Index bandwidth() const;

  /// Rows and columns permuted by the same permutation:
  /// result(i, j) = A(perm[i], perm[j]).
  SparseMatrixCSR permuted(std::span<const Index> perm) const;

  /// Row scaling by d (result = diag(d) * A).
  SparseMatrixCSR scaled_rows(std::span<const double> d) const;
  /// Column scaling by d (result = A * diag(d)).
  SparseMatrixCSR scaled_cols(std::span<const double> d) const;

  friend SparseMatrixCSR operator*(double a, const SparseMatrixCSR& m);
  friend SparseMatrixCSR operator+(const SparseMatrixCSR& a, const SparseMatrixCSR& b);
  friend SparseMatrixCSR operator-(const SparseMatrixCSR& a, const SparseMatrixCSR& b);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_ = {0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Assemble a 3x3 block matrix; blocks[r][c] may be nullptr for a zero block.
/// All non-null blocks must share the common square block order.
SparseMatrixCSR block_matrix_3x3(
    const std::array<std::array<const SparseMatrixCSR*, 3>, 3>& blocks);

/// MatrixMarket coordinate-format export (1-based indices, "general" field).
void write_matrix_market(std::ostream& os, const SparseMatrixCSR& a);
void write_matrix_market(const std::string& path, const SparseMatrixCSR& a);
/// One-column MatrixMarket array export.
void write_vector_market(std::ostream& os, std::span<const double> v);
void write_vector_market(const std::string& path, std::span<const double> v);

SparseMatrixCSR read_matrix_market(std::istream& is);
SparseMatrixCSR read_matrix_market_file(const std::string& path);

// Small dense-vector helpers shared across the library.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a x

}  // namespace saddleglt
