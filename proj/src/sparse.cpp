#include "saddleglt/sparse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace saddleglt {

SparseMatrixCSR::SparseMatrixCSR(Index rows, Index cols)
    : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
}

SparseMatrixCSR SparseMatrixCSR::from_triplets(Index rows, Index cols,
                                               std::span<const Triplet> entries) {
  SparseMatrixCSR m(rows, cols);
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Triplet& ta = entries[a];
    const Triplet& tb = entries[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });

  std::vector<Index> counts(static_cast<std::size_t>(rows), 0);
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  std::size_t k = 0;
  while (k < order.size()) {
    const Triplet& t = entries[order[k]];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::out_of_range("triplet index outside matrix");
    double v = t.value;
    while (k + 1 < order.size() && entries[order[k + 1]].row == t.row &&
           entries[order[k + 1]].col == t.col) {
      ++k;
      v += entries[order[k]].value;
    }
    ++k;
    if (v == 0.0) continue;
    m.col_idx_.push_back(t.col);
    m.values_.push_back(v);
    ++counts[static_cast<std::size_t>(t.row)];
  }
  for (Index r = 0; r < rows; ++r)
    m.row_ptr_[static_cast<std::size_t>(r) + 1] =
        m.row_ptr_[static_cast<std::size_t>(r)] + counts[static_cast<std::size_t>(r)];
  return m;
}

SparseMatrixCSR SparseMatrixCSR::identity(Index n) {
  SparseMatrixCSR m(n, n);
  m.col_idx_.resize(static_cast<std::size_t>(n));
  m.values_.assign(static_cast<std::size_t>(n), 1.0);
  for (Index i = 0; i < n; ++i) {
    m.col_idx_[static_cast<std::size_t>(i)] = i;
    m.row_ptr_[static_cast<std::size_t>(i) + 1] = i + 1;
  }
  return m;
}

double SparseMatrixCSR::coeff(Index i, Index j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw std::out_of_range("coeff index outside matrix");
  auto b = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i)];
  auto e = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
  auto it = std::lower_bound(b, e, j);
  if (it != e && *it == j) return values_[static_cast<std::size_t>(it - col_idx_.begin())];
  return 0.0;
}

void SparseMatrixCSR::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != cols_ || static_cast<Index>(y.size()) != rows_)
    throw std::invalid_argument("multiply: size mismatch");
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> SparseMatrixCSR::operator*(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_));
  multiply(x, y);
  return y;
}

void SparseMatrixCSR::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != rows_ || static_cast<Index>(y.size()) != cols_)
    throw std::invalid_argument("multiply_transpose: size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (Index i = 0; i < rows_; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    for (Index k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      y[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])] +=
          values_[static_cast<std::size_t>(k)] * xi;
  }
}

SparseMatrixCSR SparseMatrixCSR::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      t.push_back({col_idx_[static_cast<std::size_t>(k)], i, values_[static_cast<std::size_t>(k)]});
  return from_triplets(cols_, rows_, t);
}

double SparseMatrixCSR::max_abs_diff(const SparseMatrixCSR& a, const SparseMatrixCSR& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double d = 0.0;
  for (Index i = 0; i < a.rows_; ++i) {
    Index ka = a.row_ptr_[static_cast<std::size_t>(i)];
    Index kb = b.row_ptr_[static_cast<std::size_t>(i)];
    const Index ea = a.row_ptr_[static_cast<std::size_t>(i) + 1];
    const Index eb = b.row_ptr_[static_cast<std::size_t>(i) + 1];
    while (ka < ea || kb < eb) {
      Index ca = ka < ea ? a.col_idx_[static_cast<std::size_t>(ka)] : a.cols_;
      Index cb = kb < eb ? b.col_idx_[static_cast<std::size_t>(kb)] : b.cols_;
      double va = 0.0, vb = 0.0;
      if (ca <= cb) va = a.values_[static_cast<std::size_t>(ka++)];
      if (cb <= ca) vb = b.values_[static_cast<std::size_t>(kb++)];
      d = std::max(d, std::abs(va - vb));
    }
  }
  return d;
}

double SparseMatrixCSR::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrixCSR::norm_inf() const {
  double m = 0.0;
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      s += std::abs(values_[static_cast<std::size_t>(k)]);
    m = std::max(m, s);
  }
  return m;
}

bool SparseMatrixCSR::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  return max_abs_diff(*this, transpose()) <= tol;
}

Index SparseMatrixCSR::bandwidth() const {
  Index b = 0;
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      b = std::max(b, std::abs(i - col_idx_[static_cast<std::size_t>(k)]));
  return b;
}

SparseMatrixCSR SparseMatrixCSR::permuted(std::span<const Index> perm) const {
  if (rows_ != cols_ || static_cast<Index>(perm.size()) != rows_)
    throw std::invalid_argument("permuted: needs a square matrix and a full permutation");
  std::vector<Index> inv(perm.size());
  for (Index i = 0; i < rows_; ++i) inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      t.push_back({inv[static_cast<std::size_t>(i)],
                   inv[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])],
                   values_[static_cast<std::size_t>(k)]});
  return from_triplets(rows_, cols_, t);
}

SparseMatrixCSR SparseMatrixCSR::scaled_rows(std::span<const double> d) const {
  if (static_cast<Index>(d.size()) != rows_) throw std::invalid_argument("scaled_rows: size mismatch");
  SparseMatrixCSR m = *this;
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      m.values_[static_cast<std::size_t>(k)] *= d[static_cast<std::size_t>(i)];
  return m;
}

SparseMatrixCSR SparseMatrixCSR::scaled_cols(std::span<const double> d) const {
  if (static_cast<Index>(d.size()) != cols_) throw std::invalid_argument("scaled_cols: size mismatch");
  SparseMatrixCSR m = *this;
  for (std::size_t k = 0; k < m.values_.size(); ++k)
    m.values_[k] *= d[static_cast<std::size_t>(m.col_idx_[k])];
  return m;
}

SparseMatrixCSR operator*(double a, const SparseMatrixCSR& m) {
  SparseMatrixCSR r = m;
  for (double& v : r.values_) v *= a;
  return r;
}

static SparseMatrixCSR add_scaled(const SparseMatrixCSR& a, double sb, const SparseMatrixCSR& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix sum: dimension mismatch");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
  const auto push = [&t](const SparseMatrixCSR& m, double s) {
    const auto& rp = m.row_offsets();
    const auto& ci = m.col_indices();
    const auto& v = m.values();
    for (Index i = 0; i < m.rows(); ++i)
      for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k)
        t.push_back({i, ci[static_cast<std::size_t>(k)], s * v[static_cast<std::size_t>(k)]});
  };
  push(a, 1.0);
  push(b, sb);
  return SparseMatrixCSR::from_triplets(a.rows(), a.cols(), t);
}

SparseMatrixCSR operator+(const SparseMatrixCSR& a, const SparseMatrixCSR& b) {
  return add_scaled(a, 1.0, b);
}

SparseMatrixCSR operator-(const SparseMatrixCSR& a, const SparseMatrixCSR& b) {
  return add_scaled(a, -1.0, b);
}

SparseMatrixCSR block_matrix_3x3(
    const std::array<std::array<const SparseMatrixCSR*, 3>, 3>& blocks) {
  Index order = -1;
  for (const auto& row : blocks)
    for (const SparseMatrixCSR* blk : row)
      if (blk) {
        if (blk->rows() != blk->cols()) throw std::invalid_argument("blocks must be square");
        if (order < 0) order = blk->rows();
        if (blk->rows() != order) throw std::invalid_argument("blocks must share one order");
      }
  if (order < 0) throw std::invalid_argument("all blocks are null");
  std::vector<Triplet> t;
  for (int br = 0; br < 3; ++br)
    for (int bc = 0; bc < 3; ++bc) {
      const SparseMatrixCSR* blk = blocks[static_cast<std::size_t>(br)][static_cast<std::size_t>(bc)];
      if (!blk) continue;
      const auto& rp = blk->row_offsets();
      const auto& ci = blk->col_indices();
      const auto& v = blk->values();
      for (Index i = 0; i < order; ++i)
        for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k)
          t.push_back({br * order + i, bc * order + ci[static_cast<std::size_t>(k)],
                       v[static_cast<std::size_t>(k)]});
    }
  return SparseMatrixCSR::from_triplets(3 * order, 3 * order, t);
}

void write_matrix_market(std::ostream& os, const SparseMatrixCSR& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
  os.precision(17);
  const auto& rp = a.row_offsets();
  const auto& ci = a.col_indices();
  const auto& v = a.values();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k)
      os << i + 1 << " " << ci[static_cast<std::size_t>(k)] + 1 << " "
         << v[static_cast<std::size_t>(k)] << "\n";
}

void write_matrix_market(const std::string& path, const SparseMatrixCSR& a) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_matrix_market(os, a);
}

void write_vector_market(std::ostream& os, std::span<const double> v) {
  os << "%%MatrixMarket matrix array real general\n";
  os << v.size() << " 1\n";
  os.precision(17);
  for (double x : v) os << x << "\n";
}

void write_vector_market(const std::string& path, std::span<const double> v) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_vector_market(os, v);
}

SparseMatrixCSR read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("not a MatrixMarket stream");
  if (line.find("coordinate") == std::string::npos || line.find("real") == std::string::npos)
    throw std::runtime_error("only real coordinate matrices are supported");
  const bool symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(is, line) && (line.empty() || line[0] == '%')) {
  }
  std::istringstream hdr(line);
  Index rows = 0, cols = 0, nnz = 0;
  hdr >> rows >> cols >> nnz;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz));
  for (Index k = 0; k < nnz; ++k) {
    Index i = 0, j = 0;
    double v = 0.0;
    is >> i >> j >> v;
    t.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) t.push_back({j - 1, i - 1, v});
  }
  return SparseMatrixCSR::from_triplets(rows, cols, t);
}

SparseMatrixCSR read_matrix_market_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_matrix_market(is);
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace saddleglt
