#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "saddleglt/saddle.hpp"
#include "saddleglt/sparse.hpp"
#include "saddleglt/symbol.hpp"

namespace saddleglt {

/// Ascending eigenvalues of a symmetric 3x3 matrix via one Givens
/// tridiagonalization followed by implicit-shift QL.  Rejects matrices with
/// ||A - A^T||_max > 1e-12.
std::array<double, 3> eig3_symmetric(const Eigen::Matrix3d& a);

/// Samples of the ordered eigenvalue functions of a matrix-valued symbol on
/// the equispaced grid theta(j,k) = (j pi/g, k pi/g), j,k = 0..g-1.
/// samples[l*g*g + j*g + k] = lambda_l of the symbol at theta(j,k).
struct SymbolSampling {
  int grid = 0;
  int block_size = 0;
  double alpha = 0.0;
  std::vector<double> samples;

  std::span<const double> level(int l) const;
  std::vector<double> sorted_level(int l) const;
  /// All levels concatenated (level-major, grid order within a level).
  std::span<const double> concatenated() const { return samples; }

  static double theta(int index, int g) { return index * M_PI / g; }
};

/// Samples the predefined saddle symbol f(alpha).
SymbolSampling sample_symbol(double alpha, int g);
/// Samples an arbitrary real-symmetric symbol with d = 2.
SymbolSampling sample_symbol(const MatrixSymbol& sym, int g);

/// Elementwise min/max of each sorted sample vector: {m_l, M_l}.
std::array<std::pair<double, double>, 3> interval_bounds(double alpha, int g);
std::vector<std::pair<double, double>> interval_bounds(const SymbolSampling& sampling);

enum class IntervalClosedness {
  open_closed,    // (a, b]
  closed_open,    // [a, b)
  open_open,      // (a, b)
  closed_closed,  // [a, b]
};

/// nu(A - shift I): the number of eigenvalues below `shift`, computed by
/// orthogonal reduction of the band to tridiagonal form followed by a
/// Sturm pivot count (Sylvester inertia).  Near-zero pivots are replaced
/// by a tiny negative value, which matches perturbing the shift by
/// O(1e-12 ||A||).
long negative_eigenvalue_count(const SparseMatrixCSR& a, double shift);

/// Batched variant: the band reduction does not depend on the shift, so one
/// reduction serves every requested count.
std::vector<long> negative_eigenvalue_counts(const SparseMatrixCSR& a,
                                             std::span<const double> shifts);

/// #{lambda in the interval} via differences of inertia counts.  Endpoint
/// inclusion moves the shift by 1e-12 * ||A||_inf past the endpoint.
long count_eigs_in_interval(const SparseMatrixCSR& a, double lo, double hi,
                            IntervalClosedness closedness = IntervalClosedness::open_closed);

/// All eigenvalues of a symmetric matrix, ascending (dense; throws above
/// dense_limit).
std::vector<double> full_spectrum(const SparseMatrixCSR& a, Index dense_limit = 6000);

/// A sample value tagged with its grid point.
struct GridSample {
  double value = 0.0;
  int j = 0;
  int k = 0;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

struct MatchedPair {
  double eigenvalue = 0.0;
  GridSample sample;
  double abs_error = 0.0;
};

/// For each eigenvalue, the nearest sample value; ties resolved by the
/// lexicographically smallest grid index (j, k).
std::vector<MatchedPair> match_eigenvalues(std::span<const double> eigenvalues,
                                           std::span<const GridSample> samples);

/// Grid samples of level l of a sampling, in grid order.
std::vector<GridSample> level_samples(const SymbolSampling& sampling, int l);

/// Interval bounds, per-interval eigenvalue counts and outlier statistics
/// for one matrix (counts use the convention (m1,M1], (m2,M2], [m3,M3)).
struct SpectralReport {
  std::array<std::pair<double, double>, 3> bounds{};
  std::array<long, 3> counts{};
  long expected = 0;       // n^2
  long outliers = 0;       // expected - count in (m2, M2]
  double outlier_ratio = 0.0;  // outliers / (3 n^2)
};

SpectralReport spectral_report(const SparseMatrixCSR& b_n, int n,
                               const std::array<std::pair<double, double>, 3>& bounds);

/// Classical two-interval localization for a symmetric saddle matrix
/// [[A, B^T], [B, O]] from the extreme eigenvalues of the leading block and
/// the extreme singular values of the coupling (informational; the symbol
/// intervals are the sharp ones).
struct SaddleIntervals {
  std::pair<double, double> negative;  // I^-
  std::pair<double, double> positive;  // I^+
};
SaddleIntervals saddle_point_intervals(const SaddleSystem& sys, Index dense_limit = 6000);

/// Dense spectrum of the preconditioned matrix P^{-1} A together with the
/// generalized-eigenvalue prediction for the non-unit part.
struct PrecSpectrumReport {
  long unit_count = 0;               // |lambda - 1| <= unit_tol
  double unit_tol = 1e-8;
  std::vector<double> nonunit;       // real parts, ascending
  std::vector<double> oracle;        // predicted values, ascending
  double max_abs_imag = 0.0;
  double max_match_error = 0.0;      // max |nonunit_i - oracle_i|
};

PrecSpectrumReport preconditioned_spectrum_check(const SaddleSystem& sys, PrecVariant variant,
                                                 Index dense_limit = 6000);

// CSV emitters (fixed headers).
void write_sampling_csv(std::ostream& os, const SymbolSampling& sampling,
                        bool include_header = true);
void write_spectrum_csv(std::ostream& os, std::span<const double> eigenvalues,
                        const std::array<std::pair<double, double>, 3>& bounds);
void write_match_csv(std::ostream& os, int block,
                     std::span<const MatchedPair> pairs, bool include_header = true);

}  // namespace saddleglt
