#pragma once

// Thin wrappers around the handful of LAPACK routines used for dense and
// banded eigenvalue work.  Matrices are passed column-major.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace saddleglt::lapack {

/// Eigenvalues of a dense symmetric matrix, ascending (dsyevd, values only).
std::vector<double> symmetric_eigenvalues(Eigen::MatrixXd a);

/// Generalized symmetric-definite problem A x = lambda B x with B SPD
/// (dsygv itype 1); eigenvalues ascending.
std::vector<double> generalized_sym_eigenvalues(Eigen::MatrixXd a, Eigen::MatrixXd b);

/// Eigenvalues of a dense general matrix (dgeev, values only).
std::vector<std::complex<double>> general_eigenvalues(Eigen::MatrixXd a);

/// Reduces a symmetric band matrix (lower storage, ldab = kd+1) to
/// tridiagonal form via orthogonal similarity (dsbtrd, vect='N').
/// ab is overwritten; d and e receive the tridiagonal.
void band_to_tridiagonal(int n, int kd, std::vector<double>& ab,
                         std::vector<double>& d, std::vector<double>& e);

}  // namespace saddleglt::lapack
