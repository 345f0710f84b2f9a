#pragma once

#include <array>
#include <functional>
#include <vector>

#include "saddleglt/sparse.hpp"

namespace saddleglt {

/// Scalar function on the unit square, assumed pure and total on [0,1]^2.
using ScalarField = std::function<double(double, double)>;

/// Uniform triangulation of the unit square with n interior nodes per
/// direction.  Each square cell is split along its (+1,+1) diagonal and
/// interior nodes are ordered lexicographically with x running fastest,
/// so node (ix, iy) gets index ix + n*iy.  All boundary values are
/// eliminated (homogeneous Dirichlet on the whole boundary).
class UniformMesh {
 public:
  explicit UniformMesh(int n);

  int n() const { return n_; }
  double h() const { return 1.0 / (n_ + 1); }
  Index num_dofs() const { return static_cast<Index>(n_) * n_; }

  /// Coordinates of interior node i (lexicographic, x fastest).
  std::array<double, 2> node(Index i) const;

 private:
  int n_;
};

/// Mass matrix of P1 elements, entries h^2 * (1/2 diagonal, 1/12 for the
/// six edge neighbours including the (+1,+1) diagonal one).
SparseMatrixCSR assemble_mass(const UniformMesh& mesh);

/// Stiffness matrix: the five-point stencil (4 diagonal, -1 for N/S/E/W).
SparseMatrixCSR assemble_stiffness(const UniformMesh& mesh);

/// Convection matrix with row index on the gradient factor:
/// entry (i,j) = sum over triangles of (c . grad phi_i) * integral(phi_j).
SparseMatrixCSR assemble_convection(const UniformMesh& mesh, std::array<double, 2> c);

/// Load vector with component i ~ integral of g * phi_i, computed with the
/// three-point edge-midpoint Gauss rule per triangle (exact for quadratics).
std::vector<double> assemble_load(const UniformMesh& mesh, const ScalarField& g);

/// Values of g at the interior nodes in lexicographic order.
std::vector<double> interpolate(const UniformMesh& mesh, const ScalarField& g);

}  // namespace saddleglt
