#include "saddleglt/fem.hpp"

#include <stdexcept>

namespace saddleglt {

UniformMesh::UniformMesh(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("mesh requires n >= 1 interior nodes per direction");
}

std::array<double, 2> UniformMesh::node(Index i) const {
  if (i < 0 || i >= num_dofs()) throw std::out_of_range("node index");
  const Index ix = i % n_;
  const Index iy = i / n_;
  return {(static_cast<double>(ix) + 1) * h(), (static_cast<double>(iy) + 1) * h()};
}

namespace {

// Grid node (gx, gy) with gx, gy in 0..n+1; interior dofs are 1..n.
// Returns -1 for boundary nodes (eliminated).
Index dof_index(int n, int gx, int gy) {
  if (gx < 1 || gx > n || gy < 1 || gy > n) return -1;
  return static_cast<Index>(gx - 1) + static_cast<Index>(n) * (gy - 1);
}

struct Tri {
  // Grid coordinates of the three vertices and the constant P1 gradients,
  // already divided by h (so grad = g / h).
  std::array<std::array<int, 2>, 3> v;
  std::array<std::array<double, 2>, 3> g;
};

// The two triangles of cell (cx, cy): the cell is split along the
// (+1,+1) diagonal from (cx, cy) to (cx+1, cy+1).
std::array<Tri, 2> cell_triangles(int cx, int cy) {
  Tri lower{{{{cx, cy}, {cx + 1, cy}, {cx + 1, cy + 1}}},
            {{{-1.0, 0.0}, {1.0, -1.0}, {0.0, 1.0}}}};
  Tri upper{{{{cx, cy}, {cx + 1, cy + 1}, {cx, cy + 1}}},
            {{{0.0, -1.0}, {1.0, 0.0}, {-1.0, 1.0}}}};
  return {lower, upper};
}

template <typename Fn>
void for_each_triangle(int n, Fn&& fn) {
  for (int cy = 0; cy <= n; ++cy)
    for (int cx = 0; cx <= n; ++cx)
      for (const Tri& tri : cell_triangles(cx, cy)) fn(tri);
}

}  // namespace

SparseMatrixCSR assemble_mass(const UniformMesh& mesh) {
  const int n = mesh.n();
  const double h = mesh.h();
  const double area = h * h / 2.0;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_dofs()) * 9);
  for_each_triangle(n, [&](const Tri& tri) {
    for (int a = 0; a < 3; ++a) {
      const Index ia = dof_index(n, tri.v[a][0], tri.v[a][1]);
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const Index ib = dof_index(n, tri.v[b][0], tri.v[b][1]);
        if (ib < 0) continue;
        trips.push_back({ia, ib, (a == b ? 2.0 : 1.0) * area / 12.0});
      }
    }
  });
  return SparseMatrixCSR::from_triplets(mesh.num_dofs(), mesh.num_dofs(), trips);
}

SparseMatrixCSR assemble_stiffness(const UniformMesh& mesh) {
  const int n = mesh.n();
  const double h = mesh.h();
  const double area = h * h / 2.0;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_dofs()) * 9);
  for_each_triangle(n, [&](const Tri& tri) {
    for (int a = 0; a < 3; ++a) {
      const Index ia = dof_index(n, tri.v[a][0], tri.v[a][1]);
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const Index ib = dof_index(n, tri.v[b][0], tri.v[b][1]);
        if (ib < 0) continue;
        const double gg = (tri.g[a][0] * tri.g[b][0] + tri.g[a][1] * tri.g[b][1]) / (h * h);
        trips.push_back({ia, ib, gg * area});
      }
    }
  });
  return SparseMatrixCSR::from_triplets(mesh.num_dofs(), mesh.num_dofs(), trips);
}

SparseMatrixCSR assemble_convection(const UniformMesh& mesh, std::array<double, 2> c) {
  const int n = mesh.n();
  const double h = mesh.h();
  const double area = h * h / 2.0;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_dofs()) * 9);
  for_each_triangle(n, [&](const Tri& tri) {
    for (int a = 0; a < 3; ++a) {
      const Index ia = dof_index(n, tri.v[a][0], tri.v[a][1]);
      if (ia < 0) continue;
      const double cg = (c[0] * tri.g[a][0] + c[1] * tri.g[a][1]) / h;
      for (int b = 0; b < 3; ++b) {
        const Index ib = dof_index(n, tri.v[b][0], tri.v[b][1]);
        if (ib < 0) continue;
        // integral of phi_b over the triangle is area/3
        trips.push_back({ia, ib, cg * area / 3.0});
      }
    }
  });
  return SparseMatrixCSR::from_triplets(mesh.num_dofs(), mesh.num_dofs(), trips);
}

std::vector<double> assemble_load(const UniformMesh& mesh, const ScalarField& g) {
  const int n = mesh.n();
  const double h = mesh.h();
  const double area = h * h / 2.0;
  std::vector<double> b(static_cast<std::size_t>(mesh.num_dofs()), 0.0);
  for_each_triangle(n, [&](const Tri& tri) {
    std::array<std::array<double, 2>, 3> p;
    for (int a = 0; a < 3; ++a) p[a] = {tri.v[a][0] * h, tri.v[a][1] * h};
    // Edge midpoints opposite each pairing; phi_a = 1/2 on the two edges at a.
    const std::array<std::array<double, 2>, 3> mid = {{
        {(p[0][0] + p[1][0]) / 2, (p[0][1] + p[1][1]) / 2},
        {(p[1][0] + p[2][0]) / 2, (p[1][1] + p[2][1]) / 2},
        {(p[0][0] + p[2][0]) / 2, (p[0][1] + p[2][1]) / 2},
    }};
    const std::array<double, 3> gm = {g(mid[0][0], mid[0][1]), g(mid[1][0], mid[1][1]),
                                      g(mid[2][0], mid[2][1])};
    const std::array<double, 3> contrib = {0.5 * (gm[0] + gm[2]), 0.5 * (gm[0] + gm[1]),
                                           0.5 * (gm[1] + gm[2])};
    for (int a = 0; a < 3; ++a) {
      const Index ia = dof_index(n, tri.v[a][0], tri.v[a][1]);
      if (ia >= 0) b[static_cast<std::size_t>(ia)] += area / 3.0 * contrib[a];
    }
  });
  return b;
}

std::vector<double> interpolate(const UniformMesh& mesh, const ScalarField& g) {
  std::vector<double> v(static_cast<std::size_t>(mesh.num_dofs()));
  for (Index i = 0; i < mesh.num_dofs(); ++i) {
    const auto [x, y] = mesh.node(i);
    v[static_cast<std::size_t>(i)] = g(x, y);
  }
  return v;
}

}  // namespace saddleglt
