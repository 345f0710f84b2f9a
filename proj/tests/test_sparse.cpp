#include <doctest.h>

#include <random>
#include <sstream>

#include "saddleglt/sparse.hpp"

using namespace saddleglt;

TEST_SUITE_BEGIN("sparse");

TEST_CASE("triplet assembly sums duplicates and drops zeros") {
  std::vector<Triplet> t = {{0, 1, 2.0}, {0, 1, 3.0}, {1, 0, 1.0}, {1, 0, -1.0}, {2, 2, 4.0}};
  const auto m = SparseMatrixCSR::from_triplets(3, 3, t);
  CHECK(m.nnz() == 2);
  CHECK(m.coeff(0, 1) == 5.0);
  CHECK(m.coeff(1, 0) == 0.0);
  CHECK(m.coeff(2, 2) == 4.0);
}

TEST_CASE("matvec against dense reference on random matrices") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<Index> pos(0, 19);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Triplet> t;
    double dense[20][20] = {};
    for (int k = 0; k < 60; ++k) {
      const Index i = pos(rng), j = pos(rng);
      const double v = val(rng);
      t.push_back({i, j, v});
      dense[i][j] += v;
    }
    const auto m = SparseMatrixCSR::from_triplets(20, 20, t);
    std::vector<double> x(20), y(20), yt(20);
    for (auto& xi : x) xi = val(rng);
    m.multiply(x, y);
    m.multiply_transpose(x, yt);
    for (int i = 0; i < 20; ++i) {
      double s = 0.0, st = 0.0;
      for (int j = 0; j < 20; ++j) {
        s += dense[i][j] * x[static_cast<std::size_t>(j)];
        st += dense[j][i] * x[static_cast<std::size_t>(j)];
      }
      CHECK(y[static_cast<std::size_t>(i)] == doctest::Approx(s).epsilon(1e-13));
      CHECK(yt[static_cast<std::size_t>(i)] == doctest::Approx(st).epsilon(1e-13));
    }
  }
}

TEST_CASE("transpose is an involution and max_abs_diff sees asymmetry") {
  std::vector<Triplet> t = {{0, 1, 2.0}, {1, 0, -2.0}, {2, 0, 1.5}};
  const auto m = SparseMatrixCSR::from_triplets(3, 3, t);
  CHECK(SparseMatrixCSR::max_abs_diff(m.transpose().transpose(), m) == 0.0);
  CHECK(SparseMatrixCSR::max_abs_diff(m, m.transpose()) == 4.0);
  CHECK_FALSE(m.is_symmetric());
}

TEST_CASE("permutation conjugation preserves entries") {
  std::vector<Triplet> t = {{0, 0, 1.0}, {0, 2, 2.0}, {1, 1, 3.0}, {2, 0, 4.0}};
  const auto m = SparseMatrixCSR::from_triplets(3, 3, t);
  const std::vector<Index> perm = {2, 0, 1};
  const auto p = m.permuted(perm);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      CHECK(p.coeff(i, j) == m.coeff(perm[static_cast<std::size_t>(i)],
                                     perm[static_cast<std::size_t>(j)]));
}

TEST_CASE("block matrix layout") {
  const auto I = SparseMatrixCSR::identity(2);
  const auto twoI = 2.0 * I;
  const auto b = block_matrix_3x3({{{&I, nullptr, nullptr},
                                    {nullptr, &twoI, nullptr},
                                    {nullptr, nullptr, &I}}});
  CHECK(b.rows() == 6);
  CHECK(b.coeff(2, 2) == 2.0);
  CHECK(b.coeff(0, 0) == 1.0);
  CHECK(b.coeff(5, 5) == 1.0);
  CHECK(b.nnz() == 6);
}

TEST_CASE("matrix market round trip") {
  std::vector<Triplet> t = {{0, 1, 0.25}, {3, 2, -7.0}, {1, 1, 1e-17}};
  const auto m = SparseMatrixCSR::from_triplets(4, 4, t);
  std::stringstream ss;
  write_matrix_market(ss, m);
  const auto back = read_matrix_market(ss);
  CHECK(SparseMatrixCSR::max_abs_diff(m, back) == 0.0);

  std::stringstream vs;
  const std::vector<double> v = {1.0, -2.5, 1e-30};
  write_vector_market(vs, v);
  std::string header;
  std::getline(vs, header);
  CHECK(header == "%%MatrixMarket matrix array real general");
}

TEST_SUITE_END();
