#include "lapack_shim.hpp"

#include <stdexcept>
#include <string>

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void dsygv_(const int* itype, const char* jobz, const char* uplo, const int* n, double* a,
            const int* lda, double* b, const int* ldb, double* w, double* work,
            const int* lwork, int* info);
void dgeev_(const char* jobvl, const char* jobvr, const int* n, double* a, const int* lda,
            double* wr, double* wi, double* vl, const int* ldvl, double* vr, const int* ldvr,
            double* work, const int* lwork, int* info);
void dsbtrd_(const char* vect, const char* uplo, const int* n, const int* kd, double* ab,
             const int* ldab, double* d, double* e, double* q, const int* ldq, double* work,
             int* info);
}

namespace saddleglt::lapack {

namespace {
[[noreturn]] void fail(const char* routine, int info) {
  throw std::runtime_error(std::string(routine) + " failed with info = " + std::to_string(info));
}
}  // namespace

std::vector<double> symmetric_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 0) return w;
  int info = 0;
  int lwork = -1, liwork = -1;
  double wq = 0.0;
  int iwq = 0;
  dsyevd_("N", "L", &n, a.data(), &n, w.data(), &wq, &lwork, &iwq, &liwork, &info);
  if (info != 0) fail("dsyevd (query)", info);
  lwork = static_cast<int>(wq);
  liwork = iwq;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dsyevd_("N", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(), &liwork,
          &info);
  if (info != 0) fail("dsyevd", info);
  return w;
}

std::vector<double> generalized_sym_eigenvalues(Eigen::MatrixXd a, Eigen::MatrixXd b) {
  const int n = static_cast<int>(a.rows());
  if (b.rows() != n || b.cols() != n || a.cols() != n)
    throw std::invalid_argument("generalized_sym_eigenvalues: shape mismatch");
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 0) return w;
  const int itype = 1;
  int info = 0;
  int lwork = -1;
  double wq = 0.0;
  dsygv_(&itype, "N", "L", &n, a.data(), &n, b.data(), &n, w.data(), &wq, &lwork, &info);
  if (info != 0) fail("dsygv (query)", info);
  lwork = static_cast<int>(wq);
  std::vector<double> work(static_cast<std::size_t>(lwork));
  dsygv_(&itype, "N", "L", &n, a.data(), &n, b.data(), &n, w.data(), work.data(), &lwork,
         &info);
  if (info != 0) fail("dsygv", info);
  return w;
}

std::vector<std::complex<double>> general_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> ev(static_cast<std::size_t>(n));
  if (n == 0) return ev;
  int info = 0;
  int lwork = -1;
  double wq = 0.0;
  const int one = 1;
  dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &one, nullptr, &one, &wq,
         &lwork, &info);
  if (info != 0) fail("dgeev (query)", info);
  lwork = static_cast<int>(wq);
  std::vector<double> work(static_cast<std::size_t>(lwork));
  dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &one, nullptr, &one,
         work.data(), &lwork, &info);
  if (info != 0) fail("dgeev", info);
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = {wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]};
  return ev;
}

void band_to_tridiagonal(int n, int kd, std::vector<double>& ab, std::vector<double>& d,
                         std::vector<double>& e) {
  const int ldab = kd + 1;
  if (ab.size() != static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n))
    throw std::invalid_argument("band_to_tridiagonal: band array has wrong size");
  d.assign(static_cast<std::size_t>(n), 0.0);
  e.assign(n > 0 ? static_cast<std::size_t>(n) - 1 : 0, 0.0);
  if (n == 0) return;
  std::vector<double> work(static_cast<std::size_t>(n));
  double q = 0.0;
  const int ldq = 1;
  int info = 0;
  dsbtrd_("N", "L", &n, &kd, ab.data(), &ldab, d.data(), e.data(), &q, &ldq, work.data(),
          &info);
  if (info != 0) fail("dsbtrd", info);
}

}  // namespace saddleglt::lapack
