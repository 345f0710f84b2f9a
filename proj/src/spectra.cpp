#include "saddleglt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "lapack_shim.hpp"

namespace saddleglt {

// ---------------------------------------------------------------------------
// 3x3 symmetric eigenvalues

namespace {

// Implicit-shift QL sweeps on a symmetric tridiagonal (d, e) of order 3.
void ql3(std::array<double, 3>& d, std::array<double, 2>& e_in) {
  std::array<double, 3> e = {e_in[0], e_in[1], 0.0};
  for (int l = 0; l < 2; ++l) {
    for (int iter = 0;; ++iter) {
      int m = l;
      for (; m < 2; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (iter >= 60) throw std::runtime_error("eig3: QL iteration failed to converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      for (int i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          p = 0.0;
          g = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

}  // namespace

std::array<double, 3> eig3_symmetric(const Eigen::Matrix3d& a) {
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument("eig3_symmetric: matrix is not symmetric");

  // One Givens rotation on coordinates (1,2) annihilates a(0,2), leaving a
  // tridiagonal matrix with the same spectrum.
  std::array<double, 3> d;
  std::array<double, 2> e;
  const double a01 = 0.5 * (a(0, 1) + a(1, 0));
  const double a02 = 0.5 * (a(0, 2) + a(2, 0));
  const double a12 = 0.5 * (a(1, 2) + a(2, 1));
  if (a02 == 0.0) {
    d = {a(0, 0), a(1, 1), a(2, 2)};
    e = {a01, a12};
  } else {
    const double r = std::hypot(a01, a02);
    const double c = a01 / r;
    const double s = a02 / r;
    d = {a(0, 0), c * c * a(1, 1) + 2.0 * c * s * a12 + s * s * a(2, 2),
         s * s * a(1, 1) - 2.0 * c * s * a12 + c * c * a(2, 2)};
    e = {r, c * s * (a(2, 2) - a(1, 1)) + (c * c - s * s) * a12};
  }
  ql3(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

// ---------------------------------------------------------------------------
// Symbol sampling

std::span<const double> SymbolSampling::level(int l) const {
  const std::size_t gg = static_cast<std::size_t>(grid) * grid;
  if (l < 0 || l >= block_size) throw std::out_of_range("sampling level");
  return std::span<const double>(samples).subspan(static_cast<std::size_t>(l) * gg, gg);
}

std::vector<double> SymbolSampling::sorted_level(int l) const {
  const auto lv = level(l);
  std::vector<double> v(lv.begin(), lv.end());
  std::sort(v.begin(), v.end());
  return v;
}

SymbolSampling sample_symbol(const MatrixSymbol& sym, int g) {
  if (g < 2) throw std::invalid_argument("sample_symbol: grid must be >= 2");
  if (sym.num_variables() != 2)
    throw std::invalid_argument("sample_symbol: two-variable symbols only");
  const int s = sym.block_size();

  // Flatten the coefficient map once; evaluation stays on the stack.
  struct Coef {
    double j1, j2;
    Eigen::MatrixXd block;
  };
  std::vector<Coef> coefs;
  coefs.reserve(sym.coefficients().size());
  for (const auto& [j, block] : sym.coefficients())
    coefs.push_back({static_cast<double>(j[0]), static_cast<double>(j[1]), block});

  SymbolSampling out;
  out.grid = g;
  out.block_size = s;
  out.alpha = std::numeric_limits<double>::quiet_NaN();
  const std::size_t gg = static_cast<std::size_t>(g) * g;
  out.samples.assign(static_cast<std::size_t>(s) * gg, 0.0);

  Eigen::MatrixXd acc(s, s);
  std::vector<double> w;
  for (int j = 0; j < g; ++j) {
    const double t1 = SymbolSampling::theta(j, g);
    for (int k = 0; k < g; ++k) {
      const double t2 = SymbolSampling::theta(k, g);
      acc.setZero();
      for (const Coef& cf : coefs) acc += std::cos(cf.j1 * t1 + cf.j2 * t2) * cf.block;
      const std::size_t pos = static_cast<std::size_t>(j) * g + k;
      if (s == 3) {
        const std::array<double, 3> ev = eig3_symmetric(Eigen::Matrix3d(acc));
        for (int l = 0; l < 3; ++l) out.samples[static_cast<std::size_t>(l) * gg + pos] = ev[l];
      } else if (s == 1) {
        out.samples[pos] = acc(0, 0);
      } else {
        w = lapack::symmetric_eigenvalues(acc);
        for (int l = 0; l < s; ++l) out.samples[static_cast<std::size_t>(l) * gg + pos] = w[static_cast<std::size_t>(l)];
      }
    }
  }
  return out;
}

SymbolSampling sample_symbol(double alpha, int g) {
  SymbolSampling out = sample_symbol(predefined_symbols(alpha).f, g);
  out.alpha = alpha;
  return out;
}

std::vector<std::pair<double, double>> interval_bounds(const SymbolSampling& sampling) {
  std::vector<std::pair<double, double>> bounds;
  bounds.reserve(static_cast<std::size_t>(sampling.block_size));
  for (int l = 0; l < sampling.block_size; ++l) {
    const auto lv = sampling.level(l);
    const auto [lo, hi] = std::minmax_element(lv.begin(), lv.end());
    bounds.emplace_back(*lo, *hi);
  }
  return bounds;
}

std::array<std::pair<double, double>, 3> interval_bounds(double alpha, int g) {
  const auto b = interval_bounds(sample_symbol(alpha, g));
  return {b[0], b[1], b[2]};
}

// ---------------------------------------------------------------------------
// Inertia counting

namespace {

// Number of negative pivots of (T - shift I) for the tridiagonal (d, e);
// equivalently the number of eigenvalues below `shift`.
long sturm_negative_count(const std::vector<double>& d, const std::vector<double>& e,
                          double shift) {
  constexpr double pivmin = 1e-300;
  long count = 0;
  double t = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    t = i == 0 ? d[0] - shift : d[i] - shift - e[i - 1] * e[i - 1] / t;
    if (std::abs(t) < pivmin) t = -pivmin;
    if (t < 0.0) ++count;
  }
  return count;
}

}  // namespace

std::vector<long> negative_eigenvalue_counts(const SparseMatrixCSR& a,
                                             std::span<const double> shifts) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("negative_eigenvalue_count: square matrices only");
  if (!a.is_symmetric(1e-12 * std::max(1.0, a.max_abs())))
    throw std::invalid_argument("negative_eigenvalue_count: symmetric matrices only");
  const int n = static_cast<int>(a.rows());
  const int kd = static_cast<int>(a.bandwidth());
  // Lower band storage, column-major: ab[(i - j) + j*(kd+1)] = A(i, j).
  std::vector<double> ab(static_cast<std::size_t>(kd + 1) * n, 0.0);
  const auto& rp = a.row_offsets();
  const auto& ci = a.col_indices();
  const auto& v = a.values();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
      const Index j = ci[static_cast<std::size_t>(k)];
      if (j > i) continue;
      ab[static_cast<std::size_t>(i - j) + static_cast<std::size_t>(j) * (kd + 1)] =
          v[static_cast<std::size_t>(k)];
    }
  std::vector<double> d, e;
  lapack::band_to_tridiagonal(n, kd, ab, d, e);
  std::vector<long> counts;
  counts.reserve(shifts.size());
  for (const double shift : shifts) counts.push_back(sturm_negative_count(d, e, shift));
  return counts;
}

long negative_eigenvalue_count(const SparseMatrixCSR& a, double shift) {
  return negative_eigenvalue_counts(a, std::array{shift})[0];
}

namespace {

// #{< s} and #{<= s} both reduce to a strict count at a nudged shift; the
// nudge keeps endpoints that are eigenvalues on the intended side.
std::pair<double, double> interval_shifts(const SparseMatrixCSR& a, double lo, double hi,
                                          IntervalClosedness closedness) {
  if (!(lo < hi)) throw std::invalid_argument("count_eigs_in_interval: requires lo < hi");
  const double delta = 1e-12 * std::max(1.0, a.norm_inf());
  switch (closedness) {
    case IntervalClosedness::open_closed:  // (lo, hi] = #{<= hi} - #{<= lo}
      return {lo + delta, hi + delta};
    case IntervalClosedness::closed_open:  // [lo, hi) = #{< hi} - #{< lo}
      return {lo - delta, hi - delta};
    case IntervalClosedness::open_open:  // (lo, hi) = #{< hi} - #{<= lo}
      return {lo + delta, hi - delta};
    case IntervalClosedness::closed_closed:  // [lo, hi] = #{<= hi} - #{< lo}
      return {lo - delta, hi + delta};
  }
  throw std::logic_error("unknown closedness");
}

}  // namespace

long count_eigs_in_interval(const SparseMatrixCSR& a, double lo, double hi,
                            IntervalClosedness closedness) {
  const auto [shift_lo, shift_hi] = interval_shifts(a, lo, hi, closedness);
  const auto counts = negative_eigenvalue_counts(a, std::array{shift_lo, shift_hi});
  return counts[1] - counts[0];
}

namespace {

Eigen::MatrixXd to_dense(const SparseMatrixCSR& a) {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  const auto& rp = a.row_offsets();
  const auto& ci = a.col_indices();
  const auto& v = a.values();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k)
      dense(i, ci[static_cast<std::size_t>(k)]) = v[static_cast<std::size_t>(k)];
  return dense;
}

}  // namespace

std::vector<double> full_spectrum(const SparseMatrixCSR& a, Index dense_limit) {
  if (a.rows() != a.cols()) throw std::invalid_argument("full_spectrum: square matrices only");
  if (a.rows() > dense_limit)
    throw std::invalid_argument("full_spectrum: order exceeds the dense limit");
  if (!a.is_symmetric(1e-12 * std::max(1.0, a.max_abs())))
    throw std::invalid_argument("full_spectrum: symmetric matrices only");
  return lapack::symmetric_eigenvalues(to_dense(a));
}

SaddleIntervals saddle_point_intervals(const SaddleSystem& sys, Index dense_limit) {
  if (sys.size() > dense_limit)
    throw std::invalid_argument("saddle_point_intervals: order exceeds the dense limit");
  // Leading block diag(h^4 M, alpha M); coupling row [Z, -M].
  const std::vector<double> em = full_spectrum(sys.M, dense_limit);
  const double h4 = std::pow(sys.h, 4);
  const double mu_min = std::min(h4 * em.front(), sys.alpha * em.front());
  const double mu_max = std::max(h4 * em.back(), sys.alpha * em.back());
  const Eigen::MatrixXd Zd = to_dense(sys.Z);
  const Eigen::MatrixXd Md = to_dense(sys.M);
  const std::vector<double> s2 =
      lapack::symmetric_eigenvalues(Zd * Zd.transpose() + Md * Md);
  const double sig_min = std::sqrt(std::max(0.0, s2.front()));
  const double sig_max = std::sqrt(s2.back());
  SaddleIntervals iv;
  iv.negative = {(mu_min - std::hypot(mu_min, 2 * sig_max)) / 2,
                 (mu_max - std::hypot(mu_max, 2 * sig_min)) / 2};
  iv.positive = {mu_min, (mu_max + std::hypot(mu_max, 2 * sig_max)) / 2};
  return iv;
}

// ---------------------------------------------------------------------------
// Matching

std::vector<GridSample> level_samples(const SymbolSampling& sampling, int l) {
  const auto lv = sampling.level(l);
  std::vector<GridSample> out;
  out.reserve(lv.size());
  const int g = sampling.grid;
  for (int j = 0; j < g; ++j)
    for (int k = 0; k < g; ++k)
      out.push_back({lv[static_cast<std::size_t>(j) * g + k], j, k,
                     SymbolSampling::theta(j, g), SymbolSampling::theta(k, g)});
  return out;
}

std::vector<MatchedPair> match_eigenvalues(std::span<const double> eigenvalues,
                                           std::span<const GridSample> samples) {
  if (eigenvalues.empty() || samples.empty())
    throw std::invalid_argument("match_eigenvalues: inputs must be nonempty");

  // Sort samples by (value, j, k); the first element of a run of equal
  // values is the lexicographic tie winner.
  std::vector<GridSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const GridSample& a, const GridSample& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
  });
  // run_start[i]: index of the first sample with the same value as sorted[i].
  std::vector<std::size_t> run_start(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    run_start[i] = (i > 0 && sorted[i].value == sorted[i - 1].value) ? run_start[i - 1] : i;

  std::vector<MatchedPair> out;
  out.reserve(eigenvalues.size());
  for (const double lambda : eigenvalues) {
    const auto it = std::lower_bound(
        sorted.begin(), sorted.end(), lambda,
        [](const GridSample& s, double x) { return s.value < x; });
    std::size_t best = sorted.size();  // sentinel
    auto better = [&](std::size_t cand) {
      if (cand >= sorted.size()) return;
      if (best == sorted.size()) {
        best = cand;
        return;
      }
      const double dc = std::abs(lambda - sorted[cand].value);
      const double db = std::abs(lambda - sorted[best].value);
      if (dc < db) {
        best = cand;
      } else if (dc == db) {
        const GridSample& c = sorted[cand];
        const GridSample& b = sorted[best];
        if (c.j < b.j || (c.j == b.j && c.k < b.k)) best = cand;
      }
    };
    if (it != sorted.end()) better(run_start[static_cast<std::size_t>(it - sorted.begin())]);
    if (it != sorted.begin())
      better(run_start[static_cast<std::size_t>(it - sorted.begin()) - 1]);
    const GridSample& s = sorted[best];
    out.push_back({lambda, s, std::abs(lambda - s.value)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

SpectralReport spectral_report(const SparseMatrixCSR& b_n, int n,
                               const std::array<std::pair<double, double>, 3>& bounds) {
  SpectralReport rep;
  rep.bounds = bounds;
  // One band reduction serves all six interval endpoints.
  const std::array<IntervalClosedness, 3> closedness = {IntervalClosedness::open_closed,
                                                        IntervalClosedness::open_closed,
                                                        IntervalClosedness::closed_open};
  std::array<double, 6> shifts{};
  for (int l = 0; l < 3; ++l) {
    const auto [lo, hi] = interval_shifts(b_n, bounds[static_cast<std::size_t>(l)].first,
                                          bounds[static_cast<std::size_t>(l)].second,
                                          closedness[static_cast<std::size_t>(l)]);
    shifts[static_cast<std::size_t>(2 * l)] = lo;
    shifts[static_cast<std::size_t>(2 * l) + 1] = hi;
  }
  const std::vector<long> counts = negative_eigenvalue_counts(b_n, shifts);
  for (int l = 0; l < 3; ++l)
    rep.counts[static_cast<std::size_t>(l)] =
        counts[static_cast<std::size_t>(2 * l) + 1] - counts[static_cast<std::size_t>(2 * l)];
  rep.expected = static_cast<long>(n) * n;
  rep.outliers = rep.expected - rep.counts[1];
  rep.outlier_ratio = static_cast<double>(rep.outliers) / (3.0 * n * n);
  return rep;
}

PrecSpectrumReport preconditioned_spectrum_check(const SaddleSystem& sys, PrecVariant variant,
                                                 Index dense_limit) {
  const Index order = sys.size();
  if (order > dense_limit)
    throw std::invalid_argument("preconditioned_spectrum_check: order exceeds the dense limit");
  const PreconditionerOp prec = make_preconditioner(sys, variant);

  SparseMatrixCSR system = sys.A;
  if (prec.on_unscaled_system()) system = sys.unscaled_matrix();
  if (prec.on_swapped_system()) system = swap_first_two_blocks(sys.A, sys.block_order());

  // Dense P^{-1} A, column by column.
  const Eigen::MatrixXd dense = to_dense(system);
  Eigen::MatrixXd pinv_a(order, order);
  {
    std::vector<double> col(static_cast<std::size_t>(order)), out(static_cast<std::size_t>(order));
    for (Index j = 0; j < order; ++j) {
      for (Index i = 0; i < order; ++i) col[static_cast<std::size_t>(i)] = dense(i, j);
      prec.apply(col, out);
      for (Index i = 0; i < order; ++i) pinv_a(i, j) = out[static_cast<std::size_t>(i)];
    }
  }
  const std::vector<std::complex<double>> ev = lapack::general_eigenvalues(std::move(pinv_a));

  PrecSpectrumReport rep;
  for (const auto& lambda : ev) {
    if (std::abs(lambda - 1.0) <= rep.unit_tol) {
      ++rep.unit_count;
    } else {
      rep.nonunit.push_back(lambda.real());
      rep.max_abs_imag = std::max(rep.max_abs_imag, std::abs(lambda.imag()));
    }
  }
  std::sort(rep.nonunit.begin(), rep.nonunit.end());

  // Oracle for the non-unit part.
  const Index nn = sys.block_order();
  Eigen::MatrixXd Md = Eigen::MatrixXd::Zero(nn, nn);
  Eigen::MatrixXd Zd = Eigen::MatrixXd::Zero(nn, nn);
  const SparseMatrixCSR mass = (variant == PrecVariant::pd) ? sys.mass_unscaled() : sys.M;
  for (const SparseMatrixCSR* src : {&mass, &sys.Z}) {
    Eigen::MatrixXd& dst = (src == &mass) ? Md : Zd;
    const auto& rp = src->row_offsets();
    const auto& ci = src->col_indices();
    const auto& v = src->values();
    for (Index i = 0; i < nn; ++i)
      for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k)
        dst(i, ci[static_cast<std::size_t>(k)]) = v[static_cast<std::size_t>(k)];
  }
  const double h = sys.h;
  switch (variant) {
    case PrecVariant::pn:
    case PrecVariant::pbct: {
      // lambda = 1 + (h^4/alpha) mu with M x = mu (Z^T M^{-1} Z) x.
      const Eigen::MatrixXd G = Zd.transpose() * Md.ldlt().solve(Zd);
      const std::vector<double> mu = lapack::generalized_sym_eigenvalues(Md, G);
      for (double m : mu) rep.oracle.push_back(1.0 + h * h * h * h / sys.alpha * m);
      break;
    }
    case PrecVariant::pd:
    case PrecVariant::ptilde: {
      // pd: lambda = 1 + alpha * eig(Mbar^{-1} Z Mbar^{-1} Z^T), Md = Mbar.
      // ptilde: lambda = 1 + (alpha/h^4) * eig(M^{-1} Z M^{-1} Z^T), Md = M;
      // both via the symmetric-definite pencil (Z Md^{-1} Z^T) x = mu Md x.
      const Eigen::MatrixXd G = Zd * Md.ldlt().solve(Zd.transpose());
      const std::vector<double> mu = lapack::generalized_sym_eigenvalues(G, Md);
      const double factor =
          variant == PrecVariant::pd ? sys.alpha : sys.alpha / (h * h * h * h);
      for (double m : mu) rep.oracle.push_back(1.0 + factor * m);
      break;
    }
    case PrecVariant::identity:
      rep.oracle.assign(rep.nonunit.begin(), rep.nonunit.end());
      break;
  }
  std::sort(rep.oracle.begin(), rep.oracle.end());

  if (rep.nonunit.size() == rep.oracle.size()) {
    for (std::size_t i = 0; i < rep.nonunit.size(); ++i)
      rep.max_match_error = std::max(rep.max_match_error,
                                     std::abs(rep.nonunit[i] - rep.oracle[i]));
  } else {
    rep.max_match_error = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// CSV emitters

void write_sampling_csv(std::ostream& os, const SymbolSampling& sampling, bool include_header) {
  if (include_header) os << "grid,level,rank,value\n";
  os.precision(17);
  for (int l = 0; l < sampling.block_size; ++l) {
    const std::vector<double> sorted = sampling.sorted_level(l);
    for (std::size_t r = 0; r < sorted.size(); ++r)
      os << sampling.grid << "," << l + 1 << "," << r << "," << sorted[r] << "\n";
  }
}

void write_spectrum_csv(std::ostream& os, std::span<const double> eigenvalues,
                        const std::array<std::pair<double, double>, 3>& bounds) {
  os << "index,eigenvalue,in_intervals\n";
  os.precision(17);
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double v = eigenvalues[i];
    const bool inside = (v > bounds[0].first && v <= bounds[0].second) ||
                        (v > bounds[1].first && v <= bounds[1].second) ||
                        (v >= bounds[2].first && v < bounds[2].second);
    os << i + 1 << "," << v << "," << (inside ? 1 : 0) << "\n";
  }
}

void write_match_csv(std::ostream& os, int block, std::span<const MatchedPair> pairs,
                     bool include_header) {
  if (include_header) os << "block,j,k,theta1,theta2,sample,eigenvalue,abs_error\n";
  os.precision(17);
  for (const MatchedPair& p : pairs)
    os << block << "," << p.sample.j << "," << p.sample.k << "," << p.sample.theta1 << ","
       << p.sample.theta2 << "," << p.sample.value << "," << p.eigenvalue << ","
       << p.abs_error << "\n";
}

}  // namespace saddleglt
