#include "saddleglt/symbol.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace saddleglt {

MatrixSymbol::MatrixSymbol(int d, int s, bool real_symmetric)
    : d_(d), s_(s), real_symmetric_(real_symmetric) {
  if (d < 1 || s < 1) throw std::invalid_argument("MatrixSymbol needs d >= 1 and s >= 1");
}

void MatrixSymbol::add_coefficient(const MultiIndex& j, const Eigen::MatrixXd& block) {
  if (static_cast<int>(j.size()) != d_)
    throw std::invalid_argument("coefficient multi-index has wrong length");
  if (block.rows() != s_ || block.cols() != s_)
    throw std::invalid_argument("coefficient block has wrong size");
  auto [it, inserted] = coeffs_.try_emplace(j, block);
  if (!inserted) it->second += block;
}

void MatrixSymbol::validate() const {
  if (!real_symmetric_) return;
  for (const auto& [j, block] : coeffs_) {
    MultiIndex neg(j.size());
    for (std::size_t t = 0; t < j.size(); ++t) neg[t] = -j[t];
    const auto it = coeffs_.find(neg);
    const double diff = (it == coeffs_.end())
                            ? block.cwiseAbs().maxCoeff()
                            : (it->second - block.transpose()).cwiseAbs().maxCoeff();
    if (diff > 0.0)
      throw std::invalid_argument("real-symmetric symbol requires fhat(-j) = fhat(j)^T");
  }
}

MatrixSymbol MatrixSymbol::scaled(double a) const {
  MatrixSymbol r(d_, s_, real_symmetric_);
  for (const auto& [j, block] : coeffs_) r.add_coefficient(j, a * block);
  return r;
}

MatrixSymbol operator+(const MatrixSymbol& x, const MatrixSymbol& y) {
  if (x.d_ != y.d_ || x.s_ != y.s_)
    throw std::invalid_argument("symbol sum: shape mismatch");
  MatrixSymbol r(x.d_, x.s_, x.real_symmetric_ && y.real_symmetric_);
  for (const auto& [j, block] : x.coeffs_) r.add_coefficient(j, block);
  for (const auto& [j, block] : y.coeffs_) r.add_coefficient(j, block);
  return r;
}

Eigen::MatrixXd symbol_eval(const MatrixSymbol& sym, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != sym.num_variables())
    throw std::invalid_argument("symbol_eval: theta has wrong length");
  const int s = sym.block_size();
  Eigen::MatrixXd re = Eigen::MatrixXd::Zero(s, s);
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(s, s);
  double scale = 0.0;
  for (const auto& [j, block] : sym.coefficients()) {
    double phase = 0.0;
    for (std::size_t t = 0; t < j.size(); ++t) phase += j[t] * theta[t];
    re += std::cos(phase) * block;
    im += std::sin(phase) * block;
    scale = std::max(scale, block.cwiseAbs().maxCoeff());
  }
  const double imax = im.cwiseAbs().maxCoeff();
  if (imax > 1e-13 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << "symbol_eval: non-real evaluation (max imaginary part " << imax << ")";
    throw std::runtime_error(msg.str());
  }
  return re;
}

SparseMatrixCSR toeplitz_build(const MatrixSymbol& sym, std::span<const int> n) {
  const int d = sym.num_variables();
  const int s = sym.block_size();
  if (static_cast<int>(n.size()) != d)
    throw std::invalid_argument("toeplitz_build: level orders have wrong length");
  Index grid = 1;
  for (int t = 0; t < d; ++t) {
    if (n[t] < 1) throw std::invalid_argument("toeplitz_build: level orders must be positive");
    grid *= n[t];
  }
  for (const auto& [j, block] : sym.coefficients())
    for (int t = 0; t < d; ++t)
      if (std::abs(j[t]) >= n[t]) {
        std::ostringstream msg;
        msg << "toeplitz_build: coefficient offset " << j[t] << " at level " << t + 1
            << " is out of band for order " << n[t];
        throw std::invalid_argument(msg.str());
      }

  std::vector<Triplet> trips;
  std::vector<int> r(static_cast<std::size_t>(d), 0);
  for (Index lin = 0; lin < grid; ++lin) {
    // Decode row multi-index, level 1 slowest.
    Index rest = lin;
    for (int t = d - 1; t >= 0; --t) {
      r[static_cast<std::size_t>(t)] = static_cast<int>(rest % n[t]);
      rest /= n[t];
    }
    for (const auto& [j, block] : sym.coefficients()) {
      Index clin = 0;
      bool in_range = true;
      for (int t = 0; t < d && in_range; ++t) {
        const int c = r[static_cast<std::size_t>(t)] - j[static_cast<std::size_t>(t)];
        if (c < 0 || c >= n[t]) in_range = false;
        clin = clin * n[t] + c;
      }
      if (!in_range) continue;
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b)
          if (block(a, b) != 0.0)
            trips.push_back({lin * s + a, clin * s + b, block(a, b)});
    }
  }
  return SparseMatrixCSR::from_triplets(grid * s, grid * s, trips);
}

PredefinedSymbols predefined_symbols(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("predefined_symbols: alpha must be positive");

  MatrixSymbol m(2, 1, true);
  m.add_coefficient({0, 0}, Eigen::MatrixXd::Constant(1, 1, 0.5));
  for (const auto& j : {MatrixSymbol::MultiIndex{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}})
    m.add_coefficient(j, Eigen::MatrixXd::Constant(1, 1, 1.0 / 12.0));
  m.validate();

  MatrixSymbol kappa(2, 1, true);
  kappa.add_coefficient({0, 0}, Eigen::MatrixXd::Constant(1, 1, 4.0));
  for (const auto& j : {MatrixSymbol::MultiIndex{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
    kappa.add_coefficient(j, Eigen::MatrixXd::Constant(1, 1, -1.0));
  kappa.validate();

  MatrixSymbol f(2, 3, true);
  Eigen::Matrix3d f00;
  f00 << 0, 0, 4, 0, alpha / 2, -0.5, 4, -0.5, 0;
  Eigen::Matrix3d fdiag;
  fdiag << 0, 0, 0, 0, alpha / 12, -1.0 / 12, 0, -1.0 / 12, 0;
  Eigen::Matrix3d fside;
  fside << 0, 0, -1, 0, alpha / 12, -1.0 / 12, -1, -1.0 / 12, 0;
  f.add_coefficient({0, 0}, f00);
  for (const auto& j : {MatrixSymbol::MultiIndex{1, 1}, {-1, -1}}) f.add_coefficient(j, fdiag);
  for (const auto& j : {MatrixSymbol::MultiIndex{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
    f.add_coefficient(j, fside);
  f.validate();

  return {std::move(m), std::move(kappa), std::move(f)};
}

std::string MatrixSymbol::to_json() const {
  nlohmann::json doc;
  doc["d"] = d_;
  doc["s"] = s_;
  doc["real_symmetric"] = real_symmetric_;
  doc["entries"] = nlohmann::json::array();
  for (const auto& [j, block] : coeffs_) {
    nlohmann::json entry;
    entry["j"] = j;
    auto rows = nlohmann::json::array();
    for (int a = 0; a < s_; ++a) {
      auto row = nlohmann::json::array();
      for (int b = 0; b < s_; ++b) row.push_back(block(a, b));
      rows.push_back(row);
    }
    entry["block"] = rows;
    doc["entries"].push_back(entry);
  }
  return doc.dump(2);
}

MatrixSymbol MatrixSymbol::from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  MatrixSymbol sym(doc.at("d").get<int>(), doc.at("s").get<int>(),
                   doc.value("real_symmetric", false));
  for (const auto& entry : doc.at("entries")) {
    MultiIndex j = entry.at("j").get<MultiIndex>();
    Eigen::MatrixXd block(sym.s_, sym.s_);
    const auto& rows = entry.at("block");
    for (int a = 0; a < sym.s_; ++a)
      for (int b = 0; b < sym.s_; ++b) block(a, b) = rows.at(a).at(b).get<double>();
    sym.add_coefficient(j, block);
  }
  sym.validate();
  return sym;
}

}  // namespace saddleglt
