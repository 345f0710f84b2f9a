#include "saddleglt/saddle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace saddleglt {

std::vector<double> SaddleSystem::d1() const {
  std::vector<double> d(static_cast<std::size_t>(size()), 1.0);
  for (Index i = 0; i < block_order(); ++i) d[static_cast<std::size_t>(i)] = h * h;
  return d;
}

std::vector<double> SaddleSystem::d2() const {
  std::vector<double> d(static_cast<std::size_t>(size()), 1.0 / (h * h));
  for (Index i = 0; i < block_order(); ++i) d[static_cast<std::size_t>(i)] = 1.0;
  return d;
}

SparseMatrixCSR SaddleSystem::mass_unscaled() const { return (h * h) * M; }

SparseMatrixCSR SaddleSystem::unscaled_matrix() const {
  const SparseMatrixCSR Mbar = mass_unscaled();
  const SparseMatrixCSR aMbar = alpha * Mbar;
  const SparseMatrixCSR negMbar = -1.0 * Mbar;
  const SparseMatrixCSR Zt = Z.transpose();
  return block_matrix_3x3({{{&Mbar, nullptr, &Zt},
                            {nullptr, &aMbar, &negMbar},
                            {&Z, &negMbar, nullptr}}});
}

SaddleSystem build_system(int n, double alpha, ConstraintKind kind, const ScalarField& y_d,
                          const ScalarField& z, std::array<double, 2> c, double r) {
  if (n < 1) throw std::invalid_argument("build_system: n must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("build_system: alpha must be positive");

  SaddleSystem sys;
  sys.n = n;
  sys.alpha = alpha;
  sys.kind = kind;
  sys.c = c;
  sys.r = r;
  const UniformMesh mesh(n);
  sys.h = mesh.h();
  const double h = sys.h;

  const SparseMatrixCSR Mbar = assemble_mass(mesh);
  sys.M = (1.0 / (h * h)) * Mbar;
  sys.K = assemble_stiffness(mesh);
  if (kind == ConstraintKind::advection) {
    sys.V = (1.0 / h) * assemble_convection(mesh, c);
    sys.Z = sys.K + h * sys.V + (r * h * h) * sys.M;
  } else {
    sys.Z = sys.K;
  }

  const SparseMatrixCSR h4M = (h * h * h * h) * sys.M;
  const SparseMatrixCSR aM = alpha * sys.M;
  const SparseMatrixCSR negM = -1.0 * sys.M;
  const SparseMatrixCSR Zt = sys.Z.transpose();
  sys.A = block_matrix_3x3({{{&h4M, nullptr, &Zt},
                             {nullptr, &aM, &negM},
                             {&sys.Z, &negM, nullptr}}});

  // bbar = (Mbar * y_d ; 0 ; load(z)), then b = D1 * bbar.
  const std::vector<double> ydv = interpolate(mesh, y_d);
  const std::vector<double> myd = Mbar * ydv;
  const std::vector<double> zload = assemble_load(mesh, z);
  const Index nn = sys.block_order();
  sys.b_unscaled.assign(static_cast<std::size_t>(sys.size()), 0.0);
  for (Index i = 0; i < nn; ++i) {
    sys.b_unscaled[static_cast<std::size_t>(i)] = myd[static_cast<std::size_t>(i)];
    sys.b_unscaled[static_cast<std::size_t>(2 * nn + i)] = zload[static_cast<std::size_t>(i)];
  }
  sys.b = sys.b_unscaled;
  for (Index i = 0; i < nn; ++i) sys.b[static_cast<std::size_t>(i)] *= h * h;
  return sys;
}

std::vector<double> unscale_solution(const SaddleSystem& sys, std::span<const double> y) {
  if (static_cast<Index>(y.size()) != sys.size())
    throw std::invalid_argument("unscale_solution: length mismatch");
  std::vector<double> x(y.begin(), y.end());
  const double inv_h2 = 1.0 / (sys.h * sys.h);
  for (Index i = sys.block_order(); i < sys.size(); ++i) x[static_cast<std::size_t>(i)] *= inv_h2;
  return x;
}

std::vector<Index> interleave_permutation(int n) {
  const Index nn = static_cast<Index>(n) * n;
  std::vector<Index> perm(static_cast<std::size_t>(3 * nn));
  for (Index k = 0; k < nn; ++k)
    for (Index l = 0; l < 3; ++l) perm[static_cast<std::size_t>(3 * k + l)] = l * nn + k;
  return perm;
}

SparseMatrixCSR permute_to_block_toeplitz(const SaddleSystem& sys) {
  if (sys.kind != ConstraintKind::poisson)
    throw std::invalid_argument("permute_to_block_toeplitz: Poisson systems only");
  return sys.A.permuted(interleave_permutation(sys.n));
}

SparseMatrixCSR swap_first_two_blocks(const SparseMatrixCSR& a, Index block_order) {
  std::vector<Index> perm(static_cast<std::size_t>(3 * block_order));
  for (Index i = 0; i < block_order; ++i) {
    perm[static_cast<std::size_t>(i)] = block_order + i;
    perm[static_cast<std::size_t>(block_order + i)] = i;
    perm[static_cast<std::size_t>(2 * block_order + i)] = 2 * block_order + i;
  }
  return a.permuted(perm);
}

std::vector<double> swap_first_two_blocks(std::span<const double> v, Index block_order) {
  std::vector<double> w(v.size());
  for (Index i = 0; i < block_order; ++i) {
    w[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(block_order + i)];
    w[static_cast<std::size_t>(block_order + i)] = v[static_cast<std::size_t>(i)];
    w[static_cast<std::size_t>(2 * block_order + i)] = v[static_cast<std::size_t>(2 * block_order + i)];
  }
  return w;
}

// ---------------------------------------------------------------------------
// Preconditioner

namespace {

/// A solver for one inner block system, direct or iterative.
class InnerSolver {
 public:
  // SPD block: Cholesky or CG+IC(0).
  static InnerSolver spd(const SparseMatrixCSR& a, const InnerOptions& opt) {
    InnerSolver s;
    s.n_ = a.rows();
    if (opt.mode == InnerMode::direct) {
      s.direct_chol_ = std::make_shared<SparseCholesky>(a);
    } else {
      s.op_ = std::make_shared<LinearOperator>(LinearOperator::from_matrix(a));
      s.prec_ = std::make_shared<IncompleteCholesky>(a);
      s.tol_ = opt.tol;
      s.maxit_ = opt.maxit > 0 ? opt.maxit : static_cast<int>(a.rows());
      s.symmetric_ = true;
    }
    return s;
  }
  // General block: LU or BiCGstab+ILU(0).
  static InnerSolver general(const SparseMatrixCSR& a, const InnerOptions& opt) {
    InnerSolver s;
    s.n_ = a.rows();
    if (opt.mode == InnerMode::direct) {
      s.direct_lu_ = std::make_shared<SparseLU>(a);
    } else {
      s.op_ = std::make_shared<LinearOperator>(LinearOperator::from_matrix(a));
      s.prec_ = std::make_shared<IncompleteLU>(a);
      s.tol_ = opt.tol;
      s.maxit_ = opt.maxit > 0 ? opt.maxit : static_cast<int>(a.rows());
      s.symmetric_ = false;
    }
    return s;
  }

  void solve(std::span<const double> b, std::span<double> x, int stage) const {
    if (direct_chol_) {
      direct_chol_->solve(b, x);
      return;
    }
    if (direct_lu_) {
      direct_lu_->solve(b, x);
      return;
    }
    KrylovResult res;
    try {
      res = symmetric_ ? cg(*op_, prec_.get(), b, tol_, maxit_)
                       : bicgstab(*op_, prec_.get(), b, tol_, maxit_);
    } catch (const SolverBreakdown& e) {
      std::ostringstream msg;
      msg << "inner solve diverged at stage " << stage << ": " << e.what();
      throw InnerSolveError(msg.str(), stage);
    }
    if (!res.converged) {
      std::ostringstream msg;
      msg << "inner solve did not reach tolerance at stage " << stage;
      throw InnerSolveError(msg.str(), stage);
    }
    std::copy(res.x.begin(), res.x.end(), x.begin());
  }

 private:
  Index n_ = 0;
  std::shared_ptr<SparseCholesky> direct_chol_;
  std::shared_ptr<SparseLU> direct_lu_;
  std::shared_ptr<LinearOperator> op_;
  std::shared_ptr<Preconditioner> prec_;
  double tol_ = 1e-8;
  int maxit_ = 0;
  bool symmetric_ = true;
};

}  // namespace

struct PreconditionerOp::Impl {
  PrecVariant variant = PrecVariant::identity;
  Index nn = 0;  // block order
  double alpha = 0.0;
  double h = 0.0;

  SparseMatrixCSR M;   // scaled mass (pn/pbct/ptilde) or Mbar (pd)
  SparseMatrixCSR Z;   // constraint block (K or Z); unscaled one for pd
  SparseMatrixCSR Zt;  // its transpose

  std::optional<InnerSolver> solve_M;    // mass solves
  std::optional<InnerSolver> solve_Z;    // constraint solves
  std::optional<InnerSolver> solve_Zt;   // transposed-constraint solves

  void apply(std::span<const double> r, std::span<double> z) const;
  SparseMatrixCSR assemble() const;
};

void PreconditionerOp::Impl::apply(std::span<const double> r, std::span<double> zout) const {
  const Index n1 = nn;
  const auto r1 = r.subspan(0, static_cast<std::size_t>(n1));
  const auto r2 = r.subspan(static_cast<std::size_t>(n1), static_cast<std::size_t>(n1));
  const auto r3 = r.subspan(static_cast<std::size_t>(2 * n1), static_cast<std::size_t>(n1));
  auto z1 = zout.subspan(0, static_cast<std::size_t>(n1));
  auto z2 = zout.subspan(static_cast<std::size_t>(n1), static_cast<std::size_t>(n1));
  auto z3 = zout.subspan(static_cast<std::size_t>(2 * n1), static_cast<std::size_t>(n1));
  std::vector<double> t(static_cast<std::size_t>(n1));

  switch (variant) {
    case PrecVariant::identity:
      std::copy(r.begin(), r.end(), zout.begin());
      return;
    case PrecVariant::pn: {
      // (1) alpha Z^T z2 = r1   (2) M z3 = alpha M z2 - r2   (3) Z z1 = r3 + M z2
      solve_Zt->solve(r1, z2, 1);
      for (double& v : z2) v /= alpha;
      M.multiply(z2, t);
      std::vector<double> rhs2(t);
      for (Index i = 0; i < n1; ++i)
        rhs2[static_cast<std::size_t>(i)] =
            alpha * rhs2[static_cast<std::size_t>(i)] - r2[static_cast<std::size_t>(i)];
      solve_M->solve(rhs2, z3, 2);
      for (Index i = 0; i < n1; ++i)
        t[static_cast<std::size_t>(i)] += r3[static_cast<std::size_t>(i)];
      solve_Z->solve(t, z1, 3);
      return;
    }
    case PrecVariant::pbct: {
      // (1) Z^T z3 = r1   (2) z2 = (z3 + M^{-1} r2)/alpha   (3) Z z1 = r3 + M z2
      solve_Zt->solve(r1, z3, 1);
      solve_M->solve(r2, t, 2);
      for (Index i = 0; i < n1; ++i)
        z2[static_cast<std::size_t>(i)] =
            (z3[static_cast<std::size_t>(i)] + t[static_cast<std::size_t>(i)]) / alpha;
      M.multiply(z2, t);
      for (Index i = 0; i < n1; ++i)
        t[static_cast<std::size_t>(i)] += r3[static_cast<std::size_t>(i)];
      solve_Z->solve(t, z1, 3);
      return;
    }
    case PrecVariant::pd: {
      // On Abar: z3 = -Mbar^{-1} r2;  Mbar z1 = r1 - Zbar^T z3;  z2 = Mbar^{-1}(Zbar z1 - r3)
      solve_M->solve(r2, z3, 1);
      for (double& v : z3) v = -v;
      Zt.multiply(z3, t);
      for (Index i = 0; i < n1; ++i)
        t[static_cast<std::size_t>(i)] = r1[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(i)];
      solve_M->solve(t, z1, 2);
      Z.multiply(z1, t);
      for (Index i = 0; i < n1; ++i)
        t[static_cast<std::size_t>(i)] -= r3[static_cast<std::size_t>(i)];
      solve_M->solve(t, z2, 3);
      return;
    }
    case PrecVariant::ptilde: {
      // Rearranged ordering: [ O  O  -M ; O  h^4 M  Z^T ; -M  Z  O ]
      // (1) -M z3 = r1   (2) h^4 M z2 = r2 - Z^T z3   (3) -M z1 = r3 - Z z2
      solve_M->solve(r1, z3, 1);
      for (double& v : z3) v = -v;
      Zt.multiply(z3, t);
      for (Index i = 0; i < n1; ++i)
        t[static_cast<std::size_t>(i)] = r2[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(i)];
      solve_M->solve(t, z2, 2);
      const double inv_h4 = 1.0 / (h * h * h * h);
      for (double& v : z2) v *= inv_h4;
      Z.multiply(z2, t);
      for (Index i = 0; i < n1; ++i)
        t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)] - r3[static_cast<std::size_t>(i)];
      solve_M->solve(t, z1, 3);
      return;
    }
  }
  throw std::logic_error("unknown preconditioner variant");
}

SparseMatrixCSR PreconditionerOp::Impl::assemble() const {
  const SparseMatrixCSR negM = -1.0 * M;
  switch (variant) {
    case PrecVariant::identity:
      return SparseMatrixCSR::identity(3 * nn);
    case PrecVariant::pn: {
      const SparseMatrixCSR aZt = alpha * Zt;
      const SparseMatrixCSR aM = alpha * M;
      return block_matrix_3x3({{{nullptr, &aZt, nullptr},
                                {nullptr, &aM, &negM},
                                {&Z, &negM, nullptr}}});
    }
    case PrecVariant::pbct: {
      const SparseMatrixCSR aM = alpha * M;
      return block_matrix_3x3({{{nullptr, nullptr, &Zt},
                                {nullptr, &aM, &negM},
                                {&Z, &negM, nullptr}}});
    }
    case PrecVariant::pd:
      // Unscaled blocks: here M holds Mbar and Z the unscaled constraint.
      return block_matrix_3x3({{{&M, nullptr, &Zt},
                                {nullptr, nullptr, &negM},
                                {&Z, &negM, nullptr}}});
    case PrecVariant::ptilde: {
      const SparseMatrixCSR h4M = (h * h * h * h) * M;
      return block_matrix_3x3({{{nullptr, nullptr, &negM},
                                {nullptr, &h4M, &Zt},
                                {&negM, &Z, nullptr}}});
    }
  }
  throw std::logic_error("unknown preconditioner variant");
}

PreconditionerOp::PreconditionerOp(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
PreconditionerOp::~PreconditionerOp() = default;
PreconditionerOp::PreconditionerOp(PreconditionerOp&&) noexcept = default;

Index PreconditionerOp::dim() const { return 3 * impl_->nn; }
PrecVariant PreconditionerOp::variant() const { return impl_->variant; }
bool PreconditionerOp::on_unscaled_system() const { return impl_->variant == PrecVariant::pd; }
bool PreconditionerOp::on_swapped_system() const { return impl_->variant == PrecVariant::ptilde; }

void PreconditionerOp::apply(std::span<const double> r, std::span<double> z) const {
  if (static_cast<Index>(r.size()) != dim() || static_cast<Index>(z.size()) != dim())
    throw std::invalid_argument("preconditioner apply: size mismatch");
  impl_->apply(r, z);
}

SparseMatrixCSR PreconditionerOp::assemble() const { return impl_->assemble(); }

std::vector<double> PreconditionerOp::multiply(std::span<const double> x) const {
  return assemble() * x;
}

PreconditionerOp make_preconditioner(const SaddleSystem& sys, PrecVariant variant,
                                     InnerOptions inner) {
  auto impl = std::make_unique<PreconditionerOp::Impl>();
  impl->variant = variant;
  impl->nn = sys.block_order();
  impl->alpha = sys.alpha;
  impl->h = sys.h;
  const bool symmetric_constraint = sys.kind == ConstraintKind::poisson;

  switch (variant) {
    case PrecVariant::identity:
      break;
    case PrecVariant::pn:
    case PrecVariant::pbct:
    case PrecVariant::ptilde: {
      impl->M = sys.M;
      impl->Z = sys.Z;
      impl->Zt = sys.Z.transpose();
      impl->solve_M = InnerSolver::spd(impl->M, inner);
      if (variant != PrecVariant::ptilde) {
        if (symmetric_constraint) {
          impl->solve_Z = InnerSolver::spd(impl->Z, inner);
          impl->solve_Zt = impl->solve_Z;  // Z = Z^T, share the factorization
        } else {
          impl->solve_Z = InnerSolver::general(impl->Z, inner);
          impl->solve_Zt = InnerSolver::general(impl->Zt, inner);
        }
      }
      break;
    }
    case PrecVariant::pd: {
      // Unscaled blocks: Mbar and the (3,1) block of Abar (equal to Z).
      impl->M = sys.mass_unscaled();
      impl->Z = sys.Z;
      impl->Zt = sys.Z.transpose();
      impl->solve_M = InnerSolver::spd(impl->M, inner);
      break;
    }
  }
  return PreconditionerOp(std::move(impl));
}

}  // namespace saddleglt
