#include "pexc/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <sstream>

namespace pexc {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::Unbounded: return "Unbounded";
    case SdpStatus::MaxIter: return "MaxIter";
  }
  return "?";
}

RealMat complex_to_real_embedding(const HermitianOperator& h) {
  const int d = h.dim();
  RealMat out(2 * d, 2 * d);
  const RealMat re = h.mat().real();
  const RealMat im = h.mat().imag();
  out.topLeftCorner(d, d) = re;
  out.topRightCorner(d, d) = -im;
  out.bottomLeftCorner(d, d) = im;
  out.bottomRightCorner(d, d) = re;
  return out;
}

std::vector<HermitianOperator> hermitian_basis(int d) {
  std::vector<HermitianOperator> basis;
  basis.reserve(static_cast<size_t>(d) * d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    Mat g = Mat::Zero(d, d);
    g(i, i) = 1.0;
    basis.emplace_back(std::move(g));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Mat gs = Mat::Zero(d, d);
      gs(i, j) = inv_sqrt2;
      gs(j, i) = inv_sqrt2;
      basis.emplace_back(std::move(gs));
      Mat ga = Mat::Zero(d, d);
      ga(i, j) = Cplx(0.0, inv_sqrt2);
      ga(j, i) = Cplx(0.0, -inv_sqrt2);
      basis.emplace_back(std::move(ga));
    }
  }
  return basis;
}

namespace {

struct Triplet {
  int r, c;
  double v;
};

struct LoweredBlock {
  int m = 0;
  RealMat B;
  std::vector<int> vars;
  std::vector<RealMat> A;
  std::vector<std::vector<Triplet>> sparse;
  bool embedded = false;
};

bool is_real(const Mat& m) { return m.imag().cwiseAbs().maxCoeff() < 1e-13; }

std::vector<Triplet> sparsify(const RealMat& a, int cap) {
  std::vector<Triplet> t;
  for (int c = 0; c < a.cols(); ++c) {
    for (int r = 0; r < a.rows(); ++r) {
      if (a(r, c) != 0.0) {
        t.push_back({r, c, a(r, c)});
        if (static_cast<int>(t.size()) > cap) return {};
      }
    }
  }
  return t;
}

LoweredBlock lower_block(const HermBlockConstraint& blk) {
  LoweredBlock lb;
  bool real = is_real(blk.constant.mat());
  for (const auto& a : blk.coeffs) real = real && is_real(a.mat());
  lb.embedded = !real;
  lb.vars = blk.vars;
  if (real) {
    lb.m = blk.constant.dim();
    lb.B = blk.constant.mat().real();
    for (const auto& a : blk.coeffs) lb.A.push_back(a.mat().real());
  } else {
    lb.m = 2 * blk.constant.dim();
    lb.B = complex_to_real_embedding(blk.constant);
    for (const auto& a : blk.coeffs) lb.A.push_back(complex_to_real_embedding(a));
  }
  const int cap = 4 * lb.m;
  for (const auto& a : lb.A) lb.sparse.push_back(sparsify(a, cap));
  return lb;
}

double trace_product(const RealMat& a, const std::vector<Triplet>& sp,
                     const RealMat& g) {
  // Tr[a . g] with a given either sparsely or densely.
  if (!sp.empty()) {
    double s = 0.0;
    for (const auto& t : sp) s += t.v * g(t.c, t.r);
    return s;
  }
  return (a.array() * g.transpose().array()).sum();
}

// Largest step alpha with S + alpha * dS staying PSD, via the Cholesky
// factor L of S.
double max_step(const Eigen::LLT<RealMat>& llt, const RealMat& dS) {
  const RealMat y = llt.matrixL().solve(dS);
  const RealMat t = llt.matrixL().solve(y.transpose());
  Eigen::SelfAdjointEigenSolver<RealMat> es(0.5 * (t + t.transpose()),
                                            Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-13) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

HermitianOperator recover_dual(const LoweredBlock& lb, const RealMat& x_real) {
  if (!lb.embedded) {
    return HermitianOperator(x_real.cast<Cplx>(), 1e-6);
  }
  const int d = lb.m / 2;
  const RealMat re = x_real.topLeftCorner(d, d) + x_real.bottomRightCorner(d, d);
  const RealMat im = x_real.bottomLeftCorner(d, d) - x_real.topRightCorner(d, d);
  Mat out = re.cast<Cplx>() + Cplx(0, 1) * im.cast<Cplx>();
  return HermitianOperator(std::move(out), 1e-6);
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  const int n = problem.n_vars;
  const int me = static_cast<int>(problem.equalities.size());
  if (n <= 0 || problem.blocks.empty()) {
    fail(ErrorKind::InvalidArgument, "SDP needs variables and blocks");
  }
  if (problem.objective.size() != n) {
    fail(ErrorKind::InvalidArgument, "objective size mismatch");
  }

  std::vector<LoweredBlock> blocks;
  blocks.reserve(problem.blocks.size());
  for (const auto& b : problem.blocks) blocks.push_back(lower_block(b));
  const int nb = static_cast<int>(blocks.size());

  RealMat eq_rows(me, n);
  RealVec eq_rhs(me);
  for (int j = 0; j < me; ++j) {
    eq_rows.row(j) = problem.equalities[j].first.transpose();
    eq_rhs(j) = problem.equalities[j].second;
  }

  const RealVec& c = problem.objective;
  double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  int m_total = 0;
  for (const auto& lb : blocks) {
    m_total += lb.m;
    scale = std::max(scale, lb.B.cwiseAbs().maxCoeff());
  }
  const double init = std::max(10.0, 2.0 * scale);

  RealVec x = RealVec::Zero(n);
  RealVec mu = RealVec::Zero(me);
  std::vector<RealMat> S, X;
  for (const auto& lb : blocks) {
    S.push_back(init * RealMat::Identity(lb.m, lb.m));
    X.push_back(init * RealMat::Identity(lb.m, lb.m));
  }

  SdpSolution sol;
  sol.x = x;
  int stall = 0;
  const double tau = 0.98;

  auto finalize = [&problem](SdpSolution s) {
    if (problem.sense < 0) {
      s.primal_value = -s.primal_value;
      s.dual_value = -s.dual_value;
    }
    return s;
  };

  std::vector<RealMat> Rp(nb), Sinv(nb), dS_aff(nb), dX_aff(nb), dS(nb), dX(nb);
  std::vector<Eigen::LLT<RealMat>> Sllt(nb);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // Residuals.
    double primal_infeas = 0.0;
    for (int k = 0; k < nb; ++k) {
      const auto& lb = blocks[k];
      RealMat ax = -lb.B;
      for (size_t j = 0; j < lb.vars.size(); ++j) ax += x(lb.vars[j]) * lb.A[j];
      Rp[k] = ax - S[k];
      primal_infeas = std::max(primal_infeas, Rp[k].cwiseAbs().maxCoeff());
    }
    RealVec rd = c;
    for (int k = 0; k < nb; ++k) {
      const auto& lb = blocks[k];
      for (size_t j = 0; j < lb.vars.size(); ++j) {
        rd(lb.vars[j]) += trace_product(lb.A[j], lb.sparse[j], X[k]);
      }
    }
    if (me > 0) rd -= eq_rows.transpose() * mu;
    RealVec re = eq_rhs;
    if (me > 0) re -= eq_rows * x;

    double gap_inner = 0.0;
    for (int k = 0; k < nb; ++k) gap_inner += (X[k].array() * S[k].array()).sum();
    const double nu = gap_inner / m_total;

    const double primal_value = c.dot(x);
    double dual_value = me > 0 ? mu.dot(eq_rhs) : 0.0;
    for (int k = 0; k < nb; ++k) {
      dual_value -= (blocks[k].B.array() * X[k].array()).sum();
    }

    const double pf = primal_infeas / (1.0 + scale);
    const double df = rd.cwiseAbs().maxCoeff() / (1.0 + scale);
    const double ef = me > 0 ? re.cwiseAbs().maxCoeff() / (1.0 + scale) : 0.0;
    const double gap = std::abs(dual_value - primal_value);

    sol.x = x;
    sol.primal_value = primal_value + problem.objective_constant;
    sol.dual_value = dual_value + problem.objective_constant;
    sol.gap = gap;
    sol.iterations = iter;

    if (options.check_weak_duality && pf < options.feas_tol &&
        df < options.feas_tol && dual_value < primal_value - 1e-6 * (1.0 + gap)) {
      fail(ErrorKind::NumericalFailure, "weak duality violated at iterate");
    }

    if (pf <= options.feas_tol && df <= options.feas_tol &&
        ef <= options.feas_tol &&
        gap <= options.gap_tol * (1.0 + std::abs(primal_value))) {
      sol.status = SdpStatus::Optimal;
      for (int k = 0; k < nb; ++k) {
        sol.dual_blocks.push_back(recover_dual(blocks[k], X[k]));
      }
      return finalize(sol);
    }
    if (primal_value > 1e12 && pf <= options.feas_tol) {
      sol.status = SdpStatus::Unbounded;
      return finalize(sol);
    }
    if (dual_value < -1e12 && df <= options.feas_tol) {
      sol.status = SdpStatus::Infeasible;
      return finalize(sol);
    }

    // Schur complement M_ij = sum_k Tr[A_i X A_j S^{-1}].
    RealMat kkt = RealMat::Zero(n + me, n + me);
    for (int k = 0; k < nb; ++k) {
      const auto& lb = blocks[k];
      Sllt[k].compute(S[k]);
      if (Sllt[k].info() != Eigen::Success) {
        fail(ErrorKind::NumericalFailure, "slack lost positive definiteness");
      }
      Sinv[k] = Sllt[k].solve(RealMat::Identity(lb.m, lb.m));
      for (size_t j = 0; j < lb.vars.size(); ++j) {
        const RealMat g = X[k] * (lb.A[j] * Sinv[k]);
        for (size_t i = 0; i < lb.vars.size(); ++i) {
          kkt(lb.vars[i], lb.vars[j]) += trace_product(lb.A[i], lb.sparse[i], g);
        }
      }
    }
    {
      RealMat m_sym =
          0.5 * (kkt.topLeftCorner(n, n) + kkt.topLeftCorner(n, n).transpose());
      kkt.topLeftCorner(n, n) = m_sym;
      for (int i = 0; i < n; ++i) kkt(i, i) += 1e-13 * (1.0 + m_sym(i, i));
    }
    if (me > 0) {
      kkt.block(0, n, n, me) = eq_rows.transpose();
      kkt.block(n, 0, me, n) = eq_rows;
    }
    Eigen::ColPivHouseholderQR<RealMat> kkt_fact(kkt);

    auto solve_direction = [&](const std::vector<RealMat>& K,
                               std::vector<RealMat>& dS_out,
                               std::vector<RealMat>& dX_out, RealVec& dx_out,
                               RealVec& dmu_out) {
      RealVec rhs(n + me);
      rhs.head(n) = rd;
      if (me > 0) rhs.tail(me) = re;
      for (int k = 0; k < nb; ++k) {
        const auto& lb = blocks[k];
        const RealMat h = (K[k] - X[k] * Rp[k]) * Sinv[k];
        for (size_t i = 0; i < lb.vars.size(); ++i) {
          rhs(lb.vars[i]) += trace_product(lb.A[i], lb.sparse[i], h);
        }
      }
      const RealVec step = kkt_fact.solve(rhs);
      dx_out = step.head(n);
      dmu_out = step.tail(me);
      for (int k = 0; k < nb; ++k) {
        const auto& lb = blocks[k];
        RealMat ds = Rp[k];
        for (size_t j = 0; j < lb.vars.size(); ++j) {
          ds += dx_out(lb.vars[j]) * lb.A[j];
        }
        RealMat dxm = (K[k] - X[k] * ds) * Sinv[k];
        dS_out[k] = ds;
        dX_out[k] = 0.5 * (dxm + dxm.transpose());
      }
    };

    // Predictor.
    std::vector<RealMat> K(nb);
    for (int k = 0; k < nb; ++k) K[k] = -X[k] * S[k];
    RealVec dx_a(n), dmu_a(me);
    solve_direction(K, dS_aff, dX_aff, dx_a, dmu_a);

    double ap_aff = 1.0, ad_aff = 1.0;
    for (int k = 0; k < nb; ++k) {
      ap_aff = std::min(ap_aff, tau * max_step(Sllt[k], dS_aff[k]));
      Eigen::LLT<RealMat> xllt(X[k]);
      ad_aff = std::min(ad_aff, tau * max_step(xllt, dX_aff[k]));
    }
    double nu_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      nu_aff += ((X[k] + ad_aff * dX_aff[k]).array() *
                 (S[k] + ap_aff * dS_aff[k]).array())
                    .sum();
    }
    nu_aff /= m_total;
    double sigma = std::pow(std::max(0.0, nu_aff / nu), 3);
    sigma = std::min(0.99, std::max(1e-8, sigma));

    // Corrector.
    for (int k = 0; k < nb; ++k) {
      K[k] = sigma * nu * RealMat::Identity(blocks[k].m, blocks[k].m) -
             X[k] * S[k] - dX_aff[k] * dS_aff[k];
    }
    RealVec dx(n), dmu(me);
    solve_direction(K, dS, dX, dx, dmu);

    double ap = 1.0, ad = 1.0;
    for (int k = 0; k < nb; ++k) {
      ap = std::min(ap, tau * max_step(Sllt[k], dS[k]));
      Eigen::LLT<RealMat> xllt(X[k]);
      ad = std::min(ad, tau * max_step(xllt, dX[k]));
    }

    x += ap * dx;
    if (me > 0) mu += ad * dmu;
    for (int k = 0; k < nb; ++k) {
      S[k] += ap * dS[k];
      X[k] += ad * dX[k];
      S[k] = 0.5 * (S[k] + S[k].transpose().eval());
      X[k] = 0.5 * (X[k] + X[k].transpose().eval());
    }

    if (ap < 1e-9 && ad < 1e-9) {
      ++stall;
      if (stall >= 5) {
        std::ostringstream msg;
        msg << "interior-point iteration stalled (iter " << iter
            << ", primal resid " << pf << ", dual resid " << df << ", gap "
            << gap << ")";
        fail(ErrorKind::NumericalFailure, msg.str());
      }
    } else {
      stall = 0;
    }
  }

  sol.x = x;
  sol.status = SdpStatus::MaxIter;
  sol.message = "iteration limit reached";
  for (size_t k = 0; k < blocks.size(); ++k) {
    sol.dual_blocks.push_back(recover_dual(blocks[k], X[k]));
  }
  return finalize(sol);
}

// ---- builder --------------------------------------------------------------

MatrixExpr& MatrixExpr::add_const(const Mat& c) {
  constant_ += c;
  return *this;
}

MatrixExpr& MatrixExpr::add_term(int var, const Mat& coeff) {
  auto it = coeffs_.find(var);
  if (it == coeffs_.end()) {
    coeffs_.emplace(var, coeff);
  } else {
    it->second += coeff;
  }
  return *this;
}

MatrixExpr& MatrixExpr::operator+=(const MatrixExpr& other) {
  if (other.dim_ != dim_) fail(ErrorKind::DimensionMismatch, "expr dims");
  constant_ += other.constant_;
  for (const auto& [v, m] : other.coeffs_) add_term(v, m);
  return *this;
}

MatrixExpr MatrixExpr::operator-() const {
  MatrixExpr out(dim_);
  out.constant_ = -constant_;
  for (const auto& [v, m] : coeffs_) out.coeffs_.emplace(v, -m);
  return out;
}

MatrixExpr block2x2(const MatrixExpr& e11, const MatrixExpr& e12,
                    const MatrixExpr& e22) {
  const int d = e11.dim();
  if (e12.dim() != d || e22.dim() != d) {
    fail(ErrorKind::DimensionMismatch, "block2x2 dims");
  }
  MatrixExpr out(2 * d);
  auto place = [&](const MatrixExpr& e, int br, int bc) {
    Mat c = Mat::Zero(2 * d, 2 * d);
    c.block(br * d, bc * d, d, d) = e.constant();
    if (br != bc) c.block(bc * d, br * d, d, d) = e.constant().adjoint();
    out.add_const(c);
    for (const auto& [v, m] : e.coeffs()) {
      Mat cm = Mat::Zero(2 * d, 2 * d);
      cm.block(br * d, bc * d, d, d) = m;
      if (br != bc) cm.block(bc * d, br * d, d, d) = m.adjoint();
      out.add_term(v, cm);
    }
  };
  place(e11, 0, 0);
  place(e12, 0, 1);
  place(e22, 1, 1);
  return out;
}

int SdpBuilder::add_scalar() { return n_vars_++; }

SdpBuilder::HermVar SdpBuilder::add_hermitian(int d) {
  HermVar v{n_vars_, d};
  n_vars_ += d * d;
  return v;
}

const std::vector<HermitianOperator>& SdpBuilder::basis(int d) const {
  auto it = basis_cache_.find(d);
  if (it == basis_cache_.end()) {
    it = basis_cache_.emplace(d, hermitian_basis(d)).first;
  }
  return it->second;
}

MatrixExpr SdpBuilder::expr(const HermVar& v) const {
  MatrixExpr e(v.dim);
  const auto& b = basis(v.dim);
  for (size_t i = 0; i < b.size(); ++i) {
    e.add_term(v.offset + static_cast<int>(i), b[i].mat());
  }
  return e;
}

MatrixExpr SdpBuilder::scaled_identity(int var, int d) {
  MatrixExpr e(d);
  e.add_term(var, Mat::Identity(d, d));
  return e;
}

LinExpr SdpBuilder::inner(const Mat& h, const HermVar& v) const {
  LinExpr e;
  const auto& b = basis(v.dim);
  for (size_t i = 0; i < b.size(); ++i) {
    const double c = (h * b[i].mat()).trace().real();
    if (c != 0.0) e.add(v.offset + static_cast<int>(i), c);
  }
  return e;
}

LinExpr SdpBuilder::trace(const HermVar& v) const {
  LinExpr e;
  for (int i = 0; i < v.dim; ++i) e.add(v.offset + i, 1.0);
  return e;
}

void SdpBuilder::require_psd(const MatrixExpr& e) {
  HermBlockConstraint blk;
  blk.constant = HermitianOperator(-e.constant(), 1e-8);
  for (const auto& [v, m] : e.coeffs()) {
    blk.vars.push_back(v);
    blk.coeffs.emplace_back(m, 1e-8);
  }
  block_constraints_.push_back(std::move(blk));
}

void SdpBuilder::require_eq(const LinExpr& e, double rhs) {
  equalities_.emplace_back(e, rhs - e.constant);
}

void SdpBuilder::maximize(const LinExpr& objective) {
  objective_ = objective.coeffs;
  objective_constant_ = objective.constant;
}

void SdpBuilder::minimize(const LinExpr& objective) {
  objective_.clear();
  for (const auto& [v, c] : objective.coeffs) objective_[v] = -c;
  objective_constant_ = -objective.constant;
  sense_ = -1;
}

RealVec SdpBuilder::dense_objective() const {
  RealVec c = RealVec::Zero(n_vars_);
  for (const auto& [v, val] : objective_) c(v) = val;
  return c;
}

SdpProblem SdpBuilder::build() const {
  SdpProblem p;
  p.n_vars = n_vars_;
  p.objective = dense_objective();
  p.objective_constant = objective_constant_;
  p.sense = sense_;
  p.blocks = block_constraints_;
  for (const auto& [e, rhs] : equalities_) {
    RealVec row = RealVec::Zero(n_vars_);
    for (const auto& [v, c] : e.coeffs) row(v) = c;
    p.equalities.emplace_back(row, rhs);
  }
  return p;
}

HermitianOperator SdpBuilder::value(const HermVar& v, const RealVec& x) const {
  Mat out = Mat::Zero(v.dim, v.dim);
  const auto& b = basis(v.dim);
  for (size_t i = 0; i < b.size(); ++i) {
    out += x(v.offset + static_cast<int>(i)) * b[i].mat();
  }
  return HermitianOperator(std::move(out));
}

}  // namespace pexc
