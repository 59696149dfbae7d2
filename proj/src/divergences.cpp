#include "pexc/divergences.hpp"

#include <cmath>

#include "pexc/sdp.hpp"

namespace pexc {

namespace {

bool effectively_zero(const HermitianOperator& h) {
  return h.mat().cwiseAbs().maxCoeff() < 1e-14;
}

}  // namespace

bool support_contained(const HermitianOperator& gamma,
                       const HermitianOperator& sigma, double tol) {
  const HermitianOperator pg = support_projector(gamma);
  const HermitianOperator ps = support_projector(sigma);
  const Mat defect =
      (Mat::Identity(sigma.dim(), sigma.dim()) - ps.mat()) * pg.mat();
  Eigen::JacobiSVD<Mat> svd(defect);
  const double top = svd.singularValues().size() > 0
                         ? svd.singularValues()(0)
                         : 0.0;
  return top <= tol;
}

DivergenceValue umegaki(const DensityOperator& rho,
                        const HermitianOperator& sigma) {
  if (!support_contained(rho.op(), sigma)) return DivergenceValue::infinite();
  const HermitianOperator log_rho = log_on_support(rho.op());
  const HermitianOperator log_sigma = log_on_support(sigma);
  const double v =
      (rho.mat() * (log_rho.mat() - log_sigma.mat())).trace().real();
  return DivergenceValue::finite(v);
}

double sandwiched_quasi(const HermitianOperator& gamma,
                        const HermitianOperator& sigma, double alpha) {
  if (alpha <= 1.0) fail(ErrorKind::InvalidArgument, "alpha must exceed 1");
  if (effectively_zero(gamma)) {
    fail(ErrorKind::ZeroOperator, "first argument is zero");
  }
  if (!support_contained(gamma, sigma)) return kInf;
  const double p = (1.0 - alpha) / (2.0 * alpha);
  const HermitianOperator sp = pow_on_support(sigma, p);
  const HermitianOperator inner(sp.mat() * gamma.mat() * sp.mat(), 1e-8);
  const auto es = eig(inner);
  double sum = 0.0;
  for (int i = 0; i < es.values.size(); ++i) {
    sum += std::pow(std::abs(es.values(i)), alpha);
  }
  return sum;
}

DivergenceValue sandwiched_extended(const HermitianOperator& gamma,
                                    const HermitianOperator& sigma,
                                    double alpha) {
  const double q = sandwiched_quasi(gamma, sigma, alpha);
  if (std::isinf(q)) return DivergenceValue::infinite();
  return DivergenceValue::finite(std::log(q) / (alpha - 1.0));
}

DivergenceValue geometric_renyi(const DensityOperator& rho,
                                const HermitianOperator& sigma, double alpha) {
  if (alpha <= 0.0 || alpha == 1.0 || alpha > 2.0) {
    fail(ErrorKind::InvalidArgument, "alpha must lie in (0,1) or (1,2]");
  }
  if (alpha > 1.0 && !support_contained(rho.op(), sigma)) {
    return DivergenceValue::infinite();
  }
  const HermitianOperator sinv_half = pow_on_support(sigma, -0.5);
  const HermitianOperator inner(
      sinv_half.mat() * rho.mat() * sinv_half.mat(), 1e-8);
  const HermitianOperator inner_pow = pow_on_support(inner, alpha);
  const double tr = (sigma.mat() * inner_pow.mat()).trace().real();
  if (tr <= 0.0) return DivergenceValue::infinite(false);
  return DivergenceValue::finite(std::log(tr) / (alpha - 1.0));
}

DivergenceValue belavkin_staszewski(const DensityOperator& rho,
                                    const HermitianOperator& sigma) {
  if (!support_contained(rho.op(), sigma)) return DivergenceValue::infinite();
  const HermitianOperator rho_half = pow_on_support(rho.op(), 0.5);
  const HermitianOperator sigma_inv = pow_on_support(sigma, -1.0);
  const HermitianOperator inner(
      rho_half.mat() * sigma_inv.mat() * rho_half.mat(), 1e-8);
  const HermitianOperator log_inner = log_on_support(inner);
  const double v = (rho.mat() * log_inner.mat()).trace().real();
  return DivergenceValue::finite(v);
}

DivergenceValue max_extended(const HermitianOperator& gamma,
                             const HermitianOperator& sigma) {
  if (!support_contained(gamma, sigma)) return DivergenceValue::infinite();
  const HermitianOperator sinv_half = pow_on_support(sigma, -0.5);
  const HermitianOperator inner(
      sinv_half.mat() * gamma.mat() * sinv_half.mat(), 1e-8);
  return DivergenceValue::finite(std::log(max_abs_eigenvalue(inner)));
}

DivergenceValue dmax_lower(const HermitianOperator& gamma,
                           const HermitianOperator& sigma) {
  // gamma <= l sigma is infeasible whenever gamma has weight sticking out
  // of supp(sigma) with a positive component.
  const HermitianOperator ps = support_projector(sigma);
  const Mat q = Mat::Identity(sigma.dim(), sigma.dim()) - ps.mat();
  const HermitianOperator off(q * gamma.mat() * q, 1e-8);
  const double off_scale = off.mat().cwiseAbs().maxCoeff();
  const double cross_scale =
      (q * gamma.mat() * ps.mat()).cwiseAbs().maxCoeff();
  if (off_scale > 1e-8 || cross_scale > 1e-8) {
    return DivergenceValue::infinite();
  }
  const HermitianOperator sinv_half = pow_on_support(sigma, -0.5);
  const HermitianOperator inner(
      sinv_half.mat() * gamma.mat() * sinv_half.mat(), 1e-8);
  const double lmax = eig(inner).values.maxCoeff();
  if (lmax <= 0.0) {
    fail(ErrorKind::NotApplicable,
         "scaled operator has no positive part; no positive multiple bounds "
         "it from below");
  }
  return DivergenceValue::finite(std::log(lmax));
}

DivergenceValue hypothesis_testing_extended(const HermitianOperator& tau,
                                            const HermitianOperator& sigma,
                                            double eps) {
  if (eps < 0.0 || eps > 1.0) {
    fail(ErrorKind::InvalidArgument, "eps must lie in [0,1]");
  }
  if (std::abs(tau.trace() - 1.0) > 1e-9) {
    fail(ErrorKind::InvalidArgument, "tau must have unit trace");
  }
  const int d = tau.dim();
  SdpBuilder b;
  const auto lambda = b.add_hermitian(d);
  b.require_psd(b.expr(lambda));
  b.require_psd(MatrixExpr(Mat(Mat::Identity(d, d))) - b.expr(lambda));
  {
    // Tr[Lambda tau] >= 1 - eps as a 1x1 block.
    LinExpr t = b.inner(tau.mat(), lambda);
    MatrixExpr scalar(1);
    scalar.add_const(Mat::Constant(1, 1, -(1.0 - eps)));
    for (const auto& [v, c] : t.coeffs) {
      scalar.add_term(v, Mat::Constant(1, 1, c));
    }
    b.require_psd(scalar);
  }
  b.minimize(b.inner(sigma.mat(), lambda));
  const SdpSolution sol = solve(b.build());
  if (sol.status != SdpStatus::Optimal) {
    fail(ErrorKind::SdpFailure,
         "hypothesis-testing SDP did not reach optimality: " +
             to_string(sol.status));
  }
  const double opt = sol.primal_value;
  if (opt <= 1e-12) return DivergenceValue::infinite(false);
  return DivergenceValue::finite(-std::log(opt));
}

DivergenceValue petz_renyi(const DensityOperator& rho,
                           const HermitianOperator& sigma, double alpha) {
  if (alpha <= 0.0 || alpha == 1.0) {
    fail(ErrorKind::InvalidArgument, "alpha must lie in (0,1) or (1,inf)");
  }
  if (alpha > 1.0 && !support_contained(rho.op(), sigma)) {
    return DivergenceValue::infinite();
  }
  const HermitianOperator ra = pow_on_support(rho.op(), alpha);
  const HermitianOperator s1a = pow_on_support(sigma, 1.0 - alpha);
  const double tr = (ra.mat() * s1a.mat()).trace().real();
  if (tr <= 0.0) return DivergenceValue::infinite(false);
  return DivergenceValue::finite(std::log(tr) / (alpha - 1.0));
}

namespace {

// Projector onto {psi in H_B : phi (x) psi in supp(rho_ab) for every phi in
// supp(sigma)}, the maximal subspace admitting a finite value for alpha > 1.
HermitianOperator lautum_projector(const HermitianOperator& rho_ab,
                                   const DensityOperator& sigma_a, int d_a,
                                   int d_b) {
  const HermitianOperator p_ab = support_projector(rho_ab);
  const Mat q_ab = Mat::Identity(d_a * d_b, d_a * d_b) - p_ab.mat();
  const Mat phi_basis = range_basis(support_projector(sigma_a.op()));
  Mat defect = Mat::Zero(d_b, d_b);
  for (int k = 0; k < phi_basis.cols(); ++k) {
    // C_k: psi -> (I - P)(phi_k (x) psi); accumulate C_k^dag C_k.
    Mat ck(d_a * d_b, d_b);
    for (int col = 0; col < d_b; ++col) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d_a * d_b);
      for (int a = 0; a < d_a; ++a) v(a * d_b + col) = phi_basis(a, k);
      ck.col(col) = q_ab * v;
    }
    defect += ck.adjoint() * ck;
  }
  HermitianOperator defect_h(std::move(defect), 1e-8);
  const auto es = eig(defect_h);
  Mat proj = Mat::Zero(d_b, d_b);
  for (int i = 0; i < d_b; ++i) {
    if (es.values(i) < 1e-9) {
      proj += es.vectors.col(i) * es.vectors.col(i).adjoint();
    }
  }
  return HermitianOperator(std::move(proj));
}

}  // namespace

PetzLautumResult petz_lautum(const HermitianOperator& rho_ab,
                             const DensityOperator& sigma_a, int d_a, int d_b,
                             double alpha) {
  if (rho_ab.dim() != d_a * d_b) {
    fail(ErrorKind::DimensionMismatch, "bipartite dims do not factorize");
  }
  if (alpha <= 0.0 || alpha == 1.0) {
    fail(ErrorKind::InvalidArgument, "alpha must lie in (0,1) or (1,inf)");
  }
  const HermitianOperator sa = pow_on_support(sigma_a.op(), alpha);
  const HermitianOperator r1a = pow_on_support(rho_ab, 1.0 - alpha);
  const Mat weighted =
      kron(sa.mat(), Mat(Mat::Identity(d_b, d_b))) * r1a.mat();
  HermitianOperator core(partial_trace(weighted, d_a, d_b, 0), 1e-7);

  if (alpha > 1.0) {
    const HermitianOperator proj = lautum_projector(rho_ab, sigma_a, d_a, d_b);
    if (proj.mat().cwiseAbs().maxCoeff() < 1e-9) {
      return {DivergenceValue::infinite(), std::nullopt};
    }
    core = HermitianOperator(proj.mat() * core.mat() * proj.mat(), 1e-7);
  }
  const HermitianOperator powered = pow_on_support(core, 1.0 / (1.0 - alpha));
  const double tr = powered.trace();
  if (tr <= 0.0) return {DivergenceValue::infinite(false), std::nullopt};
  const DensityOperator minimizer(
      HermitianOperator(powered.mat() / tr, 1e-7), 1e-6);
  return {DivergenceValue::finite(-std::log(tr)), minimizer};
}

double petz_lautum_regularized(const HermitianOperator& rho_ab,
                               const DensityOperator& sigma_a, int d_a,
                               int d_b, double alpha, double eps) {
  const int d = d_a * d_b;
  const HermitianOperator reg(rho_ab.mat() + eps * Mat::Identity(d, d));
  const HermitianOperator sa = pow_on_support(sigma_a.op(), alpha);
  const HermitianOperator r1a = pow_on_support(reg, 1.0 - alpha);
  const Mat weighted =
      kron(sa.mat(), Mat(Mat::Identity(d_b, d_b))) * r1a.mat();
  const HermitianOperator core(partial_trace(weighted, d_a, d_b, 0), 1e-7);
  const HermitianOperator powered = pow_on_support(core, 1.0 / (1.0 - alpha));
  return -std::log(powered.trace());
}

}  // namespace pexc
