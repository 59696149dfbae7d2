#include "pexc/radii.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pexc/sdp.hpp"

namespace pexc {

SimplexPoint::SimplexPoint(RealVec w) : weights(std::move(w)) {
  double sum = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights(i) < -1e-12) {
      fail(ErrorKind::InvalidArgument, "negative simplex weight");
    }
    weights(i) = std::max(0.0, weights(i));
    sum += weights(i);
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    fail(ErrorKind::InvalidArgument, "simplex weights do not sum to 1");
  }
}

SimplexPoint SimplexPoint::barycenter(int r) {
  return SimplexPoint(RealVec::Constant(r, 1.0 / r));
}

RealVec project_simplex(const RealVec& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    const double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  RealVec out(n);
  for (int i = 0; i < n; ++i) out(i) = std::max(0.0, v(i) - theta);
  return out;
}

SimplexAscentResult maximize_over_simplex(
    int r, const std::function<double(const RealVec&, RealVec*)>& fn,
    uint64_t seed, int max_iterations, double grad_tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<RealVec> starts;
  starts.push_back(RealVec::Constant(r, 1.0 / r));
  for (int k = 0; k < 5; ++k) {
    RealVec s(r);
    for (int i = 0; i < r; ++i) s(i) = -std::log(unif(rng) + 1e-300);
    s /= s.sum();
    starts.push_back(0.9 * s + 0.1 * RealVec::Constant(r, 1.0 / r));
  }

  SimplexAscentResult best{starts[0], -kInf};
  for (const auto& start : starts) {
    RealVec s = start;
    RealVec g(r);
    double f = fn(s, &g);
    double t = 1.0;
    for (int iter = 0; iter < max_iterations; ++iter) {
      if ((project_simplex(s + g) - s).cwiseAbs().maxCoeff() <= grad_tol) break;
      bool moved = false;
      while (t > 1e-14) {
        const RealVec cand = project_simplex(s + t * g);
        const double fc = fn(cand, nullptr);
        if (fc >= f + 1e-4 * g.dot(cand - s)) {
          s = cand;
          f = fc;
          fn(s, &g);
          t = std::min(t * 1.3, 1e6);
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    if (f > best.value) best = {s, f};
  }
  return best;
}

RadiusResult classical_chernoff(const std::vector<RealVec>& dists,
                                uint64_t seed) {
  const int r = static_cast<int>(dists.size());
  if (r < 1) fail(ErrorKind::InvalidArgument, "empty tuple");
  const int dy = static_cast<int>(dists[0].size());
  for (const auto& d : dists) {
    if (d.size() != dy) fail(ErrorKind::DimensionMismatch, "alphabet sizes");
    if (d.minCoeff() < -1e-15) {
      fail(ErrorKind::InvalidArgument, "negative probability entry");
    }
  }
  std::vector<int> common;
  for (int y = 0; y < dy; ++y) {
    bool in_all = true;
    for (const auto& d : dists) in_all = in_all && d(y) > 1e-15;
    if (in_all) common.push_back(y);
  }
  RadiusResult out;
  out.method = RadiusMethod::SimplexAscent;
  if (common.empty()) {
    out.value = kInf;
    out.optimal_weights = SimplexPoint::barycenter(r);
    return out;
  }
  // f(s) = -ln sum_y exp(sum_x s_x ln p_{y|x}), concave in s.
  RealMat logp(r, static_cast<int>(common.size()));
  for (int x = 0; x < r; ++x) {
    for (size_t j = 0; j < common.size(); ++j) {
      logp(x, j) = std::log(dists[x](common[j]));
    }
  }
  auto fn = [&](const RealVec& s, RealVec* grad) {
    RealVec z = logp.transpose() * s;
    const double zmax = z.maxCoeff();
    RealVec w = (z.array() - zmax).exp();
    const double total = w.sum();
    if (grad) *grad = -(logp * w) / total;
    return -(zmax + std::log(total));
  };
  const auto res = maximize_over_simplex(r, fn, seed);
  out.value = res.value;
  out.optimal_weights = SimplexPoint(project_simplex(res.s));
  return out;
}

namespace {

struct CompressedTuple {
  Mat basis;                // d x k, columns span the common support
  std::vector<Mat> logs;    // W^dag ln(rho_x) W, each k x k
  int k = 0;
};

CompressedTuple compress_tuple(const std::vector<DensityOperator>& states) {
  std::vector<HermitianOperator> ops;
  ops.reserve(states.size());
  for (const auto& s : states) ops.push_back(s.op());
  const HermitianOperator pi = intersection_projector(ops);
  CompressedTuple ct;
  ct.basis = range_basis(pi);
  ct.k = static_cast<int>(ct.basis.cols());
  if (ct.k == 0) return ct;
  for (const auto& s : states) {
    ct.logs.push_back(compress(log_on_support(s.op()).mat(), ct.basis));
  }
  return ct;
}

Mat herm_exp(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint().eval()));
  return es.eigenvectors() *
         es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

Mat herm_log(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint().eval()));
  return es.eigenvectors() *
         es.eigenvalues().array().max(1e-300).log().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

RealVec softmax(const RealVec& v, double beta) {
  RealVec w = (beta * (v.array() - v.maxCoeff())).exp();
  return w / w.sum();
}

}  // namespace

RadiusResult log_euclidean_chernoff(const std::vector<DensityOperator>& states,
                                    uint64_t seed) {
  const int r = static_cast<int>(states.size());
  const CompressedTuple ct = compress_tuple(states);
  RadiusResult out;
  out.method = RadiusMethod::SimplexAscent;
  if (ct.k == 0) {
    out.value = kInf;
    out.optimal_weights = SimplexPoint::barycenter(r);
    return out;
  }
  auto fn = [&](const RealVec& s, RealVec* grad) {
    Mat m = Mat::Zero(ct.k, ct.k);
    for (int x = 0; x < r; ++x) m += s(x) * ct.logs[x];
    const Mat e = herm_exp(m);
    const double tr = e.trace().real();
    if (grad) {
      for (int x = 0; x < r; ++x) {
        (*grad)(x) = -(e * ct.logs[x]).trace().real() / tr;
      }
    }
    return -std::log(tr);
  };
  const auto res = maximize_over_simplex(r, fn, seed);
  out.value = res.value;
  out.optimal_weights = SimplexPoint(project_simplex(res.s));
  {
    Mat m = Mat::Zero(ct.k, ct.k);
    for (int x = 0; x < r; ++x) m += res.s(x) * ct.logs[x];
    const Mat e = herm_exp(m);
    const Mat center = ct.basis * (e / e.trace().real()) * ct.basis.adjoint();
    out.optimal_center = HermitianOperator(center, 1e-8);
  }
  return out;
}

KappaResult kappa_sdp(const std::vector<DensityOperator>& states) {
  const int r = static_cast<int>(states.size());
  if (r < 2) fail(ErrorKind::InvalidArgument, "kappa needs r >= 2");
  const int d = states[0].dim();
  // Feasible gamma is supported inside every supp(rho_x); a trivial
  // intersection forces gamma = 0.
  std::vector<HermitianOperator> ops;
  for (const auto& s : states) ops.push_back(s.op());
  const HermitianOperator pi = intersection_projector(ops);
  if (pi.mat().cwiseAbs().maxCoeff() < 1e-9) {
    return {0.0, kInf};
  }

  SdpBuilder b;
  const auto gamma = b.add_hermitian(d);
  for (const auto& s : states) {
    b.require_psd(MatrixExpr(Mat(s.mat())) - b.expr(gamma));
    b.require_psd(MatrixExpr(Mat(s.mat())) + b.expr(gamma));
  }
  b.maximize(b.trace(gamma));
  const SdpSolution sol = solve(b.build());
  if (sol.status != SdpStatus::Optimal) {
    fail(ErrorKind::SdpFailure,
         "kappa SDP did not reach optimality: " + to_string(sol.status));
  }
  const double kappa = std::clamp(sol.primal_value, 0.0, 1.0);
  if (kappa <= 1e-12) return {0.0, kInf};
  return {kappa, -std::log(kappa)};
}

namespace {

// inf_tau max_x D(tau || rho_x) over states supported in the common
// support, by entropic mirror descent on a softmax-smoothed maximum.
// Divergence evaluations happen in the full space; only the parameterization
// is compressed.
RadiusResult center_first_descent(
    LeftDivergence divergence, const std::vector<DensityOperator>& states,
    const MinimaxOptions& options) {
  const int r = static_cast<int>(states.size());
  const CompressedTuple ct = compress_tuple(states);
  RadiusResult out;
  out.method = RadiusMethod::SimplexAscent;
  if (ct.k == 0) {
    out.value = kInf;
    out.optimal_weights = SimplexPoint::barycenter(r);
    return out;
  }
  const int k = ct.k;

  auto divergences_at = [&](const Mat& tau_small) {
    RealVec d(r);
    if (divergence == LeftDivergence::Umegaki) {
      const Mat lt = herm_log(tau_small);
      for (int x = 0; x < r; ++x) {
        d(x) = (tau_small * (lt - ct.logs[x])).trace().real();
      }
      return d;
    }
    const Mat tau_full =
        ct.basis * tau_small * ct.basis.adjoint();
    for (int x = 0; x < r; ++x) {
      if (divergence == LeftDivergence::SandwichedAlpha) {
        d(x) = sandwiched_extended(HermitianOperator(tau_full, 1e-7),
                                   states[x].op(), options.alpha)
                   .value;
      } else {
        d(x) = geometric_renyi(
                   DensityOperator(HermitianOperator(tau_full, 1e-7), 1e-6),
                   states[x].op(), options.alpha)
                   .value;
      }
    }
    return d;
  };

  const bool exact_grad = divergence == LeftDivergence::Umegaki;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto basis_k = hermitian_basis(k);

  double best_value = kInf;
  Mat best_tau = Mat::Identity(k, k) / k;
  RealVec best_w = RealVec::Constant(r, 1.0 / r);

  const int restarts = 2;
  for (int restart = 0; restart < restarts; ++restart) {
    Mat logtau = Mat::Zero(k, k);
    if (restart > 0) {
      Mat h(k, k);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) h(i, j) = Cplx(gauss(rng), gauss(rng));
      }
      logtau = 0.3 * (h + h.adjoint().eval());
    }
    for (double beta : {40.0, 400.0, 4000.0, 40000.0}) {
      const int iters = std::max(50, options.iterations / 4);
      for (int t = 0; t < iters; ++t) {
        Mat tau = herm_exp(logtau);
        tau /= tau.trace().real();
        const RealVec dvals = divergences_at(tau);
        const double f = dvals.maxCoeff();
        const RealVec w = softmax(dvals, beta);
        if (f < best_value) {
          best_value = f;
          best_tau = tau;
          best_w = w;
        }
        Mat grad = Mat::Zero(k, k);
        if (exact_grad) {
          const Mat lt = herm_log(tau);
          for (int x = 0; x < r; ++x) grad += w(x) * (lt - ct.logs[x]);
        } else {
          // Finite differences in the unconstrained log parameterization.
          const double h = 1e-5;
          const Mat base_log = logtau;
          auto smoothed = [&](const Mat& l) {
            Mat tt = herm_exp(l);
            tt /= tt.trace().real();
            const RealVec dv = divergences_at(tt);
            const double m = dv.maxCoeff();
            return m + std::log((beta * (dv.array() - m)).exp().sum()) / beta;
          };
          for (const auto& e : basis_k) {
            const double fp = smoothed(base_log + h * e.mat());
            const double fm = smoothed(base_log - h * e.mat());
            grad += ((fp - fm) / (2.0 * h)) * e.mat();
          }
        }
        grad -= (grad.trace() / static_cast<double>(k)) * Mat::Identity(k, k);
        const double gnorm = grad.norm();
        if (gnorm < 1e-12) break;
        const double eta = 0.5 / std::sqrt(static_cast<double>(t) + 1.0);
        logtau -= (eta / std::max(1.0, gnorm)) * grad;
        logtau -= (logtau.trace() / static_cast<double>(k)) *
                  Mat::Identity(k, k);
      }
    }
  }

  out.value = best_value;
  out.optimal_weights = SimplexPoint(project_simplex(best_w));
  out.optimal_center = HermitianOperator(
      ct.basis * best_tau * ct.basis.adjoint(), 1e-8);
  return out;
}

// inf over unit-trace Hermitian tau and l of ln(l) with -l rho_x <= tau <=
// l rho_x, as one SDP. This is the extended left max-radius.
RadiusResult max_radius_center_sdp(const std::vector<DensityOperator>& states) {
  const int r = static_cast<int>(states.size());
  const int d = states[0].dim();
  std::vector<HermitianOperator> ops;
  for (const auto& s : states) ops.push_back(s.op());
  const HermitianOperator pi = intersection_projector(ops);
  RadiusResult out;
  out.method = RadiusMethod::Sdp;
  if (pi.mat().cwiseAbs().maxCoeff() < 1e-9) {
    out.value = kInf;
    out.optimal_weights = SimplexPoint::barycenter(r);
    return out;
  }
  SdpBuilder b;
  const int lam = b.add_scalar();
  const auto tau = b.add_hermitian(d);
  for (const auto& s : states) {
    MatrixExpr scaled(d);
    scaled.add_term(lam, s.mat());
    b.require_psd(scaled - b.expr(tau));
    b.require_psd(scaled + b.expr(tau));
  }
  b.require_eq(b.trace(tau), 1.0);
  LinExpr obj;
  obj.add(lam, 1.0);
  b.minimize(obj);
  const SdpSolution sol = solve(b.build());
  if (sol.status != SdpStatus::Optimal) {
    fail(ErrorKind::SdpFailure,
         "max-radius SDP did not reach optimality: " + to_string(sol.status));
  }
  const double lambda = sol.primal_value;
  out.value = std::log(std::max(lambda, 1e-300));
  out.optimal_center = b.value(tau, sol.x);
  RealVec w(r);
  for (int x = 0; x < r; ++x) {
    const double a = sol.dual_blocks[2 * x].trace();
    const double bb = sol.dual_blocks[2 * x + 1].trace();
    w(x) = std::max(0.0, a + bb);
  }
  if (w.sum() > 1e-12) w /= w.sum();
  else w = RealVec::Constant(r, 1.0 / r);
  out.optimal_weights = SimplexPoint(project_simplex(w));
  return out;
}

// Homogenized form of the same quantity: -ln sup{Tr gamma : -rho_x <=
// gamma <= rho_x}, with weights read off the dual multipliers.
RadiusResult max_radius_weights_sdp(
    const std::vector<DensityOperator>& states) {
  const int r = static_cast<int>(states.size());
  const int d = states[0].dim();
  std::vector<HermitianOperator> ops;
  for (const auto& s : states) ops.push_back(s.op());
  const HermitianOperator pi = intersection_projector(ops);
  RadiusResult out;
  out.method = RadiusMethod::Sdp;
  if (pi.mat().cwiseAbs().maxCoeff() < 1e-9) {
    out.value = kInf;
    out.optimal_weights = SimplexPoint::barycenter(r);
    return out;
  }
  SdpBuilder b;
  const auto gamma = b.add_hermitian(d);
  for (const auto& s : states) {
    b.require_psd(MatrixExpr(Mat(s.mat())) - b.expr(gamma));
    b.require_psd(MatrixExpr(Mat(s.mat())) + b.expr(gamma));
  }
  b.maximize(b.trace(gamma));
  const SdpSolution sol = solve(b.build());
  if (sol.status != SdpStatus::Optimal) {
    fail(ErrorKind::SdpFailure,
         "kappa-form SDP did not reach optimality: " + to_string(sol.status));
  }
  const double kappa = std::clamp(sol.primal_value, 0.0, 1.0);
  out.value = kappa <= 1e-12 ? kInf : -std::log(kappa);
  if (kappa > 1e-12) {
    out.optimal_center =
        HermitianOperator(b.value(gamma, sol.x).mat() / kappa, 1e-7);
  }
  RealVec w(r);
  for (int x = 0; x < r; ++x) {
    const double minus = real_inner(states[x].mat(), sol.dual_blocks[2 * x].mat());
    const double plus =
        real_inner(states[x].mat(), sol.dual_blocks[2 * x + 1].mat());
    w(x) = std::max(0.0, minus + plus);
  }
  if (w.sum() > 1e-12) w /= w.sum();
  else w = RealVec::Constant(r, 1.0 / r);
  out.optimal_weights = SimplexPoint(project_simplex(w));
  return out;
}

}  // namespace

RadiusResult left_radius_minimax(LeftDivergence divergence,
                                 const std::vector<DensityOperator>& states,
                                 MinimaxMode mode,
                                 const MinimaxOptions& options) {
  if (states.empty()) fail(ErrorKind::InvalidArgument, "empty tuple");
  switch (divergence) {
    case LeftDivergence::Umegaki:
      if (mode == MinimaxMode::WeightsFirst) {
        return log_euclidean_chernoff(states, options.seed);
      }
      return center_first_descent(divergence, states, options);
    case LeftDivergence::SandwichedAlpha:
    case LeftDivergence::GeometricAlpha:
      if (mode == MinimaxMode::WeightsFirst) {
        fail(ErrorKind::Unsupported,
             "no closed-form inner minimizer for this divergence");
      }
      return center_first_descent(divergence, states, options);
    case LeftDivergence::Max:
      return mode == MinimaxMode::CenterFirst
                 ? max_radius_center_sdp(states)
                 : max_radius_weights_sdp(states);
  }
  fail(ErrorKind::InvalidArgument, "unknown divergence");
}

}  // namespace pexc
