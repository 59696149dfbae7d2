#include "pexc/exclusion.hpp"

#include <cmath>

#include "pexc/sdp.hpp"

namespace pexc {

namespace {

Povm povm_from_multipliers(std::vector<HermitianOperator> blocks) {
  const int d = blocks[0].dim();
  Mat total = Mat::Zero(d, d);
  for (const auto& b : blocks) total += b.mat();
  // Multipliers sum to the identity only up to solver accuracy; the
  // symmetric correction restores it exactly while preserving positivity.
  const HermitianOperator t(total, 1e-6);
  const HermitianOperator t_inv_half = pow_on_support(t, -0.5);
  std::vector<HermitianOperator> elements;
  elements.reserve(blocks.size());
  for (const auto& b : blocks) {
    elements.emplace_back(t_inv_half.mat() * b.mat() * t_inv_half.mat(), 1e-7);
  }
  return Povm(std::move(elements));
}

}  // namespace

HermitianOperator cq_state_operator(const StateEnsemble& e) {
  const int r = e.size();
  const int d = e.dim();
  Mat out = Mat::Zero(r * d, r * d);
  for (int x = 0; x < r; ++x) {
    out.block(x * d, x * d, d, d) = e.priors()[x] * e.states()[x].mat();
  }
  return HermitianOperator(std::move(out));
}

ExclusionResult state_exclusion_error(const StateEnsemble& e) {
  const int d = e.dim();
  const int r = e.size();
  SdpBuilder b;
  const auto gamma = b.add_hermitian(d);
  for (int x = 0; x < r; ++x) {
    b.require_psd(MatrixExpr(Mat(e.priors()[x] * e.states()[x].mat())) -
                  b.expr(gamma));
  }
  b.maximize(b.trace(gamma));
  const SdpSolution sol = solve(b.build());
  if (sol.status != SdpStatus::Optimal) {
    fail(ErrorKind::SdpFailure,
         "exclusion SDP did not reach optimality: " + to_string(sol.status));
  }
  ExclusionResult out;
  out.dual_gamma = b.value(gamma, sol.x);
  out.povm = povm_from_multipliers(sol.dual_blocks);
  double primal = 0.0;
  for (int x = 0; x < r; ++x) {
    primal += e.priors()[x] *
              (out.povm[x].mat() * e.states()[x].mat()).trace().real();
  }
  const double dual = sol.primal_value;  // certificate side: Tr[gamma]
  if (std::abs(primal - dual) > 1e-6) {
    fail(ErrorKind::SdpFailure,
         "exclusion primal/dual disagree by " + std::to_string(primal - dual));
  }
  out.p_err = std::max(0.0, dual);
  return out;
}

DiscriminationResult state_discrimination(const StateEnsemble& e) {
  const int d = e.dim();
  const int r = e.size();
  SdpBuilder b;
  const auto gamma = b.add_hermitian(d);
  for (int x = 0; x < r; ++x) {
    b.require_psd(b.expr(gamma) -
                  MatrixExpr(Mat(e.priors()[x] * e.states()[x].mat())));
  }
  b.minimize(b.trace(gamma));
  const SdpSolution sol = solve(b.build());
  if (sol.status != SdpStatus::Optimal) {
    fail(ErrorKind::SdpFailure, "discrimination SDP did not reach optimality: " +
                                    to_string(sol.status));
  }
  DiscriminationResult out;
  out.dual_gamma = b.value(gamma, sol.x);
  out.povm = povm_from_multipliers(sol.dual_blocks);
  double success = 0.0;
  for (int x = 0; x < r; ++x) {
    success += e.priors()[x] *
               (out.povm[x].mat() * e.states()[x].mat()).trace().real();
  }
  const double dual_success = sol.primal_value;  // Tr[gamma] at the optimum
  if (std::abs(success - dual_success) > 1e-6) {
    fail(ErrorKind::SdpFailure, "discrimination primal/dual disagree by " +
                                    std::to_string(success - dual_success));
  }
  out.p_err = std::clamp(1.0 - dual_success, 0.0, 1.0);
  return out;
}

double state_discrimination_error(const StateEnsemble& e) {
  return state_discrimination(e).p_err;
}

double hypothesis_testing_characterization(const StateEnsemble& e) {
  const ExclusionResult excl = state_exclusion_error(e);
  if (excl.p_err <= 1e-12) return kInf;  // perfect exclusion
  const double trace_gamma = excl.dual_gamma.trace();
  if (trace_gamma <= 1e-12) return kInf;
  const int r = e.size();
  const Mat tau = excl.dual_gamma.mat() / trace_gamma;
  const Mat pi = Mat::Identity(r, r) / static_cast<double>(r);
  const HermitianOperator test_op(kron(pi, tau), 1e-7);
  const DivergenceValue dh = hypothesis_testing_extended(
      test_op, cq_state_operator(e), 1.0 - 1.0 / r);
  const double expected = -std::log(excl.p_err);
  if (!dh.is_finite() || std::abs(dh.value - expected) > 1e-5) {
    fail(ErrorKind::NumericalFailure,
         "testing-divergence characterization mismatch: " +
             std::to_string(dh.value) + " vs " + std::to_string(expected));
  }
  return dh.value;
}

double discrimination_characterization(const StateEnsemble& e) {
  const DiscriminationResult disc = state_discrimination(e);
  if (disc.p_err <= 1e-12) return kInf;
  const double trace_gamma = disc.dual_gamma.trace();
  const int r = e.size();
  const Mat tau = disc.dual_gamma.mat() / trace_gamma;
  const Mat pi = Mat::Identity(r, r) / static_cast<double>(r);
  const HermitianOperator test_op(kron(pi, tau), 1e-7);
  const DivergenceValue dh = hypothesis_testing_extended(
      test_op, cq_state_operator(e), 1.0 / r);
  const double expected = -std::log(disc.p_err);
  if (!dh.is_finite() || std::abs(dh.value - expected) > 1e-5) {
    fail(ErrorKind::NumericalFailure,
         "discrimination characterization mismatch: " +
             std::to_string(dh.value) + " vs " + std::to_string(expected));
  }
  return dh.value;
}

double classical_exclusion_error(const std::vector<double>& priors,
                                 const std::vector<RealVec>& dists, int n) {
  const int r = static_cast<int>(dists.size());
  const int m = static_cast<int>(dists[0].size());
  double tuples = std::pow(static_cast<double>(m), n);
  if (tuples > static_cast<double>(1 << 22)) {
    fail(ErrorKind::TooLarge, "product alphabet too large");
  }
  const long total = static_cast<long>(std::llround(tuples));
  std::vector<int> digits(n, 0);
  double err = 0.0;
  for (long t = 0; t < total; ++t) {
    double best = kInf;
    for (int x = 0; x < r; ++x) {
      double q = priors[x];
      for (int i = 0; i < n; ++i) q *= dists[x](digits[i]);
      best = std::min(best, q);
    }
    err += best;
    for (int i = 0; i < n; ++i) {
      if (++digits[i] < m) break;
      digits[i] = 0;
    }
  }
  return err;
}

double classical_discrimination_error(const std::vector<double>& priors,
                                      const std::vector<RealVec>& dists,
                                      int n) {
  const int r = static_cast<int>(dists.size());
  const int m = static_cast<int>(dists[0].size());
  double tuples = std::pow(static_cast<double>(m), n);
  if (tuples > static_cast<double>(1 << 22)) {
    fail(ErrorKind::TooLarge, "product alphabet too large");
  }
  const long total = static_cast<long>(std::llround(tuples));
  std::vector<int> digits(n, 0);
  double success = 0.0;
  for (long t = 0; t < total; ++t) {
    double best = 0.0;
    for (int x = 0; x < r; ++x) {
      double q = priors[x];
      for (int i = 0; i < n; ++i) q *= dists[x](digits[i]);
      best = std::max(best, q);
    }
    success += best;
    for (int i = 0; i < n; ++i) {
      if (++digits[i] < m) break;
      digits[i] = 0;
    }
  }
  return std::clamp(1.0 - success, 0.0, 1.0);
}

namespace {

std::vector<RealVec> diagonal_dists(const StateEnsemble& e) {
  std::vector<RealVec> out;
  out.reserve(e.size());
  for (const auto& s : e.states()) out.push_back(s.diagonal());
  return out;
}

}  // namespace

double n_fold_exclusion(const StateEnsemble& e, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "n must be >= 1");
  const double dim_n = std::pow(static_cast<double>(e.dim()), n);
  if (dim_n > 256.0) {
    fail(ErrorKind::TooLarge, "n-fold dimension exceeds the SDP size guard");
  }
  if (e.is_classical()) {
    return classical_exclusion_error(e.priors(), diagonal_dists(e), n);
  }
  if (n == 1) return state_exclusion_error(e).p_err;
  std::vector<DensityOperator> powered;
  powered.reserve(e.size());
  for (const auto& s : e.states()) powered.push_back(tensor_power(s, n));
  return state_exclusion_error(StateEnsemble(e.priors(), powered)).p_err;
}

ExponentEstimate empirical_exponent(const StateEnsemble& e, int n_max,
                                    const ExponentOptions& options) {
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "n_max must be >= 1");
  const bool classical = e.is_classical();
  ExponentEstimate est;
  est.n_max = n_max;
  std::vector<double> minus_log;  // -ln P_err at each n
  for (int n = 1; n <= n_max; ++n) {
    double p;
    if (classical) {
      const double tuples = std::pow(static_cast<double>(e.dim()), n);
      if (tuples > static_cast<double>(1 << 22)) break;
      p = classical_exclusion_error(e.priors(), diagonal_dists(e), n);
    } else {
      const double dim_n = std::pow(static_cast<double>(e.dim()), n);
      if (dim_n > std::min(options.sdp_dim_cap, 256)) break;
      p = n_fold_exclusion(e, n);
    }
    if (p <= 1e-12) {
      est.perfect_at = n;
      break;
    }
    minus_log.push_back(-std::log(p));
    est.per_n.push_back(-std::log(p) / n);
  }
  const int used = static_cast<int>(minus_log.size());
  if (used == 0) {
    est.slope = est.perfect_at ? kInf : 0.0;
    return est;
  }
  // Least-squares slope of -ln P_err against n over the top half of the
  // computed range; transients decay like 1/sqrt(n).
  const int lo = used / 2;  // zero-based index; n = lo+1 .. used
  const int count = used - lo;
  if (count == 1) {
    est.slope = minus_log[lo] / (lo + 1);
  } else {
    double nbar = 0.0, ybar = 0.0;
    for (int i = lo; i < used; ++i) {
      nbar += i + 1;
      ybar += minus_log[i];
    }
    nbar /= count;
    ybar /= count;
    double sxx = 0.0, sxy = 0.0;
    for (int i = lo; i < used; ++i) {
      sxx += (i + 1 - nbar) * (i + 1 - nbar);
      sxy += (i + 1 - nbar) * (minus_log[i] - ybar);
    }
    est.slope = sxy / sxx;
    double ss = 0.0;
    const double intercept = ybar - est.slope * nbar;
    for (int i = lo; i < used; ++i) {
      const double fit = est.slope * (i + 1) + intercept;
      ss += (minus_log[i] - fit) * (minus_log[i] - fit);
    }
    est.residual = std::sqrt(ss / count);
  }
  if (est.perfect_at) est.slope = kInf;
  return est;
}

PureTripleCriterion pure_triple_antidistinguishable(
    const Eigen::VectorXcd& psi1, const Eigen::VectorXcd& psi2,
    const Eigen::VectorXcd& psi3) {
  auto overlap2 = [](const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    if (u.size() != v.size()) {
      fail(ErrorKind::DimensionMismatch, "state vector dims differ");
    }
    const Cplx ip = u.adjoint() * v;
    return std::norm(ip) / (u.squaredNorm() * v.squaredNorm());
  };
  PureTripleCriterion out;
  out.a = overlap2(psi1, psi2);
  out.b = overlap2(psi2, psi3);
  out.c = overlap2(psi3, psi1);
  const double s = out.a + out.b + out.c;
  out.antidistinguishable =
      s < 1.0 && (s - 1.0) * (s - 1.0) >= 4.0 * out.a * out.b * out.c;
  return out;
}

int min_copies_perfect_exclusion(const Eigen::VectorXcd& psi1,
                                 const Eigen::VectorXcd& psi2,
                                 const Eigen::VectorXcd& psi3) {
  const PureTripleCriterion base =
      pure_triple_antidistinguishable(psi1, psi2, psi3);
  const double m = std::max({base.a, base.b, base.c});
  if (m >= 1.0 - 1e-12) {
    fail(ErrorKind::Degenerate, "two of the states coincide");
  }
  int cap = 1;
  if (m > 1e-300) {
    cap = static_cast<int>(std::ceil(std::log(4.0) / (-std::log(m))));
    cap = std::max(cap, 1);
  }
  for (int n = 1; n <= cap; ++n) {
    const double an = std::pow(base.a, n);
    const double bn = std::pow(base.b, n);
    const double cn = std::pow(base.c, n);
    const double s = an + bn + cn;
    if (s < 1.0 && (s - 1.0) * (s - 1.0) >= 4.0 * an * bn * cn) return n;
  }
  fail(ErrorKind::NumericalFailure,
       "criterion did not trigger within the guaranteed bound");
}

double evaluate_adaptive_strategy(const ChannelEnsemble& ne,
                                  const AdaptiveStrategy& s) {
  const int d_a = ne.channels[0].d_in();
  const int d_b = ne.channels[0].d_out();
  const int n = s.invocations();
  if (s.initial_state.dim() != s.d_r1 * d_a) {
    fail(ErrorKind::DimensionMismatch, "initial state dimension");
  }
  if (s.final_povm.outcomes() != ne.size()) {
    fail(ErrorKind::DimensionMismatch, "POVM outcomes vs hypotheses");
  }
  double error = 0.0;
  for (int x = 0; x < ne.size(); ++x) {
    HermitianOperator state = s.initial_state.op();
    int d_r = s.d_r1;
    HermitianOperator post;
    for (int i = 0; i < n; ++i) {
      post = ne.channels[x].apply_with_reference(state, d_r);
      if (i + 1 < n) {
        const QuantumChannel& adaptor = s.adaptors[i];
        if (adaptor.d_in() != d_r * d_b || adaptor.d_out() % d_a != 0) {
          fail(ErrorKind::DimensionMismatch, "adaptor dimension chain");
        }
        state = adaptor.apply(post);
        d_r = adaptor.d_out() / d_a;
      }
    }
    if (s.final_povm.dim() != post.dim()) {
      fail(ErrorKind::DimensionMismatch, "POVM dimension vs final state");
    }
    error += ne.priors[x] * (s.final_povm[x].mat() * post.mat()).trace().real();
  }
  return error;
}

AdaptiveStrategy nonadaptive_classical_strategy(
    const std::vector<double>& priors,
    const std::vector<ClassicalChannel>& channels, int y, int n) {
  const int r = static_cast<int>(channels.size());
  const int dy = channels[0].d_in();
  const int dz = channels[0].d_out();
  AdaptiveStrategy s;
  s.d_r1 = 1;
  Eigen::VectorXcd e_y = Eigen::VectorXcd::Zero(dy);
  e_y(y) = 1.0;
  s.initial_state = DensityOperator::pure(e_y);
  // Adaptor i keeps all previous outputs in the reference register and
  // feeds a fresh |y>.
  for (int i = 1; i < n; ++i) {
    const int d_in = static_cast<int>(std::pow(dz, i));
    Mat k = Mat::Zero(d_in * dy, d_in);
    for (int mth = 0; mth < d_in; ++mth) k(mth * dy + y, mth) = 1.0;
    s.adaptors.push_back(QuantumChannel::from_kraus(d_in, d_in * dy, {k}));
  }
  // Exclusion measurement on the product alphabet: each tuple votes against
  // the hypothesis with the smallest joint weight.
  const long total = static_cast<long>(std::llround(std::pow(dz, n)));
  std::vector<Mat> elements(r, Mat::Zero(total, total));
  std::vector<int> digits(n, 0);
  for (long t = 0; t < total; ++t) {
    int best_x = 0;
    double best = kInf;
    for (int x = 0; x < r; ++x) {
      double q = priors[x];
      for (int i = 0; i < n; ++i) q *= channels[x].stochastic()(digits[i], y);
      if (q < best) {
        best = q;
        best_x = x;
      }
    }
    elements[best_x](t, t) = 1.0;
    for (int i = 0; i < n; ++i) {
      if (++digits[i] < dz) break;
      digits[i] = 0;
    }
  }
  std::vector<HermitianOperator> povm;
  povm.reserve(r);
  for (auto& m : elements) povm.emplace_back(std::move(m));
  s.final_povm = Povm(std::move(povm));
  return s;
}

ClassicalChannelExponent classical_channel_exponent(
    const std::vector<ClassicalChannel>& channels, uint64_t seed) {
  if (channels.empty()) fail(ErrorKind::InvalidArgument, "empty tuple");
  const int dy = channels[0].d_in();
  ClassicalChannelExponent out;
  out.value = -kInf;
  for (int y = 0; y < dy; ++y) {
    std::vector<RealVec> column;
    column.reserve(channels.size());
    for (const auto& c : channels) column.push_back(c.column(y));
    const double v = classical_chernoff(column, seed).value;
    if (v > out.value) {
      out.value = v;
      out.best_input = y;
    }
  }
  return out;
}

}  // namespace pexc
