#include "pexc/channels.hpp"

#include <cmath>

#include "pexc/sdp.hpp"

namespace pexc {

ClassicalChannel::ClassicalChannel(RealMat stochastic) : p_(std::move(stochastic)) {
  for (int y = 0; y < p_.cols(); ++y) {
    double sum = 0.0;
    for (int z = 0; z < p_.rows(); ++z) {
      if (p_(z, y) < -1e-15) {
        fail(ErrorKind::InvalidArgument, "negative transition probability");
      }
      sum += p_(z, y);
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      fail(ErrorKind::InvalidArgument, "stochastic column does not sum to 1");
    }
  }
}

QuantumChannel::QuantumChannel(int d_in, int d_out, HermitianOperator choi,
                               bool enforce_tp, double cp_tol, double tp_tol)
    : d_in_(d_in), d_out_(d_out), choi_(std::move(choi)),
      tp_enforced_(enforce_tp) {
  if (choi_.dim() != d_in * d_out) {
    fail(ErrorKind::DimensionMismatch, "Choi dimension mismatch");
  }
  if (min_eigenvalue(choi_) < -cp_tol) {
    fail(ErrorKind::NegativeEigenvalue, "Choi operator is not PSD (map not CP)");
  }
  if (enforce_tp) {
    const Mat marg = partial_trace(choi_.mat(), d_in, d_out, 1);
    const double dev =
        (marg - Mat::Identity(d_in, d_in)).cwiseAbs().maxCoeff();
    if (dev > tp_tol) {
      fail(ErrorKind::InvalidArgument,
           "map is not trace preserving (deviation " + std::to_string(dev) +
               ")");
    }
  }
}

QuantumChannel QuantumChannel::from_kraus(int d_in, int d_out,
                                          const std::vector<Mat>& kraus) {
  if (kraus.empty()) fail(ErrorKind::InvalidArgument, "no Kraus operators");
  Mat j = Mat::Zero(d_in * d_out, d_in * d_out);
  for (const auto& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in) {
      fail(ErrorKind::DimensionMismatch, "Kraus operator shape");
    }
    // vec(K) with our index convention (i, out) -> i*d_out + out.
    Eigen::VectorXcd v(d_in * d_out);
    for (int i = 0; i < d_in; ++i) {
      for (int o = 0; o < d_out; ++o) v(i * d_out + o) = k(o, i);
    }
    j += v * v.adjoint();
  }
  return QuantumChannel(d_in, d_out, HermitianOperator(std::move(j)));
}

QuantumChannel QuantumChannel::identity(int d) {
  std::vector<Mat> kraus{Mat::Identity(d, d)};
  return from_kraus(d, d, kraus);
}

QuantumChannel QuantumChannel::depolarizing(int d, double p) {
  // rho -> (1-p) rho + p Tr[rho] I/d.
  Mat j = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      j(i * d + i, k * d + k) += (1.0 - p);
    }
    for (int o = 0; o < d; ++o) {
      j(i * d + o, i * d + o) += p / d;
    }
  }
  return QuantumChannel(d, d, HermitianOperator(std::move(j)));
}

QuantumChannel QuantumChannel::replacer(const DensityOperator& output,
                                        int d_in) {
  const int d_out = output.dim();
  const Mat j = kron(Mat(Mat::Identity(d_in, d_in)), output.mat());
  return QuantumChannel(d_in, d_out, HermitianOperator(j));
}

QuantumChannel QuantumChannel::from_classical(const ClassicalChannel& c) {
  const int dy = c.d_in(), dz = c.d_out();
  Mat j = Mat::Zero(dy * dz, dy * dz);
  for (int y = 0; y < dy; ++y) {
    for (int z = 0; z < dz; ++z) {
      j(y * dz + z, y * dz + z) = c.stochastic()(z, y);
    }
  }
  return QuantumChannel(dy, dz, HermitianOperator(std::move(j)));
}

HermitianOperator QuantumChannel::apply(const HermitianOperator& rho) const {
  if (rho.dim() != d_in_) {
    fail(ErrorKind::DimensionMismatch, "channel input dimension");
  }
  // N[rho] = Tr_R[(rho^T (x) I) J].
  Mat out = Mat::Zero(d_out_, d_out_);
  const Mat& j = choi_.mat();
  for (int i = 0; i < d_in_; ++i) {
    for (int k = 0; k < d_in_; ++k) {
      out += rho.mat()(i, k) * j.block(i * d_out_, k * d_out_, d_out_, d_out_);
    }
  }
  return HermitianOperator(std::move(out), 1e-8);
}

HermitianOperator QuantumChannel::apply_with_reference(
    const HermitianOperator& rho_ra, int d_r) const {
  if (rho_ra.dim() != d_r * d_in_) {
    fail(ErrorKind::DimensionMismatch, "reference x input dimension");
  }
  const Mat& j = choi_.mat();
  Mat out = Mat::Zero(d_r * d_out_, d_r * d_out_);
  for (int r1 = 0; r1 < d_r; ++r1) {
    for (int r2 = 0; r2 < d_r; ++r2) {
      for (int a1 = 0; a1 < d_in_; ++a1) {
        for (int a2 = 0; a2 < d_in_; ++a2) {
          const Cplx amp = rho_ra.mat()(r1 * d_in_ + a1, r2 * d_in_ + a2);
          if (amp == Cplx(0.0, 0.0)) continue;
          out.block(r1 * d_out_, r2 * d_out_, d_out_, d_out_) +=
              amp * j.block(a1 * d_out_, a2 * d_out_, d_out_, d_out_);
        }
      }
    }
  }
  return HermitianOperator(std::move(out), 1e-8);
}

ChannelEnsemble::ChannelEnsemble(std::vector<double> p,
                                 std::vector<QuantumChannel> ch)
    : priors(std::move(p)), channels(std::move(ch)) {
  if (priors.size() != channels.size() || channels.empty()) {
    fail(ErrorKind::InvalidArgument, "ensemble priors/channels mismatch");
  }
  double sum = 0.0;
  for (double q : priors) {
    if (q <= 0.0 || q >= 1.0) {
      fail(ErrorKind::InvalidArgument, "priors must be strictly interior");
    }
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    fail(ErrorKind::InvalidArgument, "priors do not sum to 1");
  }
  for (const auto& c : channels) {
    if (c.d_in() != channels[0].d_in() || c.d_out() != channels[0].d_out()) {
      fail(ErrorKind::DimensionMismatch, "channel shapes differ");
    }
  }
}

double ChannelEnsemble::min_prior() const {
  double m = 1.0;
  for (double q : priors) m = std::min(m, q);
  return m;
}

DivergenceValue geometric_channel_divergence(const QuantumChannel& n,
                                             const QuantumChannel& m,
                                             double alpha) {
  if (alpha <= 1.0 || alpha > 2.0) {
    fail(ErrorKind::InvalidArgument, "alpha must lie in (1,2]");
  }
  if (n.d_in() != m.d_in() || n.d_out() != m.d_out()) {
    fail(ErrorKind::DimensionMismatch, "channel shapes differ");
  }
  const HermitianOperator& jn = n.choi();
  const HermitianOperator& jm = m.choi();
  if (!support_contained(jn, jm)) return DivergenceValue::infinite();
  const HermitianOperator m_half = pow_on_support(jm, 0.5);
  const HermitianOperator m_inv_half = pow_on_support(jm, -0.5);
  const HermitianOperator inner(
      m_inv_half.mat() * jn.mat() * m_inv_half.mat(), 1e-7);
  const HermitianOperator inner_pow = pow_on_support(inner, alpha);
  const Mat sandwiched = m_half.mat() * inner_pow.mat() * m_half.mat();
  const HermitianOperator reduced(
      partial_trace(sandwiched, n.d_in(), n.d_out(), 1), 1e-7);
  const double norm_inf = schatten_norm(reduced, kInf);
  return DivergenceValue::finite(std::log(norm_inf) / (alpha - 1.0));
}

DivergenceValue belavkin_channel_divergence(const QuantumChannel& n,
                                            const QuantumChannel& m) {
  if (n.d_in() != m.d_in() || n.d_out() != m.d_out()) {
    fail(ErrorKind::DimensionMismatch, "channel shapes differ");
  }
  const HermitianOperator& jn = n.choi();
  const HermitianOperator& jm = m.choi();
  if (!support_contained(jn, jm)) return DivergenceValue::infinite();
  const HermitianOperator n_half = pow_on_support(jn, 0.5);
  const HermitianOperator m_inv = pow_on_support(jm, -1.0);
  const HermitianOperator inner(n_half.mat() * m_inv.mat() * n_half.mat(),
                                1e-7);
  const HermitianOperator log_inner = log_on_support(inner);
  const Mat weighted = n_half.mat() * log_inner.mat() * n_half.mat();
  const HermitianOperator reduced(
      partial_trace(weighted, n.d_in(), n.d_out(), 1), 1e-7);
  return DivergenceValue::finite(schatten_norm(reduced, kInf));
}

namespace {

// Tr_B of a matrix expression over AB, as an expression over A.
MatrixExpr ptrace_expr(const MatrixExpr& e, int d_a, int d_b) {
  MatrixExpr out(d_a);
  out.add_const(partial_trace(e.constant(), d_a, d_b, 1));
  for (const auto& [v, m] : e.coeffs()) {
    out.add_term(v, partial_trace(m, d_a, d_b, 1));
  }
  return out;
}

bool choi_intersection_trivial(const std::vector<QuantumChannel>& channels) {
  std::vector<HermitianOperator> chois;
  for (const auto& c : channels) chois.push_back(c.choi());
  const HermitianOperator pi = intersection_projector(chois);
  return pi.mat().cwiseAbs().maxCoeff() < 1e-9;
}

}  // namespace

RadiusResult geometric_channel_radius_sdp(
    const std::vector<QuantumChannel>& channels, int ell) {
  const int r = static_cast<int>(channels.size());
  if (r < 1) fail(ErrorKind::InvalidArgument, "empty channel tuple");
  if (ell < 0 || ell > 12) {
    fail(ErrorKind::InvalidArgument, "ell must lie in 0..12");
  }
  const int d_a = channels[0].d_in();
  const int d_b = channels[0].d_out();
  const int d = d_a * d_b;
  for (const auto& c : channels) {
    if (c.d_in() != d_a || c.d_out() != d_b) {
      fail(ErrorKind::DimensionMismatch, "channel shapes differ");
    }
  }
  RadiusResult out;
  out.method = RadiusMethod::Sdp;
  out.ell_used = ell;
  if (choi_intersection_trivial(channels)) {
    out.value = kInf;
    out.optimal_weights = SimplexPoint::barycenter(r);
    return out;
  }

  SdpBuilder b;
  const int lam = b.add_scalar();
  const auto jt = b.add_hermitian(d);
  b.require_psd(b.expr(jt));
  // Trace preservation of the center channel, row by row on a Hermitian
  // basis of the input system.
  for (const auto& g : hermitian_basis(d_a)) {
    const Mat lifted = kron(g.mat(), Mat(Mat::Identity(d_b, d_b)));
    b.require_eq(b.inner(lifted, jt), g.mat().trace().real());
  }

  std::vector<SdpBuilder::HermVar> m_vars;
  for (int x = 0; x < r; ++x) {
    const auto m_x = b.add_hermitian(d);
    m_vars.push_back(m_x);
    std::vector<SdpBuilder::HermVar> n_vars;  // N_2 .. N_{ell+1}
    for (int i = 0; i < ell; ++i) n_vars.push_back(b.add_hermitian(d));

    // Chain [[J_T, N_{i+1}], [N_{i+1}, N_i]] >= 0 with N_1 = J_{N_x}.
    MatrixExpr prev(Mat(channels[x].choi().mat()));
    for (int i = 0; i < ell; ++i) {
      b.require_psd(block2x2(b.expr(jt), b.expr(n_vars[i]), prev));
      prev = b.expr(n_vars[i]);
    }
    b.require_psd(block2x2(b.expr(m_x), b.expr(jt), prev));

    MatrixExpr cap(d_a);
    cap.add_term(lam, Mat::Identity(d_a, d_a));
    b.require_psd(cap - ptrace_expr(b.expr(m_x), d_a, d_b));
  }
  LinExpr obj;
  obj.add(lam, 1.0);
  b.minimize(obj);

  SdpOptions opts;
  opts.gap_tol = std::clamp(1e-7 * std::pow(2.0, -ell), 4e-13, 1e-9);
  opts.feas_tol = 1e-9;
  opts.max_iterations = 300;
  const SdpSolution sol = solve(b.build(), opts);
  const bool usable =
      sol.status == SdpStatus::Optimal ||
      (sol.status == SdpStatus::MaxIter &&
       sol.gap <= 100.0 * opts.gap_tol * (1.0 + std::abs(sol.primal_value)));
  if (sol.status == SdpStatus::Infeasible) {
    out.value = kInf;
    out.optimal_weights = SimplexPoint::barycenter(r);
    return out;
  }
  if (!usable) {
    fail(ErrorKind::SdpFailure, "channel-radius SDP did not converge: " +
                                    to_string(sol.status));
  }
  const double lambda = std::max(sol.primal_value, 1e-300);
  out.value = std::pow(2.0, ell) * std::log(lambda);
  out.optimal_center = b.value(jt, sol.x);
  // Multipliers of the per-channel epigraph caps estimate the adversarial
  // weights; the cap blocks are the last r PSD constraints.
  RealVec w = RealVec::Constant(r, 1.0 / r);
  const int nb = static_cast<int>(sol.dual_blocks.size());
  if (nb >= r) {
    // Cap blocks sit at positions 1 + x*(ell+2) + (ell+1) in build order.
    bool ok = true;
    RealVec cand(r);
    for (int x = 0; x < r; ++x) {
      const int pos = 1 + x * (ell + 2) + (ell + 1);
      if (pos >= nb) {
        ok = false;
        break;
      }
      cand(x) = std::max(0.0, sol.dual_blocks[pos].trace());
    }
    if (ok && cand.sum() > 1e-12) w = cand / cand.sum();
  }
  out.optimal_weights = SimplexPoint(project_simplex(w));
  return out;
}

RadiusResult belavkin_channel_radius(
    const std::vector<QuantumChannel>& channels, double tol) {
  if (tol < 1e-6) fail(ErrorKind::InvalidArgument, "tol must be >= 1e-6");
  RadiusResult prev;
  bool have_prev = false;
  for (int ell = 0; ell <= 12; ++ell) {
    RadiusResult cur = geometric_channel_radius_sdp(channels, ell);
    if (std::isinf(cur.value)) return cur;
    if (have_prev && std::abs(cur.value - prev.value) <= tol) {
      cur.converged = true;
      return cur;
    }
    prev = cur;
    have_prev = true;
  }
  prev.converged = false;
  return prev;
}

RadiusResult cq_radius_reduction(const std::vector<CqChannel>& channels,
                                 LeftDivergence divergence,
                                 const MinimaxOptions& options) {
  if (channels.empty()) fail(ErrorKind::InvalidArgument, "empty tuple");
  const int dy = channels[0].d_in();
  for (const auto& c : channels) {
    if (c.d_in() != dy) {
      fail(ErrorKind::DimensionMismatch, "input alphabets differ");
    }
  }
  RadiusResult best;
  best.value = -kInf;
  for (int y = 0; y < dy; ++y) {
    std::vector<DensityOperator> column;
    for (const auto& c : channels) column.push_back(c.outputs[y]);
    RadiusResult res =
        divergence == LeftDivergence::Umegaki
            ? log_euclidean_chernoff(column, options.seed)
            : left_radius_minimax(divergence, column,
                                  divergence == LeftDivergence::Max
                                      ? MinimaxMode::WeightsFirst
                                      : MinimaxMode::CenterFirst,
                                  options);
    if (res.value > best.value) {
      best = res;
      best.argmax_input = y;
    }
  }
  return best;
}

}  // namespace pexc
