#pragma once

#include "pexc/divergences.hpp"
#include "pexc/matrix.hpp"
#include "pexc/radii.hpp"

namespace pexc {

/// Column-stochastic matrix p(z|y); column y is the output distribution for
/// input symbol y.
class ClassicalChannel {
 public:
  ClassicalChannel() = default;
  explicit ClassicalChannel(RealMat stochastic);

  int d_in() const { return static_cast<int>(p_.cols()); }
  int d_out() const { return static_cast<int>(p_.rows()); }
  const RealMat& stochastic() const { return p_; }
  RealVec column(int y) const { return p_.col(y); }

 private:
  RealMat p_;
};

/// CPTP (or CP-only) map stored as a Choi operator
/// J = sum_ij |i><j| (x) N[|i><j|] on R (x) B with d_R = d_in.
class QuantumChannel {
 public:
  QuantumChannel() = default;
  QuantumChannel(int d_in, int d_out, HermitianOperator choi,
                 bool enforce_tp = true, double cp_tol = 1e-8,
                 double tp_tol = 1e-8);

  static QuantumChannel from_kraus(int d_in, int d_out,
                                   const std::vector<Mat>& kraus);
  static QuantumChannel identity(int d);
  static QuantumChannel depolarizing(int d, double p);
  static QuantumChannel replacer(const DensityOperator& output, int d_in);
  static QuantumChannel from_classical(const ClassicalChannel& c);

  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  const HermitianOperator& choi() const { return choi_; }
  bool tp_enforced() const { return tp_enforced_; }

  /// N[rho] for rho on the input system.
  HermitianOperator apply(const HermitianOperator& rho) const;
  /// (I_R (x) N)[rho] for rho on R (x) A with the given reference dim.
  HermitianOperator apply_with_reference(const HermitianOperator& rho_ra,
                                         int d_r) const;

 private:
  int d_in_ = 0, d_out_ = 0;
  HermitianOperator choi_;
  bool tp_enforced_ = true;
};

struct ChannelEnsemble {
  std::vector<double> priors;
  std::vector<QuantumChannel> channels;

  ChannelEnsemble() = default;
  ChannelEnsemble(std::vector<double> p, std::vector<QuantumChannel> ch);
  int size() const { return static_cast<int>(channels.size()); }
  double min_prior() const;
};

/// Classical-to-quantum channel: input symbol y prepares outputs[y].
struct CqChannel {
  std::vector<DensityOperator> outputs;
  int d_in() const { return static_cast<int>(outputs.size()); }
};

// ---- channel divergences (Choi closed forms) -----------------------------

DivergenceValue geometric_channel_divergence(const QuantumChannel& n,
                                             const QuantumChannel& m,
                                             double alpha);

DivergenceValue belavkin_channel_divergence(const QuantumChannel& n,
                                            const QuantumChannel& m);

// ---- channel radii --------------------------------------------------------

/// Left geometric Renyi channel radius at alpha = 1 + 2^-ell, via its
/// semidefinite representation. Returns the optimal center channel's Choi.
RadiusResult geometric_channel_radius_sdp(
    const std::vector<QuantumChannel>& channels, int ell);

/// Limit of the geometric ladder: runs increasing ell until successive
/// values differ by at most tol (ell capped at 12, flagged on
/// non-convergence).
RadiusResult belavkin_channel_radius(
    const std::vector<QuantumChannel>& channels, double tol = 1e-4);

/// Radius of a classical-to-quantum tuple as the maximum over input symbols
/// of the state-tuple radius.
RadiusResult cq_radius_reduction(const std::vector<CqChannel>& channels,
                                 LeftDivergence divergence,
                                 const MinimaxOptions& options = {});

}  // namespace pexc
