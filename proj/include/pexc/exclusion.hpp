#pragma once

#include <optional>

#include "pexc/channels.hpp"
#include "pexc/matrix.hpp"

namespace pexc {

struct ExclusionResult {
  double p_err = 0.0;
  HermitianOperator dual_gamma;
  Povm povm;
};

/// One-shot state-exclusion error probability: both the measurement side
/// and the certificate side of the same SDP, with the primal/dual gap
/// checked to 1e-6.
ExclusionResult state_exclusion_error(const StateEnsemble& e);

struct DiscriminationResult {
  double p_err = 0.0;
  HermitianOperator dual_gamma;
  Povm povm;
};

DiscriminationResult state_discrimination(const StateEnsemble& e);
double state_discrimination_error(const StateEnsemble& e);

/// -ln P_err evaluated through the testing-divergence route at the center
/// recovered from the exclusion certificate; checked against the SDP value
/// to 1e-5. +inf signals perfect exclusion.
double hypothesis_testing_characterization(const StateEnsemble& e);

/// Same consistency check for discrimination (eps = 1/r).
double discrimination_characterization(const StateEnsemble& e);

/// Exclusion error for the n-fold ensemble; classical (diagonal) ensembles
/// use the exact per-symbol assignment instead of the SDP.
double n_fold_exclusion(const StateEnsemble& e, int n);

/// Exact classical exclusion error on the product alphabet.
double classical_exclusion_error(const std::vector<double>& priors,
                                 const std::vector<RealVec>& dists, int n);
double classical_discrimination_error(const std::vector<double>& priors,
                                      const std::vector<RealVec>& dists,
                                      int n);

struct ExponentEstimate {
  std::vector<double> per_n;  // -(1/n) ln P_err, n = 1..n_used
  double slope = 0.0;
  int n_max = 0;
  double residual = 0.0;
  std::optional<int> perfect_at;

  bool infinite() const { return perfect_at.has_value(); }
};

struct ExponentOptions {
  // Quantum path stops once dim^n exceeds this (the SDP core is dense);
  // classical ensembles are exempt.
  int sdp_dim_cap = 32;
};

ExponentEstimate empirical_exponent(const StateEnsemble& e, int n_max,
                                    const ExponentOptions& options = {});

struct PureTripleCriterion {
  bool antidistinguishable = false;
  double a = 0.0, b = 0.0, c = 0.0;  // squared pairwise overlaps
};

PureTripleCriterion pure_triple_antidistinguishable(
    const Eigen::VectorXcd& psi1, const Eigen::VectorXcd& psi2,
    const Eigen::VectorXcd& psi3);

/// Smallest n at which the pure-triple criterion holds for the n-th powers
/// of the overlaps; bounded by ceil(ln 4 / -ln max_overlap).
int min_copies_perfect_exclusion(const Eigen::VectorXcd& psi1,
                                 const Eigen::VectorXcd& psi2,
                                 const Eigen::VectorXcd& psi3);

/// Sequential strategy: prepare initial_state on R1 (x) A1, interleave the
/// tested channel on A_i with the adaptors R_i B_i -> R_{i+1} A_{i+1}, and
/// measure at the end. The number of invocations is adaptors.size() + 1.
struct AdaptiveStrategy {
  DensityOperator initial_state;  // on R1 (x) A1
  int d_r1 = 1;
  std::vector<QuantumChannel> adaptors;
  Povm final_povm;

  int invocations() const { return static_cast<int>(adaptors.size()) + 1; }
};

double evaluate_adaptive_strategy(const ChannelEnsemble& ne,
                                  const AdaptiveStrategy& s);

/// Nonadaptive strategy feeding |y><y| every round and applying the optimal
/// product-alphabet exclusion measurement at the end.
AdaptiveStrategy nonadaptive_classical_strategy(
    const std::vector<double>& priors,
    const std::vector<ClassicalChannel>& channels, int y, int n);

struct ClassicalChannelExponent {
  double value = 0.0;  // extended real
  int best_input = 0;
};

ClassicalChannelExponent classical_channel_exponent(
    const std::vector<ClassicalChannel>& channels, uint64_t seed = 42);

}  // namespace pexc
