#pragma once

#include <functional>
#include <optional>

#include "pexc/divergences.hpp"
#include "pexc/matrix.hpp"

namespace pexc {

/// Point of the probability simplex (nonnegative, sums to 1).
struct SimplexPoint {
  RealVec weights;

  SimplexPoint() = default;
  explicit SimplexPoint(RealVec w);
  static SimplexPoint barycenter(int r);
};

enum class RadiusMethod { ClosedForm, SimplexAscent, Sdp };

struct RadiusResult {
  double value = 0.0;  // extended real
  SimplexPoint optimal_weights;
  std::optional<HermitianOperator> optimal_center;
  RadiusMethod method = RadiusMethod::SimplexAscent;
  // Set by the channel-radius ladder.
  int ell_used = -1;
  bool converged = true;
  // Set by classical-to-quantum reductions (maximizing input symbol).
  int argmax_input = -1;
};

/// Euclidean projection onto the probability simplex.
RealVec project_simplex(const RealVec& v);

/// Projected gradient ascent (Armijo backtracking, multistart) for a
/// concave objective over the simplex. fn fills grad when non-null.
struct SimplexAscentResult {
  RealVec s;
  double value;
};
SimplexAscentResult maximize_over_simplex(
    int r, const std::function<double(const RealVec&, RealVec*)>& fn,
    uint64_t seed = 42, int max_iterations = 5000, double grad_tol = 1e-9);

/// Multivariate classical Chernoff divergence of nonnegative vectors;
/// entries below 1e-15 are treated as exact zeros, and the objective is
/// restricted to the intersection of supports (+inf when empty).
RadiusResult classical_chernoff(const std::vector<RealVec>& dists,
                                uint64_t seed = 42);

/// Log-Euclidean Chernoff divergence of a state tuple; +inf when the
/// intersection of supports is trivial. Also reports the optimal center.
RadiusResult log_euclidean_chernoff(const std::vector<DensityOperator>& states,
                                    uint64_t seed = 42);

struct KappaResult {
  double kappa = 0.0;
  double neg_log_kappa = 0.0;  // extended real
};

/// sup Tr[gamma] subject to -rho_x <= gamma <= rho_x for all x.
KappaResult kappa_sdp(const std::vector<DensityOperator>& states);

enum class LeftDivergence { Umegaki, SandwichedAlpha, GeometricAlpha, Max };
enum class MinimaxMode { CenterFirst, WeightsFirst };

struct MinimaxOptions {
  double alpha = 1.5;  // for the alpha-indexed divergences
  uint64_t seed = 42;
  int iterations = 1200;
};

/// Left divergence radius of a state tuple, evaluated either as
/// inf_tau max_x D(tau||rho_x) (CenterFirst) or as
/// sup_s inf_tau sum_x s_x D(tau||rho_x) (WeightsFirst).
RadiusResult left_radius_minimax(LeftDivergence divergence,
                                 const std::vector<DensityOperator>& states,
                                 MinimaxMode mode,
                                 const MinimaxOptions& options = {});

}  // namespace pexc
