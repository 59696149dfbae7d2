#pragma once

#include <optional>

#include "pexc/matrix.hpp"

namespace pexc {

/// Extended-real result of a divergence evaluation. support_violation marks
/// the case where the first argument's support is not contained in the
/// second's; value is then +inf. +inf is absorbing in all comparisons.
struct DivergenceValue {
  double value = 0.0;
  bool support_violation = false;

  static DivergenceValue infinite(bool violation = true) {
    return {kInf, violation};
  }
  static DivergenceValue finite(double v) { return {v, false}; }
  bool is_finite() const { return std::isfinite(value); }
};

/// ||(I - Pi_sigma) Pi_gamma||_inf <= tol declares supp(gamma) within
/// supp(sigma).
bool support_contained(const HermitianOperator& gamma,
                       const HermitianOperator& sigma, double tol = 1e-8);

DivergenceValue umegaki(const DensityOperator& rho,
                        const HermitianOperator& sigma);

DivergenceValue sandwiched_extended(const HermitianOperator& gamma,
                                    const HermitianOperator& sigma,
                                    double alpha);

/// ||sigma^((1-a)/2a) gamma sigma^((1-a)/2a)||_a^a; +inf on support
/// violation.
double sandwiched_quasi(const HermitianOperator& gamma,
                        const HermitianOperator& sigma, double alpha);

DivergenceValue geometric_renyi(const DensityOperator& rho,
                                const HermitianOperator& sigma, double alpha);

DivergenceValue belavkin_staszewski(const DensityOperator& rho,
                                    const HermitianOperator& sigma);

DivergenceValue max_extended(const HermitianOperator& gamma,
                             const HermitianOperator& sigma);

/// One-sided variant inf{ln l : gamma <= l sigma, l >= 0}. NotApplicable
/// when the scaled operator has no positive part.
DivergenceValue dmax_lower(const HermitianOperator& gamma,
                           const HermitianOperator& sigma);

DivergenceValue hypothesis_testing_extended(const HermitianOperator& tau,
                                            const HermitianOperator& sigma,
                                            double eps);

DivergenceValue petz_renyi(const DensityOperator& rho,
                           const HermitianOperator& sigma, double alpha);

struct PetzLautumResult {
  DivergenceValue value;
  std::optional<DensityOperator> minimizer;
};

/// Closed-form minimum of petz_renyi(sigma (x) tau || rho_ab) over states
/// tau on the second factor, with the minimizer.
PetzLautumResult petz_lautum(const HermitianOperator& rho_ab,
                             const DensityOperator& sigma_a, int d_a, int d_b,
                             double alpha);

/// epsilon-regularized form of the same quantity, used to validate the
/// projector formula.
double petz_lautum_regularized(const HermitianOperator& rho_ab,
                               const DensityOperator& sigma_a, int d_a,
                               int d_b, double alpha, double eps);

}  // namespace pexc
