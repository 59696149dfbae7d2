#pragma once

#include <map>
#include <optional>
#include <utility>

#include "pexc/matrix.hpp"

namespace pexc {

// Conic problems are stated in inequality form over real scalar variables:
//
//   maximize   objective . x
//   subject to sum_i x_i A_{k,i} - B_k  >= 0   (PSD, per block k)
//              a_j . x = b_j                   (per equality j)
//
// Blocks carry complex Hermitian data; the solver lowers them to real
// symmetric form internally.

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIter };

std::string to_string(SdpStatus s);

struct HermBlockConstraint {
  HermitianOperator constant;             // B_k
  std::vector<int> vars;                  // indices of active variables
  std::vector<HermitianOperator> coeffs;  // A_{k,i}, aligned with vars
};

struct SdpProblem {
  int n_vars = 0;
  RealVec objective;                      // maximize objective . x
  double objective_constant = 0.0;
  // +1 for maximize, -1 when the problem was stated as a minimization;
  // reported values are in the stated sense either way.
  int sense = +1;
  std::vector<HermBlockConstraint> blocks;
  std::vector<std::pair<RealVec, double>> equalities;
};

struct SdpOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-7;
  int max_iterations = 200;
  bool check_weak_duality = false;  // assert primal <= dual each iterate
};

struct SdpSolution {
  RealVec x;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  SdpStatus status = SdpStatus::MaxIter;
  int iterations = 0;
  // Dual PSD multipliers per block, mapped back to the complex side. For
  // the exclusion/discrimination duals these are the measurement operators.
  std::vector<HermitianOperator> dual_blocks;
  std::string message;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

/// [[Re h, -Im h], [Im h, Re h]]; spectrum of h with doubled multiplicity.
RealMat complex_to_real_embedding(const HermitianOperator& h);

/// Orthonormal Hermitian basis of the d x d Hermitian space (d^2 elements,
/// Tr[G_a G_b] = delta_ab). Order: diagonal units, then symmetric and
/// antisymmetric off-diagonal pairs, row-major.
std::vector<HermitianOperator> hermitian_basis(int d);

// ---- problem builder -----------------------------------------------------

struct LinExpr {
  std::map<int, double> coeffs;
  double constant = 0.0;

  LinExpr& add(int var, double c) {
    coeffs[var] += c;
    return *this;
  }
};

/// Hermitian-matrix-valued affine expression over scalar variables.
class MatrixExpr {
 public:
  explicit MatrixExpr(int dim) : constant_(Mat::Zero(dim, dim)), dim_(dim) {}
  explicit MatrixExpr(Mat constant)
      : constant_(std::move(constant)), dim_(static_cast<int>(constant_.rows())) {}

  int dim() const { return dim_; }
  const Mat& constant() const { return constant_; }
  const std::map<int, Mat>& coeffs() const { return coeffs_; }

  MatrixExpr& add_const(const Mat& c);
  MatrixExpr& add_term(int var, const Mat& coeff);
  MatrixExpr& operator+=(const MatrixExpr& other);
  MatrixExpr operator-() const;

  friend MatrixExpr operator+(MatrixExpr a, const MatrixExpr& b) {
    a += b;
    return a;
  }
  friend MatrixExpr operator-(MatrixExpr a, const MatrixExpr& b) {
    a += -b;
    return a;
  }

 private:
  Mat constant_;
  std::map<int, Mat> coeffs_;
  int dim_;
};

/// [[e11, e12], [e12, e22]] as one Hermitian expression of doubled size.
/// All sub-expressions must have Hermitian coefficients (e12 included).
MatrixExpr block2x2(const MatrixExpr& e11, const MatrixExpr& e12,
                    const MatrixExpr& e22);

class SdpBuilder {
 public:
  struct HermVar {
    int offset = 0;
    int dim = 0;
  };

  int add_scalar();
  HermVar add_hermitian(int d);

  MatrixExpr expr(const HermVar& v) const;
  static MatrixExpr scaled_identity(int var, int d);

  /// Re Tr[h . value(v)] as a linear expression.
  LinExpr inner(const Mat& h, const HermVar& v) const;
  LinExpr trace(const HermVar& v) const;

  void require_psd(const MatrixExpr& e);
  void require_eq(const LinExpr& e, double rhs);
  void maximize(const LinExpr& objective);
  void minimize(const LinExpr& objective);

  SdpProblem build() const;

  /// Hermitian matrix value of v at the solution point.
  HermitianOperator value(const HermVar& v, const RealVec& x) const;

 private:
  int n_vars_ = 0;
  RealVec dense_objective() const;
  std::map<int, double> objective_;
  double objective_constant_ = 0.0;
  int sense_ = +1;
  std::vector<HermBlockConstraint> block_constraints_;
  std::vector<std::pair<LinExpr, double>> equalities_;
  mutable std::map<int, std::vector<HermitianOperator>> basis_cache_;
  const std::vector<HermitianOperator>& basis(int d) const;
};

}  // namespace pexc
