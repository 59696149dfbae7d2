#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pexc {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorKind {
  DimensionMismatch,
  NegativeEigenvalue,
  ZeroOperator,
  NotApplicable,
  SdpFailure,
  NumericalFailure,
  TooLarge,
  Degenerate,
  Unsupported,
  InvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

// Relative rank cutoff with an absolute floor; eigenvalues below the
// resulting threshold count as zero.
struct RankTol {
  static constexpr double relative = 1e-10;
  static constexpr double floor = 1e-14;
};

inline double rank_threshold(double max_abs_eig,
                             double rel = RankTol::relative) {
  return std::max(rel * max_abs_eig, RankTol::floor);
}

/// Dense complex Hermitian matrix. The constructor checks Hermiticity
/// against herm_tol and stores the symmetrized part (h + h^dag)/2, so
/// downstream eigendecompositions see an exactly Hermitian input.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(Mat m, double herm_tol = 1e-10);

  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);
  static HermitianOperator diag(const RealVec& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& mat() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double herm_tol() const { return herm_tol_; }

 private:
  Mat m_;
  double herm_tol_ = 1e-10;
};

struct EigSystem {
  RealVec values;   // ascending
  Mat vectors;      // columns
};

EigSystem eig(const HermitianOperator& h);

double min_eigenvalue(const HermitianOperator& h);
double max_abs_eigenvalue(const HermitianOperator& h);

/// Unit-trace positive semidefinite operator.
class DensityOperator {
 public:
  DensityOperator() = default;
  explicit DensityOperator(HermitianOperator base, double trace_tol = 1e-9);
  explicit DensityOperator(Mat m, double trace_tol = 1e-9)
      : DensityOperator(HermitianOperator(std::move(m)), trace_tol) {}

  static DensityOperator pure(const Eigen::VectorXcd& psi);
  static DensityOperator maximally_mixed(int dim);
  static DensityOperator classical(const RealVec& probs);

  int dim() const { return base_.dim(); }
  const HermitianOperator& op() const { return base_; }
  const Mat& mat() const { return base_.mat(); }
  bool is_diagonal(double tol = 1e-12) const;
  RealVec diagonal() const;

 private:
  HermitianOperator base_;
};

/// Tuple of PSD operators summing to the identity.
class Povm {
 public:
  Povm() = default;
  explicit Povm(std::vector<HermitianOperator> elements);

  int dim() const { return elements_.empty() ? 0 : elements_[0].dim(); }
  int outcomes() const { return static_cast<int>(elements_.size()); }
  const HermitianOperator& operator[](int i) const { return elements_[i]; }
  const std::vector<HermitianOperator>& elements() const { return elements_; }

 private:
  std::vector<HermitianOperator> elements_;
};

/// Prior distribution over a tuple of states; priors are required to be
/// strictly interior.
class StateEnsemble {
 public:
  StateEnsemble() = default;
  StateEnsemble(std::vector<double> priors, std::vector<DensityOperator> states);

  int size() const { return static_cast<int>(states_.size()); }
  int dim() const { return states_.empty() ? 0 : states_[0].dim(); }
  const std::vector<double>& priors() const { return priors_; }
  const std::vector<DensityOperator>& states() const { return states_; }
  double min_prior() const;
  bool is_classical(double tol = 1e-12) const;

 private:
  std::vector<double> priors_;
  std::vector<DensityOperator> states_;
};

// ---- spectral calculus -------------------------------------------------

HermitianOperator support_projector(const HermitianOperator& h,
                                    double rank_tol = RankTol::relative);

/// Applies fn to the eigenvalues above the rank threshold; eigenvalues in
/// the kernel map to zero. With require_positive set, a negative
/// eigenvalue beyond the threshold raises NegativeEigenvalue.
HermitianOperator matrix_fn_on_support(const HermitianOperator& h,
                                       const std::function<double(double)>& fn,
                                       bool require_positive = false);

HermitianOperator log_on_support(const HermitianOperator& h);
HermitianOperator pow_on_support(const HermitianOperator& h, double p);
HermitianOperator exp_full(const HermitianOperator& h);

double schatten_norm(const HermitianOperator& g, double alpha);

// ---- multilinear algebra -----------------------------------------------

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
Mat kron(const Mat& a, const Mat& b);

/// Partial trace of a bipartite operator with factor dimensions (d0, d1);
/// which selects the subsystem to trace out.
HermitianOperator partial_trace(const HermitianOperator& h, int d0, int d1,
                                int which);
Mat partial_trace(const Mat& m, int d0, int d1, int which);

HermitianOperator tensor_power(const HermitianOperator& h, int n);
DensityOperator tensor_power(const DensityOperator& rho, int n);

// ---- small helpers -----------------------------------------------------

inline double real_inner(const Mat& a, const Mat& b) {
  return (a * b).trace().real();
}

/// Orthonormal basis (columns) of the range of a projector-like operator.
Mat range_basis(const HermitianOperator& projector, double tol = 1e-9);

/// Projector onto the intersection of the supports of a state tuple,
/// computed spectrally from sum_x (I - Pi_x).
HermitianOperator intersection_projector(
    const std::vector<HermitianOperator>& ops, double rank_tol = 1e-9);

Mat compress(const Mat& h, const Mat& basis);  // basis^dag h basis

}  // namespace pexc
