#include "pexc/matrix.hpp"

#include <cmath>

namespace pexc {

HermitianOperator::HermitianOperator(Mat m, double herm_tol)
    : herm_tol_(herm_tol) {
  if (m.rows() != m.cols()) {
    fail(ErrorKind::DimensionMismatch, "matrix is not square");
  }
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > herm_tol) {
    fail(ErrorKind::InvalidArgument,
         "matrix is not Hermitian within tolerance (deviation " +
             std::to_string(dev) + ")");
  }
  m_ = 0.5 * (m + m.adjoint().eval());
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(Mat::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(Mat::Zero(dim, dim));
}

HermitianOperator HermitianOperator::diag(const RealVec& d) {
  Mat m = Mat::Zero(d.size(), d.size());
  for (int i = 0; i < d.size(); ++i) m(i, i) = d(i);
  return HermitianOperator(std::move(m));
}

EigSystem eig(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(h.mat());
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "eigendecomposition failed");
  }
  return EigSystem{solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const HermitianOperator& h) {
  return eig(h).values.minCoeff();
}

double max_abs_eigenvalue(const HermitianOperator& h) {
  const auto es = eig(h);
  return es.values.cwiseAbs().maxCoeff();
}

DensityOperator::DensityOperator(HermitianOperator base, double trace_tol)
    : base_(std::move(base)) {
  const double tr = base_.trace();
  if (std::abs(tr - 1.0) > trace_tol) {
    fail(ErrorKind::InvalidArgument,
         "density operator trace deviates from 1 by " +
             std::to_string(std::abs(tr - 1.0)));
  }
  if (min_eigenvalue(base_) < -1e-9) {
    fail(ErrorKind::NegativeEigenvalue,
         "density operator has a negative eigenvalue");
  }
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (n < 1e-12) fail(ErrorKind::ZeroOperator, "zero state vector");
  Eigen::VectorXcd v = psi / n;
  return DensityOperator(HermitianOperator(v * v.adjoint()));
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  return DensityOperator(
      HermitianOperator(Mat::Identity(dim, dim) / static_cast<double>(dim)));
}

DensityOperator DensityOperator::classical(const RealVec& probs) {
  return DensityOperator(HermitianOperator::diag(probs));
}

bool DensityOperator::is_diagonal(double tol) const {
  const Mat& m = base_.mat();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (i != j && std::abs(m(i, j)) > tol) return false;
    }
  }
  return true;
}

RealVec DensityOperator::diagonal() const {
  return base_.mat().diagonal().real();
}

Povm::Povm(std::vector<HermitianOperator> elements)
    : elements_(std::move(elements)) {
  if (elements_.empty()) fail(ErrorKind::InvalidArgument, "empty POVM");
  const int d = elements_[0].dim();
  Mat sum = Mat::Zero(d, d);
  for (const auto& e : elements_) {
    if (e.dim() != d) fail(ErrorKind::DimensionMismatch, "POVM element dims");
    if (min_eigenvalue(e) < -1e-9) {
      fail(ErrorKind::NegativeEigenvalue, "POVM element is not PSD");
    }
    sum += e.mat();
  }
  const double dev = (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    fail(ErrorKind::InvalidArgument,
         "POVM elements do not sum to identity (deviation " +
             std::to_string(dev) + ")");
  }
}

StateEnsemble::StateEnsemble(std::vector<double> priors,
                             std::vector<DensityOperator> states)
    : priors_(std::move(priors)), states_(std::move(states)) {
  if (priors_.size() != states_.size() || states_.size() < 1) {
    fail(ErrorKind::InvalidArgument, "ensemble priors/states mismatch");
  }
  double sum = 0.0;
  for (double p : priors_) {
    if (p <= 0.0 || p >= 1.0) {
      fail(ErrorKind::InvalidArgument, "priors must be strictly interior");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    fail(ErrorKind::InvalidArgument, "priors do not sum to 1");
  }
  const int d = states_[0].dim();
  for (const auto& s : states_) {
    if (s.dim() != d) fail(ErrorKind::DimensionMismatch, "state dims differ");
  }
}

double StateEnsemble::min_prior() const {
  double m = 1.0;
  for (double p : priors_) m = std::min(m, p);
  return m;
}

bool StateEnsemble::is_classical(double tol) const {
  for (const auto& s : states_) {
    if (!s.is_diagonal(tol)) return false;
  }
  return true;
}

HermitianOperator support_projector(const HermitianOperator& h,
                                    double rank_tol) {
  const auto es = eig(h);
  const double thr = rank_threshold(es.values.cwiseAbs().maxCoeff(), rank_tol);
  const int d = h.dim();
  Mat p = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    if (std::abs(es.values(i)) > thr) {
      p += es.vectors.col(i) * es.vectors.col(i).adjoint();
    }
  }
  return HermitianOperator(std::move(p));
}

HermitianOperator matrix_fn_on_support(const HermitianOperator& h,
                                       const std::function<double(double)>& fn,
                                       bool require_positive) {
  const auto es = eig(h);
  const double thr = rank_threshold(es.values.cwiseAbs().maxCoeff());
  if (require_positive && es.values.minCoeff() < -thr) {
    fail(ErrorKind::NegativeEigenvalue,
         "matrix function requires a PSD argument");
  }
  const int d = h.dim();
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double lam = es.values(i);
    if (std::abs(lam) > thr) {
      out += fn(lam) * (es.vectors.col(i) * es.vectors.col(i).adjoint());
    }
  }
  return HermitianOperator(std::move(out));
}

HermitianOperator log_on_support(const HermitianOperator& h) {
  return matrix_fn_on_support(h, [](double x) { return std::log(x); }, true);
}

HermitianOperator pow_on_support(const HermitianOperator& h, double p) {
  const bool needs_positive = (p != std::floor(p)) || p < 0.0;
  return matrix_fn_on_support(
      h, [p](double x) { return std::pow(x, p); }, needs_positive);
}

HermitianOperator exp_full(const HermitianOperator& h) {
  const auto es = eig(h);
  const int d = h.dim();
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    out += std::exp(es.values(i)) *
           (es.vectors.col(i) * es.vectors.col(i).adjoint());
  }
  return HermitianOperator(std::move(out));
}

double schatten_norm(const HermitianOperator& g, double alpha) {
  if (alpha < 1.0) fail(ErrorKind::InvalidArgument, "alpha must be >= 1");
  const auto es = eig(g);
  if (std::isinf(alpha)) return es.values.cwiseAbs().maxCoeff();
  double sum = 0.0;
  for (int i = 0; i < es.values.size(); ++i) {
    sum += std::pow(std::abs(es.values(i)), alpha);
  }
  return std::pow(sum, 1.0 / alpha);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.mat(), b.mat()));
}

Mat partial_trace(const Mat& m, int d0, int d1, int which) {
  if (m.rows() != static_cast<long>(d0) * d1 || m.rows() != m.cols()) {
    fail(ErrorKind::DimensionMismatch, "partial trace dims inconsistent");
  }
  if (which == 0) {
    Mat out = Mat::Zero(d1, d1);
    for (int k = 0; k < d0; ++k) {
      out += m.block(k * d1, k * d1, d1, d1);
    }
    return out;
  }
  if (which == 1) {
    Mat out = Mat::Zero(d0, d0);
    for (int i = 0; i < d0; ++i) {
      for (int j = 0; j < d0; ++j) {
        Cplx s = 0.0;
        for (int k = 0; k < d1; ++k) s += m(i * d1 + k, j * d1 + k);
        out(i, j) = s;
      }
    }
    return out;
  }
  fail(ErrorKind::InvalidArgument, "which must be 0 or 1");
}

HermitianOperator partial_trace(const HermitianOperator& h, int d0, int d1,
                                int which) {
  return HermitianOperator(partial_trace(h.mat(), d0, d1, which));
}

HermitianOperator tensor_power(const HermitianOperator& h, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "tensor power needs n >= 1");
  Mat out = h.mat();
  for (int i = 1; i < n; ++i) out = kron(out, h.mat());
  return HermitianOperator(std::move(out));
}

DensityOperator tensor_power(const DensityOperator& rho, int n) {
  return DensityOperator(tensor_power(rho.op(), n), 1e-8);
}

Mat range_basis(const HermitianOperator& projector, double tol) {
  const auto es = eig(projector);
  int rank = 0;
  for (int i = 0; i < es.values.size(); ++i) {
    if (es.values(i) > tol) ++rank;
  }
  Mat basis(projector.dim(), rank);
  int c = 0;
  for (int i = 0; i < es.values.size(); ++i) {
    if (es.values(i) > tol) basis.col(c++) = es.vectors.col(i);
  }
  return basis;
}

HermitianOperator intersection_projector(
    const std::vector<HermitianOperator>& ops, double rank_tol) {
  if (ops.empty()) fail(ErrorKind::InvalidArgument, "empty tuple");
  const int d = ops[0].dim();
  Mat defect = Mat::Zero(d, d);
  for (const auto& h : ops) {
    defect += Mat::Identity(d, d) - support_projector(h).mat();
  }
  // Kernel of the accumulated defect is the common support.
  Eigen::SelfAdjointEigenSolver<Mat> solver(defect);
  Mat p = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    if (solver.eigenvalues()(i) < rank_tol) {
      p += solver.eigenvectors().col(i) * solver.eigenvectors().col(i).adjoint();
    }
  }
  return HermitianOperator(std::move(p));
}

Mat compress(const Mat& h, const Mat& basis) {
  return basis.adjoint() * h * basis;
}

}  // namespace pexc
