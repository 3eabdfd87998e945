#include "gpdistill/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpdistill/errors.hpp"

namespace gpdistill {

void KernelParams::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
    throw InvalidArgument("signal_variance must be positive, got " + std::to_string(signal_variance));
  if (!(length_scale > 0.0) || !std::isfinite(length_scale))
    throw InvalidArgument("length_scale must be positive, got " + std::to_string(length_scale));
  if (!(jitter >= 0.0) || !std::isfinite(jitter))
    throw InvalidArgument("jitter must be non-negative, got " + std::to_string(jitter));
}

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x1,
                  const Eigen::Ref<const Eigen::VectorXd>& x2,
                  const KernelParams& params) {
  if (x1.size() != x2.size())
    throw InvalidArgument("rbf_kernel: dimension mismatch (" + std::to_string(x1.size()) + " vs " +
                          std::to_string(x2.size()) + ")");
  const double sq = (x1 - x2).squaredNorm();
  return params.signal_variance * std::exp(-sq / (2.0 * params.length_scale));
}

Eigen::MatrixXd cross_gram(const Points& a, const Points& b, const KernelParams& params) {
  if (a.cols() != b.cols())
    throw InvalidArgument("cross_gram: dimension mismatch (" + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.cols()) + ")");
  Eigen::MatrixXd out(a.rows(), b.rows());
  const double scale = -1.0 / (2.0 * params.length_scale);
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double sq = (a.row(i) - b.row(j)).squaredNorm();
      out(i, j) = params.signal_variance * std::exp(sq * scale);
    }
  }
  return out;
}

GramMatrix gram(const Points& xs, const KernelParams& params, bool add_jitter) {
  if (xs.rows() == 0) throw InvalidArgument("gram: empty input");
  params.validate();
  const Eigen::Index n = xs.rows();
  const double scale = -1.0 / (2.0 * params.length_scale);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = params.signal_variance;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = params.signal_variance * std::exp((xs.row(i) - xs.row(j)).squaredNorm() * scale);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  if (add_jitter) k.diagonal().array() += params.jitter;
  return {std::move(k), params};
}

SpectralDecomp spectral_decompose(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0)
    throw InvalidArgument("spectral_decompose: expected a non-empty square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw NumericalError("spectral_decompose: eigensolver failed");

  // Eigen returns ascending order.
  const Eigen::Index n = symmetric.rows();
  SpectralDecomp d;
  d.eigenvalues = solver.eigenvalues().reverse();
  d.eigenvectors = solver.eigenvectors().rowwise().reverse();

  const double lambda_max = std::max(d.eigenvalues(0), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double& v = d.eigenvalues(i);
    if (v >= 0.0) continue;
    if (-v > kIndefiniteTolerance * lambda_max)
      throw IndefiniteMatrix("spectral_decompose: eigenvalue " + std::to_string(v) +
                             " below -1e-10 * lambda_max (lambda_max = " + std::to_string(lambda_max) + ")");
    v = 0.0;
  }
  return d;
}

Eigen::MatrixXd SpectralDecomp::solve_shifted(double shift, const Eigen::MatrixXd& rhs) const {
  const Eigen::VectorXd inv = (eigenvalues.array() + shift).inverse().matrix();
  return eigenvectors * (inv.asDiagonal() * (eigenvectors.transpose() * rhs));
}

Eigen::VectorXd SpectralDecomp::solve_shifted(double shift, const Eigen::VectorXd& rhs) const {
  const Eigen::VectorXd proj = eigenvectors.transpose() * rhs;
  return eigenvectors * (proj.array() / (eigenvalues.array() + shift)).matrix();
}

double SpectralDecomp::log_det_shifted(double shift) const {
  return (eigenvalues.array() + shift).log().sum();
}

Eigen::MatrixXd SpectralDecomp::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

Points linspace_points(double lo, double hi, Eigen::Index n) {
  Points p(n, 1);
  if (n == 1) {
    p(0, 0) = lo;
    return p;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    p(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return p;
}

}  // namespace gpdistill
