#pragma once

#include <Eigen/Dense>

namespace gpdistill {

// Input points are stored one per row: an N x d matrix.
using Points = Eigen::MatrixXd;

inline constexpr double kDefaultJitter = 1e-8;

// Scaled RBF kernel  k(a, b) = signal_variance * exp(-|a - b|^2 / (2 * length_scale)).
// Note that length_scale divides the squared distance directly (it is not squared).
struct KernelParams {
  double signal_variance = 1.0;
  double length_scale = 1.0;
  double jitter = kDefaultJitter;

  void validate() const;

  KernelParams scaled(double factor) const {
    KernelParams p = *this;
    p.signal_variance *= factor;
    return p;
  }
};

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x1,
                  const Eigen::Ref<const Eigen::VectorXd>& x2,
                  const KernelParams& params);

// Kernel matrix between two point sets (rows of `a` against rows of `b`).
Eigen::MatrixXd cross_gram(const Points& a, const Points& b, const KernelParams& params);

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelParams params;
};

// Symmetric Gram matrix of `xs`; adds params.jitter on the diagonal when requested.
GramMatrix gram(const Points& xs, const KernelParams& params, bool add_jitter);

// K = O diag(eigenvalues) O^T with eigenvalues sorted non-increasing and
// clamped to be non-negative.
struct SpectralDecomp {
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd eigenvalues;

  Eigen::Index size() const { return eigenvalues.size(); }

  // (K + shift*I)^{-1} rhs
  Eigen::MatrixXd solve_shifted(double shift, const Eigen::MatrixXd& rhs) const;
  Eigen::VectorXd solve_shifted(double shift, const Eigen::VectorXd& rhs) const;
  double log_det_shifted(double shift) const;
  Eigen::MatrixXd reconstruct() const;
};

// Negative eigenvalues with magnitude below kIndefiniteTolerance * lambda_max
// are clamped to zero; anything more negative raises IndefiniteMatrix.
inline constexpr double kIndefiniteTolerance = 1e-10;

SpectralDecomp spectral_decompose(const Eigen::MatrixXd& symmetric);
inline SpectralDecomp spectral_decompose(const GramMatrix& k) { return spectral_decompose(k.values); }

// Evenly spaced points in [lo, hi] as an n x 1 point matrix.
Points linspace_points(double lo, double hi, Eigen::Index n);

}  // namespace gpdistill
