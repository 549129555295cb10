#pragma once

#include <Eigen/Dense>

namespace spherefield {

// Square-root factor F of a symmetric PSD matrix K, so that F F^T ~ K.
// Tries Cholesky on K + jitter I first (jitter = 1e-12 K(0,0)); if that
// breaks down, falls back to a symmetric eigensolve with negative
// eigenvalues clipped to zero. clipped_mass is the total clipped amount.
struct PsdFactor {
  Eigen::MatrixXd root;
  double jitter = 0.0;
  double clipped_mass = 0.0;
  bool eigen_fallback = false;
};

inline constexpr double kRelativeJitter = 1e-12;

PsdFactor factorize_psd(const Eigen::MatrixXd& k);

// Minimum eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& k);

}  // namespace spherefield
