#include "spherefield/linalg.hpp"

#include <cmath>
#include <sstream>

#include "spherefield/errors.hpp"

namespace spherefield {

PsdFactor factorize_psd(const Eigen::MatrixXd& k) {
  const Eigen::Index n = k.rows();
  if (n == 0 || k.cols() != n) throw DomainError("factorize_psd: need a nonempty square matrix");
  if (!k.allFinite()) throw NumericalError("factorize_psd: matrix has non-finite entries");

  PsdFactor out;
  out.jitter = kRelativeJitter * std::abs(k(0, 0));
  Eigen::MatrixXd shifted = k;
  shifted.diagonal().array() += out.jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() == Eigen::Success) {
    out.root = llt.matrixL();
    if (out.root.allFinite()) return out;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  if (eig.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "factorize_psd: Cholesky and eigen fallback both failed (n=" << n
        << ", K00=" << k(0, 0) << ")";
    throw NumericalError(msg.str());
  }
  Eigen::VectorXd lam = eig.eigenvalues();
  out.eigen_fallback = true;
  out.jitter = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam(i) < 0.0) {
      out.clipped_mass += -lam(i);
      lam(i) = 0.0;
    }
  }
  if (lam.maxCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "factorize_psd: matrix has no positive spectrum (clipped mass " << out.clipped_mass << ")";
    throw NumericalError(msg.str());
  }
  out.root = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigensolve failed");
  return eig.eigenvalues()(0);
}

}  // namespace spherefield
