#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gvslam/errors.hpp"

namespace gvslam {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dense multivariate Gaussian (moment form).
struct Gaussian {
  VectorXd mean;
  MatrixXd covariance;

  Gaussian() = default;
  Gaussian(VectorXd mu, MatrixXd cov)
      : mean(std::move(mu)), covariance(std::move(cov)) {}

  Eigen::Index dim() const { return mean.size(); }
};

/// Conditional N(y | gain * x + offset, noise_covariance).
struct LinearGaussianConditional {
  MatrixXd gain;
  VectorXd offset;
  MatrixXd noise_covariance;
};

/// Axis-aligned Gaussian, stddev parameterization.
struct DiagonalGaussian {
  VectorXd mean;
  VectorXd stddev;
};

inline MatrixXd symmetrize(const MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// Cholesky with jitter escalation: tries the matrix as given, then with
/// diagonal jitter 1e-12, 1e-10 and 1e-8 * trace / n added before failing
/// with NotPositiveDefinite.
Eigen::LLT<MatrixXd> cholesky_with_jitter(const MatrixXd& m);

/// Product of two axis-aligned Gaussians in precision form: precisions add,
/// means combine precision-weighted. Precision 0 encodes an uninformed
/// factor. If the summed precision of a component is 0 the output mean is
/// the average of the two inputs (degenerate, documented convention).
void product_precision(const VectorXd& mean_a, const VectorXd& prec_a,
                       const VectorXd& mean_b, const VectorXd& prec_b,
                       VectorXd& mean_out, VectorXd& prec_out);

DiagonalGaussian product_diagonal(const DiagonalGaussian& a,
                                  const DiagonalGaussian& b);

/// Pushes the prior through y = A x + b + noise, noise ~ N(0, Q).
/// Output covariance is symmetrized.
Gaussian propagate_linear(const Gaussian& prior, const MatrixXd& A,
                          const VectorXd& b, const MatrixXd& Q);

/// Splits a joint over (head, tail) at split_index into the head marginal
/// and the conditional tail | head. Throws SingularHeadBlock when the head
/// covariance block is singular (min eigenvalue <= 1e-12).
void split_joint(const Gaussian& joint, Eigen::Index split_index,
                 Gaussian& marginal_head, LinearGaussianConditional& cond_tail);

/// Inverse of split_joint: assembles the joint over (head, tail).
Gaussian recombine(const Gaussian& marginal, const LinearGaussianConditional& cond);

/// L^-1 r for the lower Cholesky factor L of covariance.
VectorXd whiten(const VectorXd& residual, const MatrixXd& covariance);

/// Log density of N(mean, covariance) at x.
double gaussian_logpdf(const VectorXd& x, const Gaussian& g);

}  // namespace gvslam
