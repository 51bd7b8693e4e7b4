#include "gvslam/beliefs.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace gvslam {

Eigen::LLT<MatrixXd> cholesky_with_jitter(const MatrixXd& m) {
  const Eigen::Index n = m.rows();
  const double trace_jitter = 1e-8 * m.trace() / static_cast<double>(n);
  const double jitters[] = {0.0, 1e-12, 1e-10, trace_jitter};
  for (double j : jitters) {
    MatrixXd candidate = m;
    candidate.diagonal().array() += j;
    Eigen::LLT<MatrixXd> llt(candidate);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw NotPositiveDefinite("cholesky_with_jitter: matrix not PD after jitter escalation");
}

void product_precision(const VectorXd& mean_a, const VectorXd& prec_a,
                       const VectorXd& mean_b, const VectorXd& prec_b,
                       VectorXd& mean_out, VectorXd& prec_out) {
  const Eigen::Index n = mean_a.size();
  if (mean_b.size() != n || prec_a.size() != n || prec_b.size() != n) {
    throw DimensionMismatch("product_precision: operand sizes differ");
  }
  prec_out = prec_a + prec_b;
  mean_out.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (prec_out[i] > 0) {
      mean_out[i] = (prec_a[i] * mean_a[i] + prec_b[i] * mean_b[i]) / prec_out[i];
    } else {
      mean_out[i] = 0.5 * (mean_a[i] + mean_b[i]);
    }
  }
}

DiagonalGaussian product_diagonal(const DiagonalGaussian& a,
                                  const DiagonalGaussian& b) {
  if (a.mean.size() != b.mean.size()) {
    throw DimensionMismatch("product_diagonal: operand sizes differ");
  }
  // sigma = inf encodes an uninformed factor (precision 0).
  auto to_precision = [](const VectorXd& stddev) {
    VectorXd p(stddev.size());
    for (Eigen::Index i = 0; i < stddev.size(); ++i) {
      p[i] = std::isinf(stddev[i]) ? 0.0 : 1.0 / (stddev[i] * stddev[i]);
    }
    return p;
  };
  VectorXd mean, prec;
  product_precision(a.mean, to_precision(a.stddev), b.mean,
                    to_precision(b.stddev), mean, prec);
  DiagonalGaussian out;
  out.mean = std::move(mean);
  out.stddev = prec.cwiseMax(0.0).cwiseSqrt().cwiseInverse();
  return out;
}

Gaussian propagate_linear(const Gaussian& prior, const MatrixXd& A,
                          const VectorXd& b, const MatrixXd& Q) {
  if (A.cols() != prior.dim() || b.size() != A.rows() || Q.rows() != A.rows() ||
      Q.cols() != A.rows()) {
    throw DimensionMismatch("propagate_linear: nonconformable shapes");
  }
  Gaussian out;
  out.mean = A * prior.mean + b;
  out.covariance = symmetrize(A * prior.covariance * A.transpose() + Q);
  return out;
}

void split_joint(const Gaussian& joint, Eigen::Index split_index,
                 Gaussian& marginal_head, LinearGaussianConditional& cond_tail) {
  const Eigen::Index n = joint.dim();
  if (split_index <= 0 || split_index >= n) {
    throw DimensionMismatch("split_joint: split_index out of range");
  }
  const Eigen::Index h = split_index;
  const Eigen::Index t = n - h;
  const MatrixXd s11 = joint.covariance.topLeftCorner(h, h);
  const MatrixXd s12 = joint.covariance.topRightCorner(h, t);
  const MatrixXd s21 = joint.covariance.bottomLeftCorner(t, h);
  const MatrixXd s22 = joint.covariance.bottomRightCorner(t, t);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(s11));
  if (es.eigenvalues().minCoeff() <= 1e-12) {
    throw SingularHeadBlock("split_joint: head covariance block singular");
  }
  const MatrixXd s11_inv = es.eigenvectors() *
                           es.eigenvalues().cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose();

  marginal_head.mean = joint.mean.head(h);
  marginal_head.covariance = symmetrize(s11);
  cond_tail.gain = s21 * s11_inv;
  cond_tail.offset = joint.mean.tail(t) - cond_tail.gain * joint.mean.head(h);
  cond_tail.noise_covariance = symmetrize(s22 - cond_tail.gain * s12);
}

Gaussian recombine(const Gaussian& marginal, const LinearGaussianConditional& cond) {
  const Eigen::Index h = marginal.dim();
  const Eigen::Index t = cond.offset.size();
  if (cond.gain.cols() != h || cond.gain.rows() != t ||
      cond.noise_covariance.rows() != t || cond.noise_covariance.cols() != t) {
    throw DimensionMismatch("recombine: nonconformable shapes");
  }
  Gaussian joint;
  joint.mean.resize(h + t);
  joint.mean << marginal.mean, cond.gain * marginal.mean + cond.offset;
  const MatrixXd cross = marginal.covariance * cond.gain.transpose();
  joint.covariance.resize(h + t, h + t);
  joint.covariance.topLeftCorner(h, h) = marginal.covariance;
  joint.covariance.topRightCorner(h, t) = cross;
  joint.covariance.bottomLeftCorner(t, h) = cross.transpose();
  joint.covariance.bottomRightCorner(t, t) =
      cond.gain * cross + cond.noise_covariance;
  joint.covariance = symmetrize(joint.covariance);
  return joint;
}

VectorXd whiten(const VectorXd& residual, const MatrixXd& covariance) {
  if (covariance.rows() != residual.size() ||
      covariance.cols() != residual.size()) {
    throw DimensionMismatch("whiten: covariance does not match residual");
  }
  auto llt = cholesky_with_jitter(covariance);
  return llt.matrixL().solve(residual);
}

double gaussian_logpdf(const VectorXd& x, const Gaussian& g) {
  if (x.size() != g.dim()) {
    throw DimensionMismatch("gaussian_logpdf: dimension mismatch");
  }
  auto llt = cholesky_with_jitter(g.covariance);
  const VectorXd w = llt.matrixL().solve(x - g.mean);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < g.dim(); ++i) {
    log_det += std::log(llt.matrixL()(i, i));
  }
  return -0.5 * w.squaredNorm() - log_det -
         0.5 * static_cast<double>(g.dim()) * std::log(2.0 * M_PI);
}

}  // namespace gvslam
