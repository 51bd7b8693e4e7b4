#pragma once

#include <vector>

#include "gvslam/geometry.hpp"

namespace gvslam {

struct TimedPoseEntry {
  double stamp = 0.0;
  Pose pose;
};

/// Regularized lower incomplete gamma P(a, x); series / continued-fraction
/// evaluation, relative error <= 1e-10.
double regularized_gamma_p(double a, double x);

/// Chi-squared CDF with `dim` degrees of freedom.
double chi_squared_cdf(double x, int dim);

/// Root-mean-square translation error after nearest-timestamp association
/// (window seconds) and optional rigid SE(3) least-squares alignment
/// (no scale). Throws NoAssociations below two pairs.
double ate_rmse(const std::vector<TimedPoseEntry>& estimated,
                const std::vector<TimedPoseEntry>& ground_truth, bool align,
                double window = 0.020);

/// Global scalar s with s^2 = mean_i (r_i^T Sigma_i^-1 r_i / dim): after
/// dividing covariances by s^-2 (i.e. scaling them by s^2), the NSSR has
/// mean 1 per dimension.
double global_scale_correction(const std::vector<Vec6d>& residuals,
                               const std::vector<Mat6d>& covariances);

struct WhitenedResiduals {
  std::vector<Vec6d> samples;      // whitened by (s^2 Sigma)^{1/2}
  Vec6d per_dimension_stddev = Vec6d::Zero();  // about zero
};

/// Pose residuals in the tangent chart at each estimated mean, whitened by
/// the scale-corrected covariances.
WhitenedResiduals whitened_residuals(const std::vector<Pose>& estimated,
                                     const std::vector<Mat6d>& covariances,
                                     const std::vector<Pose>& ground_truth,
                                     double scale_correction);

/// Normalized squared residual sums for the chi-squared calibration curve.
std::vector<double> nssr_samples(const std::vector<Pose>& estimated,
                                 const std::vector<Mat6d>& covariances,
                                 const std::vector<Pose>& ground_truth,
                                 double scale_correction);

struct CalibrationCurve {
  std::vector<double> nssr;       // ascending
  std::vector<double> predicted;  // chi-squared CDF at each sample
  std::vector<double> observed;   // empirical CDF
  double kolmogorov = 0.0;        // max |predicted - observed|
};

/// Curves above the diagonal mean the model is pessimistic. Throws
/// TooFewSamples below 10 samples.
CalibrationCurve chi_squared_curve(std::vector<double> nssr, int dim);

}  // namespace gvslam
