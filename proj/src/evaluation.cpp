#include "gvslam/evaluation.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "gvslam/beliefs.hpp"
#include "gvslam/errors.hpp"

namespace gvslam {

namespace {

constexpr double kGammaEps = 1e-14;
constexpr int kGammaMaxIter = 1000;

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kGammaMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
  // Modified Lentz evaluation of the continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxIter; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0)) throw Error("regularized_gamma_p: a must be positive");
  if (x <= 0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_squared_cdf(double x, int dim) {
  if (dim < 1) throw Error("chi_squared_cdf: dim must be >= 1");
  return regularized_gamma_p(0.5 * dim, 0.5 * x);
}

namespace {

std::vector<std::pair<int, int>> associate(
    const std::vector<TimedPoseEntry>& a, const std::vector<TimedPoseEntry>& b,
    double window) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < int(a.size()); ++i) {
    int best = -1;
    double best_dt = window;
    for (int j = 0; j < int(b.size()); ++j) {
      const double dt = std::abs(a[i].stamp - b[j].stamp);
      if (dt <= best_dt) {
        best_dt = dt;
        best = j;
      }
    }
    if (best >= 0) pairs.emplace_back(i, best);
  }
  return pairs;
}

}  // namespace

double ate_rmse(const std::vector<TimedPoseEntry>& estimated,
                const std::vector<TimedPoseEntry>& ground_truth, bool align,
                double window) {
  const auto pairs = associate(estimated, ground_truth, window);
  if (pairs.size() < 2) {
    throw NoAssociations("ate_rmse: fewer than two associated pairs");
  }
  const int n = int(pairs.size());
  Eigen::Matrix3Xd src(3, n), dst(3, n);
  for (int i = 0; i < n; ++i) {
    src.col(i) = estimated[pairs[i].first].pose.translation;
    dst.col(i) = ground_truth[pairs[i].second].pose.translation;
  }
  Eigen::Matrix4d transform = Eigen::Matrix4d::Identity();
  if (align) transform = Eigen::umeyama(src, dst, /*with_scaling=*/false);
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3d aligned =
        transform.topLeftCorner<3, 3>() * src.col(i) + transform.topRightCorner<3, 1>();
    sum_sq += (dst.col(i) - aligned).squaredNorm();
  }
  return std::sqrt(sum_sq / n);
}

double global_scale_correction(const std::vector<Vec6d>& residuals,
                               const std::vector<Mat6d>& covariances) {
  if (residuals.size() != covariances.size() || residuals.empty()) {
    throw DimensionMismatch("global_scale_correction: input sizes");
  }
  double mean_nssr = 0.0;
  for (size_t i = 0; i < residuals.size(); ++i) {
    auto llt = cholesky_with_jitter(covariances[i]);
    const VectorXd w = llt.matrixL().solve(VectorXd(residuals[i]));
    mean_nssr += w.squaredNorm() / 6.0;
  }
  mean_nssr /= double(residuals.size());
  return std::sqrt(mean_nssr);
}

WhitenedResiduals whitened_residuals(const std::vector<Pose>& estimated,
                                     const std::vector<Mat6d>& covariances,
                                     const std::vector<Pose>& ground_truth,
                                     double scale_correction) {
  if (estimated.size() != covariances.size() ||
      estimated.size() != ground_truth.size()) {
    throw DimensionMismatch("whitened_residuals: input sizes");
  }
  WhitenedResiduals out;
  out.samples.reserve(estimated.size());
  Vec6d sq_sum = Vec6d::Zero();
  for (size_t i = 0; i < estimated.size(); ++i) {
    const Vec6d r = pose_boxminus(ground_truth[i], estimated[i]);
    const Mat6d scaled =
        scale_correction * scale_correction * covariances[i];
    auto llt = cholesky_with_jitter(scaled);
    const Vec6d w = llt.matrixL().solve(VectorXd(r));
    out.samples.push_back(w);
    sq_sum += w.cwiseProduct(w);
  }
  out.per_dimension_stddev =
      (sq_sum / double(estimated.size())).cwiseSqrt();
  return out;
}

std::vector<double> nssr_samples(const std::vector<Pose>& estimated,
                                 const std::vector<Mat6d>& covariances,
                                 const std::vector<Pose>& ground_truth,
                                 double scale_correction) {
  const WhitenedResiduals w =
      whitened_residuals(estimated, covariances, ground_truth, scale_correction);
  std::vector<double> nssr(w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    nssr[i] = w.samples[i].squaredNorm();
  }
  return nssr;
}

CalibrationCurve chi_squared_curve(std::vector<double> nssr, int dim) {
  if (nssr.size() < 10) {
    throw TooFewSamples("chi_squared_curve: need at least 10 samples");
  }
  std::sort(nssr.begin(), nssr.end());
  CalibrationCurve curve;
  const int n = int(nssr.size());
  curve.nssr = std::move(nssr);
  curve.predicted.resize(n);
  curve.observed.resize(n);
  for (int i = 0; i < n; ++i) {
    curve.predicted[i] = chi_squared_cdf(curve.nssr[i], dim);
    curve.observed[i] = double(i + 1) / n;
    const double below = double(i) / n;
    curve.kolmogorov =
        std::max({curve.kolmogorov, std::abs(curve.predicted[i] - curve.observed[i]),
                  std::abs(curve.predicted[i] - below)});
  }
  return curve;
}

}  // namespace gvslam
