#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gvslam/config.hpp"
#include "gvslam/tracker.hpp"
#include "gvslam/worlds.hpp"
#include "test_helpers.hpp"

using namespace gvslam;

namespace {

TrackerParams default_params() {
  TrackerParams p;
  p.sigma_geo = 0.02;
  p.sigma_color = 0.1;
  return p;
}

std::vector<int> all_pixels(const RgbdFrame& frame) {
  std::vector<int> pixels(size_t(frame.height()) * frame.width());
  for (size_t i = 0; i < pixels.size(); ++i) pixels[i] = int(i);
  return pixels;
}

Gaussian wide_prior(const double sigma_t = 1.0, const double sigma_r = 0.5) {
  Gaussian prior;
  prior.mean = VectorXd::Zero(6);
  Vec6d diag;
  diag << sigma_t * sigma_t, sigma_t * sigma_t, sigma_t * sigma_t,
      sigma_r * sigma_r, sigma_r * sigma_r, sigma_r * sigma_r;
  prior.covariance = diag.asDiagonal();
  return prior;
}

/// Camera 2 m above the z = 0 floor, looking straight down.
Pose top_down_pose() {
  Mat3d R;
  R.col(0) = Vec3d(1, 0, 0);
  R.col(1) = Vec3d(0, -1, 0);
  R.col(2) = Vec3d(0, 0, -1);
  return Pose(Vec3d(0, 0, 2.0), Eigen::Quaterniond(R));
}

SyntheticScene floor_scene() {
  SyntheticScene scene;
  ScenePrimitive b;
  b.kind = ScenePrimitive::Kind::Box;
  b.center = Vec3d(0, 0, -0.5);
  b.half_extents = Vec3d(50, 50, 0.5);
  b.albedo = Vec3f(0.5f, 0.5f, 0.5f);
  scene.primitives = {b};
  return scene;
}

AnchorFrame room_anchor(const Pose& pose, const CameraIntrinsics& k) {
  AppConfig app;
  return make_anchor(pose, render_ground_truth(make_scene(app), pose, k), 0.3);
}

}  // namespace

TEST_SUITE("tracker") {

TEST_CASE("tracking_residuals: self-alignment is exactly zero") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const Pose pose(Vec3d(0.4, -0.2, 0), Eigen::Quaterniond::Identity());
  const AnchorFrame anchor = room_anchor(pose, k);
  const TrackerParams params = default_params();

  const PixelResiduals res =
      tracking_residuals(pose, anchor.frame, anchor, all_pixels(anchor.frame), params);
  int n_valid = 0;
  for (size_t i = 0; i < res.valid.size(); ++i) {
    if (!res.valid[i]) continue;
    ++n_valid;
    CHECK(std::abs(res.geo[i]) < 1e-5);
    CHECK(res.photo[i].cwiseAbs().maxCoeff() < 1e-5);
  }
  CHECK(n_valid > 300);
}

TEST_CASE("tracking_residuals: offset along the plane normal") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const RgbdFrame wall = test::wall_frame(k, 2.0);
  const AnchorFrame anchor = make_anchor(Pose::Identity(), wall, 0.3);
  const TrackerParams params = default_params();

  // Hypothesis: camera shifted 1 cm toward the wall.
  const Pose candidate(Vec3d(0, 0, 0.01), Eigen::Quaterniond::Identity());
  const PixelResiduals res =
      tracking_residuals(candidate, wall, anchor, all_pixels(wall), params);
  int n_valid = 0;
  for (size_t i = 0; i < res.valid.size(); ++i) {
    if (!res.valid[i]) continue;
    ++n_valid;
    CHECK(std::abs(res.geo[i] * params.sigma_geo) ==
          doctest::Approx(0.01).epsilon(1e-5));
    CHECK(res.geo[i] > 0.0);  // signs consistent
  }
  CHECK(n_valid > 300);
}

TEST_CASE("tracking_residuals: sliding along a textureless plane is invisible") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const RgbdFrame wall = test::wall_frame(k, 2.0);
  const AnchorFrame anchor = make_anchor(Pose::Identity(), wall, 0.3);
  const TrackerParams params = default_params();

  const Pose candidate(Vec3d(0.02, 0.013, 0), Eigen::Quaterniond::Identity());
  const PixelResiduals res =
      tracking_residuals(candidate, wall, anchor, all_pixels(wall), params);
  int n_valid = 0;
  for (size_t i = 0; i < res.valid.size(); ++i) {
    if (!res.valid[i]) continue;
    ++n_valid;
    CHECK(std::abs(res.geo[i]) < 1e-6);
    CHECK(res.photo[i].cwiseAbs().maxCoeff() < 1e-6);
  }
  CHECK(n_valid > 300);
}

TEST_CASE("tracking_residuals: throws when nothing is valid") {
  const CameraIntrinsics k = test::small_camera(8, 6);
  RgbdFrame obs = test::wall_frame(k, 2.0);
  for (int r = 0; r < k.height; ++r)
    for (int c = 0; c < k.width; ++c) obs.valid(r, c) = 0;
  const AnchorFrame anchor = make_anchor(Pose::Identity(), test::wall_frame(k, 2.0), 0.3);
  CHECK_THROWS_AS(
      tracking_residuals(Pose::Identity(), obs, anchor, all_pixels(obs), default_params()),
      NoValidPixels);
}

TEST_CASE("prior_logpdf: maximum at the mean, quadratic decay, FD gradient") {
  const Pose anchor = Pose(Vec3d(1, 2, 3), quat_exp<double>(Vec3d(0.2, 0, 0.1)));
  const Gaussian prior = wide_prior(0.3, 0.2);

  const PriorEval at_mean = prior_logpdf(anchor, prior, anchor);
  CHECK(at_mean.gradient.norm() < 1e-12);

  Vec6d step = Vec6d::Zero();
  step[1] = 0.1;
  const double drop1 =
      at_mean.logpdf - prior_logpdf(pose_boxplus(anchor, step), prior, anchor).logpdf;
  step[1] = 0.2;
  const double drop2 =
      at_mean.logpdf - prior_logpdf(pose_boxplus(anchor, step), prior, anchor).logpdf;
  CHECK(drop2 == doctest::Approx(4.0 * drop1).epsilon(1e-9));

  for (int trial = 0; trial < 20; ++trial) {
    const Vec6d v = 0.3 * Vec6d::Random();
    const Pose candidate = pose_boxplus(anchor, v);
    const PriorEval eval = prior_logpdf(candidate, prior, anchor);
    const double h = 1e-6;
    for (int j = 0; j < 6; ++j) {
      Vec6d vp = v, vm = v;
      vp[j] += h;
      vm[j] -= h;
      const double fd =
          (prior_logpdf(pose_boxplus(anchor, vp), prior, anchor).logpdf -
           prior_logpdf(pose_boxplus(anchor, vm), prior, anchor).logpdf) /
          (2 * h);
      CHECK(eval.gradient[j] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("descent direction matches central finite differences") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const Pose truth(Vec3d(0.3, 0.1, 0), Eigen::Quaterniond::Identity());
  const AnchorFrame anchor = room_anchor(truth, k);
  const RgbdFrame obs = render_ground_truth(make_scene(AppConfig{}), truth, k);
  const TrackerParams params = default_params();
  const Gaussian prior = wide_prior();

  auto gen = test::rng(72);
  std::vector<int> pixels;
  std::uniform_int_distribution<int> pick(0, k.width * k.height - 1);
  for (int i = 0; i < 300; ++i) pixels.push_back(pick(gen));

  // Evaluate away from the optimum so residual signs are stable.
  const Pose candidate = pose_boxplus(truth, 0.02 * Vec6d::Ones().normalized());
  const ObjectiveEval eval =
      tracking_objective(candidate, obs, anchor, prior, truth, pixels, params);
  REQUIRE(eval.n_valid > 100);

  const double h = 1e-7;
  Vec6d fd;
  for (int j = 0; j < 6; ++j) {
    Vec6d d = Vec6d::Zero();
    d[j] = h;
    const double plus = tracking_objective(pose_boxplus(candidate, d), obs, anchor,
                                           prior, truth, pixels, params)
                            .value;
    d[j] = -h;
    const double minus = tracking_objective(pose_boxplus(candidate, d), obs, anchor,
                                            prior, truth, pixels, params)
                             .value;
    fd[j] = (plus - minus) / (2 * h);
  }
  const double cosine = eval.gradient.dot(fd) / (eval.gradient.norm() * fd.norm());
  CHECK(cosine > 0.999);
  CHECK((eval.gradient - fd).norm() / fd.norm() < 5e-3);
}

TEST_CASE("optimize_pose: fixed point at the truth") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const Pose truth(Vec3d(0.25, -0.1, 0), Eigen::Quaterniond::Identity());
  const AnchorFrame anchor = room_anchor(truth, k);
  const RgbdFrame obs = anchor.frame;
  TrackerParams params = default_params();
  params.steps = 400;
  auto rng = test::rng(73);

  TrackingDiagnostics diag;
  const Pose result = optimize_pose(obs, anchor, wide_prior(), truth, truth, params,
                                    rng, &diag);
  CHECK((result.translation - truth.translation).norm() < 1e-3);
  CHECK(rotation_distance(result, truth) < 1e-3);
  CHECK(diag.mean_abs_geo < 0.01);
}

TEST_CASE("optimize_pose: recovers a perturbed initialization") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const Pose truth(Vec3d(0.3, 0.2, 0), quat_exp<double>(Vec3d(0, 0, 0.4)));
  const AnchorFrame anchor = room_anchor(truth, k);
  const RgbdFrame obs = anchor.frame;
  TrackerParams params = default_params();
  auto rng = test::rng(74);

  // 5 cm + 5 degrees off.
  Vec6d offset;
  offset << 0.03, -0.03, 0.02, 0.0, 0.05, 0.07;
  offset.head<3>() *= 0.05 / offset.head<3>().norm();
  offset.tail<3>() *= (5.0 * M_PI / 180.0) / offset.tail<3>().norm();
  const Pose init = pose_boxplus(truth, offset);

  const Pose result =
      optimize_pose(obs, anchor, wide_prior(), truth, init, params, rng, nullptr);
  CHECK((result.translation - truth.translation).norm() < 0.01);
  CHECK(rotation_distance(result, truth) < M_PI / 180.0);
}

TEST_CASE("optimize_pose: prior resolves the sliding directions of a flat wall") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const RgbdFrame wall = test::wall_frame(k, 2.0);
  const AnchorFrame anchor = make_anchor(Pose::Identity(), wall, 0.3);
  TrackerParams params = default_params();
  params.steps = 600;
  auto rng = test::rng(75);

  const double prior_sigma = 0.05;
  const Gaussian prior = wide_prior(prior_sigma, 0.02);
  const Pose init(Vec3d(0.03, -0.02, 0.015), Eigen::Quaterniond::Identity());
  const Pose result = optimize_pose(wall, anchor, prior, Pose::Identity(), init,
                                    params, rng, nullptr);
  // The in-plane components are informed only by the prior.
  CHECK(std::abs(result.translation.x()) <= prior_sigma);
  CHECK(std::abs(result.translation.y()) <= prior_sigma);
  // The normal direction is fixed by geometry.
  CHECK(std::abs(result.translation.z()) < 0.005);
}

TEST_CASE("optimize_pose: all-invalid observation raises TrackingLost") {
  const CameraIntrinsics k = test::small_camera(16, 12);
  RgbdFrame obs = test::wall_frame(k, 2.0);
  for (int r = 0; r < k.height; ++r)
    for (int c = 0; c < k.width; ++c) obs.valid(r, c) = 0;
  const AnchorFrame anchor = make_anchor(Pose::Identity(), test::wall_frame(k, 2.0), 0.3);
  TrackerParams params = default_params();
  params.steps = 5;
  auto rng = test::rng(76);
  CHECK_THROWS_AS(optimize_pose(obs, anchor, wide_prior(), Pose::Identity(),
                                Pose::Identity(), params, rng, nullptr),
                  TrackingLost);
}

TEST_CASE("objective descent: final full-image objective below the initial one") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const Pose truth(Vec3d(0.1, 0.4, 0), quat_exp<double>(Vec3d(0, 0, -0.3)));
  const AnchorFrame anchor = room_anchor(truth, k);
  const RgbdFrame obs = anchor.frame;
  TrackerParams params = default_params();
  params.steps = 300;
  auto rng = test::rng(77);
  const Gaussian prior = wide_prior();

  const Pose init = pose_boxplus(truth, 0.04 * Vec6d::Ones().normalized());
  const Pose result =
      optimize_pose(obs, anchor, prior, truth, init, params, rng, nullptr);

  const auto pixels = all_pixels(obs);
  const double before =
      tracking_objective(init, obs, anchor, prior, truth, pixels, params).value;
  const double after =
      tracking_objective(result, obs, anchor, prior, truth, pixels, params).value;
  CHECK(after <= before);
}

TEST_CASE("laplace_covariance: prior-only objective returns half the prior") {
  const CameraIntrinsics k = test::small_camera(16, 12);
  RgbdFrame obs = test::wall_frame(k, 2.0);
  for (int r = 0; r < k.height; ++r)
    for (int c = 0; c < k.width; ++c) obs.valid(r, c) = 0;
  const AnchorFrame anchor = make_anchor(Pose::Identity(), test::wall_frame(k, 2.0), 0.3);
  const Gaussian prior = wide_prior(0.2, 0.1);

  const Mat6d cov = laplace_covariance(Pose::Identity(), obs, anchor, prior,
                                       Pose::Identity(), default_params());
  CHECK((cov - 0.5 * prior.covariance).cwiseAbs().maxCoeff() <
        1e-6 * prior.covariance.norm());
}

TEST_CASE("laplace_covariance: floor view pins the floor-normal translation") {
  const CameraIntrinsics k = test::small_camera(40, 30, 35.0, 10.0);
  const Pose pose = top_down_pose();
  const RgbdFrame obs = render_ground_truth(floor_scene(), pose, k);
  const AnchorFrame anchor = make_anchor(pose, obs, 0.3);

  const Mat6d cov = laplace_covariance(pose, obs, anchor, wide_prior(), pose,
                                       default_params());
  const Mat3d trans = cov.topLeftCorner<3, 3>();
  Eigen::SelfAdjointEigenSolver<Mat3d> es(trans);
  const Vec3d softest = es.eigenvectors().col(0);  // smallest variance
  const double angle = std::acos(std::min(1.0, std::abs(softest.z())));
  CHECK(angle < 5.0 * M_PI / 180.0);
  // And it is decisively smaller than the in-plane variances.
  CHECK(es.eigenvalues()(0) * 100.0 < es.eigenvalues()(1));
}

TEST_CASE("laplace_covariance: doubled residual rows halve the covariance") {
  const CameraIntrinsics k = test::small_camera(32, 24, 28.0, 10.0);
  const Pose truth(Vec3d(0.2, 0.0, 0), Eigen::Quaterniond::Identity());
  const AnchorFrame anchor = room_anchor(truth, k);
  const RgbdFrame obs = anchor.frame;
  // A nearly flat prior so the pixel rows dominate.
  const Gaussian prior = wide_prior(1e3, 1e3);
  const TrackerParams params = default_params();

  const Mat6d cov1 = laplace_covariance(truth, obs, anchor, prior, truth, params);

  // Duplicating every pixel row in J is exactly scaling each row by sqrt(2):
  // J^T J doubles either way. Emulate it through the residual scales (the
  // raw-value outlier gates are untouched, so the row set stays identical).
  TrackerParams doubled = params;
  doubled.sigma_geo = params.sigma_geo / std::sqrt(2.0);
  doubled.sigma_color = params.sigma_color / std::sqrt(2.0);
  const Mat6d cov2 = laplace_covariance(truth, obs, anchor, prior, truth, doubled);
  for (int i = 0; i < 6; ++i) {
    CHECK(cov2(i, i) == doctest::Approx(0.5 * cov1(i, i)).epsilon(0.02));
    // Added information never increases any diagonal entry.
    CHECK(cov2(i, i) <= cov1(i, i) + 1e-15);
  }
}

TEST_CASE("smooth_covariance") {
  const Mat6d a = 2.0 * Mat6d::Identity();
  const Mat6d b = 4.0 * Mat6d::Identity();
  CHECK((smooth_covariance(a, nullptr, 0.8) - a).norm() == 0.0);
  CHECK((smooth_covariance(a, &a, 0.8) - a).norm() == 0.0);
  CHECK((smooth_covariance(a, &b, 0.0) - a).norm() == 0.0);

  // Constant input: geometric convergence at rate ema.
  Mat6d state = b;
  for (int k = 1; k <= 5; ++k) {
    state = smooth_covariance(a, &state, 0.8);
    const double gap = (state - a).norm();
    const double expected = std::pow(0.8, k) * (b - a).norm();
    CHECK(gap == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("fuse_velocity: independence, deterministic pose, split round trip") {
  Gaussian pose_belief(VectorXd::Zero(6), 0.3 * MatrixXd::Identity(6, 6));
  LinearGaussianConditional cond;
  cond.gain = MatrixXd::Zero(6, 6);
  cond.offset = VectorXd::Constant(6, 0.7);
  cond.noise_covariance = 0.2 * MatrixXd::Identity(6, 6);

  const StateBelief indep = fuse_velocity(pose_belief, cond, Pose::Identity());
  CHECK((indep.mean_velocity.vector() - cond.offset).norm() < 1e-12);
  CHECK(indep.covariance.topRightCorner<6, 6>().norm() == doctest::Approx(0.0));

  Gaussian deterministic(VectorXd::Zero(6), MatrixXd::Zero(6, 6));
  cond.gain = 0.5 * MatrixXd::Identity(6, 6);
  const StateBelief det = fuse_velocity(deterministic, cond, Pose::Identity());
  CHECK((det.covariance.bottomRightCorner<6, 6>() - cond.noise_covariance).norm() <
        1e-12);

  auto gen = test::rng(78);
  Gaussian belief(VectorXd::Random(6), test::random_psd(gen, 6));
  cond.gain = MatrixXd::Random(6, 6);
  cond.offset = VectorXd::Random(6);
  cond.noise_covariance = test::random_psd(gen, 6, 0.3);
  const Pose anchor = test::random_pose(gen);
  const StateBelief fused = fuse_velocity(belief, cond, anchor);

  Gaussian head;
  LinearGaussianConditional tail;
  split_joint(Gaussian(VectorXd(
                  (VectorXd(12) << belief.mean,
                   cond.gain * belief.mean + cond.offset).finished()),
              MatrixXd(fused.covariance)),
              6, head, tail);
  CHECK((head.mean - belief.mean).norm() < 1e-9);
  CHECK((head.covariance - belief.covariance).norm() < 1e-9);
  CHECK((tail.gain - cond.gain).norm() < 1e-6);
  CHECK((tail.noise_covariance - cond.noise_covariance).norm() < 1e-6);

  // Mean pose composes the tangent onto the anchor chart.
  const Vec6d back = pose_boxminus(fused.mean_pose, anchor);
  CHECK((back - Vec6d(belief.mean)).norm() < 1e-9);
}

}  // TEST_SUITE
