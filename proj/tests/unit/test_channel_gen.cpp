#include "irsfd/channel_gen.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace irsfd {
namespace {

using testing::desk_config;

TEST(Geometry, InvalidRejected) {
  GeometryConfig g;
  g.user_radius = -1.0;
  EXPECT_THROW(require_valid(g), ConfigError);
  g = {};
  g.pathloss_exp_irs = 0.0;
  EXPECT_THROW(require_valid(g), ConfigError);
}

TEST(Geometry, UsersStayInsideTheirDisks) {
  GeometryConfig g;
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const UserPositions p = draw_user_positions(g, rng);
    EXPECT_LE((p.ul - g.ul_center).norm(), g.user_radius + 1e-12);
    EXPECT_LE((p.dl - g.dl_center).norm(), g.user_radius + 1e-12);
  }
}

TEST(Geometry, PathLossFollowsDistanceLaw) {
  GeometryConfig g;
  g.normalize_to_reference = false;
  UserPositions p{g.ul_center, g.dl_center};
  const double d = (g.ul_center - g.bs).norm();
  const auto a = large_scale_gains(g, p);
  const double expect = std::pow(10.0, -3.0) * std::pow(d, -g.pathloss_exp_direct);
  EXPECT_NEAR(a[static_cast<std::size_t>(Link::ul_direct)] / expect, 1.0, 1e-12);

  GeometryConfig g2 = g;
  g2.pathloss_exp_direct *= 2.0;
  const auto b = large_scale_gains(g2, p);
  const double ratio = b[static_cast<std::size_t>(Link::ul_direct)] /
                       a[static_cast<std::size_t>(Link::ul_direct)];
  EXPECT_NEAR(ratio, std::pow(d, -g.pathloss_exp_direct), 1e-12 * ratio);
}

TEST(Geometry, DoubledExponentScalesGeneratedDraws) {
  const SystemConfig cfg = desk_config();
  GeometryConfig g;
  g.normalize_to_reference = false;
  g.user_radius = 0.0;
  GeometryConfig g2 = g;
  g2.pathloss_exp_direct *= 2.0;
  Rng r1(3), r2(3);
  const ChannelEstimates a = generate_estimates(cfg, g, r1);
  const ChannelEstimates b = generate_estimates(cfg, g2, r2);
  const double d = (g.ul_center - g.bs).norm();
  EXPECT_NEAR(b.h_k.norm() / a.h_k.norm(), std::pow(d, -g.pathloss_exp_direct / 2.0), 1e-9);
  EXPECT_EQ((a.h_thetak - b.h_thetak).norm(), 0.0);
}

TEST(Geometry, NormalizedDirectGainIsOneAtReference) {
  GeometryConfig g;
  UserPositions p{g.ul_center, g.dl_center};
  const auto a = large_scale_gains(g, p);
  EXPECT_NEAR(a[static_cast<std::size_t>(Link::ul_direct)], 1.0, 1e-12);
}

TEST(Steering, UnitNormAndUnitModulusEntries) {
  const Vec a = ula_steering(6, Point3(1.0, 2.0, 0.5));
  EXPECT_NEAR(a.norm(), 1.0, 1e-14);
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a(i)), 1.0 / std::sqrt(6.0), 1e-15);
}

TEST(Estimates, PureLosDirectLinkIsRankOne) {
  const SystemConfig cfg = desk_config();
  GeometryConfig g;
  g.rician_k_direct = 1e12;
  Rng rng(4);
  const ChannelEstimates e = generate_estimates(cfg, g, rng);
  Eigen::JacobiSVD<Mat> svd(e.h_j);
  const RealVec s = svd.singularValues();
  EXPECT_LT(s(1) / s(0), 1e-6);
}

TEST(Estimates, SameSeedIsBitwiseIdentical) {
  const SystemConfig cfg = desk_config();
  Rng a(7), b(7);
  const ChannelEstimates x = generate_estimates(cfg, {}, a);
  const ChannelEstimates y = generate_estimates(cfg, {}, b);
  for (Link l : kAllLinks) EXPECT_TRUE(x[l] == y[l]) << link_name(l);
  EXPECT_NO_THROW(require_consistent(cfg, x));
}

TEST(Estimates, RayleighEntriesHaveUnitPowerBeforeScaling) {
  SystemConfig cfg = desk_config();
  cfg.irs_rows = 50;
  cfg.irs_cols = 50;
  GeometryConfig g;
  g.user_radius = 0.0;
  g.normalize_to_reference = false;
  Rng rng(8);
  double acc = 0.0;
  long count = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const ChannelEstimates e = generate_estimates(cfg, g, rng);
    const double gain = large_scale_gains(g, {g.ul_center, g.dl_center})[static_cast<std::size_t>(Link::bs_to_irs)];
    acc += e.h_theta0.squaredNorm() / gain;
    count += e.h_theta0.size();
  }
  EXPECT_NEAR(acc / static_cast<double>(count), 1.0, 0.03);
}

TEST(CsiPolicy, VarianceFormula) {
  CsiErrorPolicy p;
  p.rho = 0.4;
  p.alpha_decay = 0.6;
  // 0.4 / 1000^0.6 = 0.4 / 63.0957... = 6.33957e-3.
  EXPECT_NEAR(csi_error_variance(p, 1000.0), 6.33957e-3, 1e-8);
  p.rho = 1.0;
  p.alpha_decay = 0.0;
  EXPECT_DOUBLE_EQ(csi_error_variance(p, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(csi_error_variance(p, 1e6), 1.0);
}

TEST(CsiPolicy, ZeroRhoGivesZeroK) {
  CsiErrorPolicy p;
  p.rho = 0.0;
  const SystemConfig cfg = desk_config();
  const ErrorCovariances e = error_covariances(p, 100.0, cfg);
  for (Link l : kAllLinks) {
    EXPECT_EQ(e[l].k_cov.norm(), 0.0);
    const LinkShape sh = link_shape(cfg, l);
    EXPECT_EQ(e[l].j_cov.rows(), sh.cols);
    EXPECT_EQ(e[l].k_cov.rows(), sh.rows);
  }
}

TEST(CsiPolicy, IidIdentityShape) {
  CsiErrorPolicy p;
  const SystemConfig cfg = desk_config();
  const ErrorCovariances e = error_covariances(p, 1000.0, cfg);
  const double s2 = csi_error_variance(p, 1000.0);
  for (Link l : kAllLinks) {
    EXPECT_EQ((e[l].j_cov - Mat::Identity(e[l].j_cov.rows(), e[l].j_cov.cols())).norm(), 0.0);
    EXPECT_NEAR((e[l].k_cov - s2 * Mat::Identity(e[l].k_cov.rows(), e[l].k_cov.cols())).norm(), 0.0, 1e-15);
  }
}

TEST(CsiPolicy, CustomNonPsdRejected) {
  const SystemConfig cfg = desk_config();
  CsiErrorPolicy p;
  p.structure = ErrorStructure::custom;
  ErrorCovariances e = ErrorCovariances::zeros(cfg);
  e[Link::cross].k_cov = -Mat::Identity(cfg.nj, cfg.nj);
  p.custom = e;
  EXPECT_THROW(error_covariances(p, 10.0, cfg), ConfigError);
  p.rho = -1.0;
  EXPECT_THROW(require_valid(p), ConfigError);
}

TEST(SampleError, ZeroJGivesZero) {
  Rng rng(1);
  const Mat d = sample_error(Mat::Zero(2, 2), Mat::Identity(3, 3), rng);
  EXPECT_EQ(d.norm(), 0.0);
  EXPECT_EQ(d.rows(), 3);
  EXPECT_EQ(d.cols(), 2);
}

TEST(SampleError, IidVariance) {
  Rng rng(2);
  const double s2 = 0.3;
  const int draws = 25000;
  double acc = 0.0;
  for (int n = 0; n < draws; ++n) acc += sample_error(Mat::Identity(2, 2), s2 * Mat::Identity(2, 2), rng).squaredNorm();
  EXPECT_NEAR(acc / (4.0 * draws) / s2, 1.0, 0.03);
}

TEST(SampleError, KroneckerIdentitiesByMonteCarlo) {
  Rng rng(3);
  const Mat j = random_psd(2, 1.0, rng);
  const Mat k = random_psd(3, 1.0, rng);
  const Mat x2 = rng.complex_normal(2, 2);
  const Mat x3 = rng.complex_normal(3, 3);
  const int draws = 100000;
  Mat outer = Mat::Zero(3, 3), inner = Mat::Zero(2, 2);
  for (int n = 0; n < draws; ++n) {
    const Mat d = sample_error(j, k, rng);
    outer += d * x2 * d.adjoint();
    inner += d.adjoint() * x3 * d;
  }
  outer /= draws;
  inner /= draws;
  EXPECT_LT(relative_error(outer, Mat((x2 * j.transpose()).trace() * k)), 0.02);
  EXPECT_LT(relative_error(inner, Mat((k * x3).trace() * j.transpose())), 0.02);
}

TEST(TrueChannels, ZeroCovariancesReturnEstimates) {
  const SystemConfig cfg = desk_config();
  Rng rng(5);
  const ChannelEstimates e = generate_estimates(cfg, {}, rng);
  const TrueChannels t = sample_true_channels(e, ErrorCovariances::zeros(cfg), rng);
  for (Link l : kAllLinks) EXPECT_TRUE(t[l] == e[l]);
}

TEST(TrueChannels, SampleMeanApproachesEstimate) {
  SystemConfig cfg = desk_config();
  cfg.irs_rows = 1;
  cfg.irs_cols = 2;
  Rng rng(6);
  const ChannelEstimates e = generate_estimates(cfg, {}, rng);
  CsiErrorPolicy p;
  p.rho = 1.0;
  p.alpha_decay = 0.0;
  const ErrorCovariances err = error_covariances(p, 1.0, cfg);
  const ErrorSampler sampler(err);
  const int draws = 100000;
  Mat acc = Mat::Zero(e.h_k.rows(), e.h_k.cols());
  for (int n = 0; n < draws; ++n) acc += sampler.sample(e, rng).h_k;
  // Relative to the estimate norm; error std per entry is 1/sqrt(draws).
  EXPECT_LT((acc / draws - e.h_k).norm() / e.h_k.norm(), 0.02);
}

TEST(TrueChannels, FixedSeedReproducible) {
  const SystemConfig cfg = desk_config();
  Rng r0(9);
  const ChannelEstimates e = generate_estimates(cfg, {}, r0);
  const ErrorCovariances err = error_covariances({}, 100.0, cfg);
  Rng a(11), b(11);
  const TrueChannels x = sample_true_channels(e, err, a);
  const TrueChannels y = sample_true_channels(e, err, b);
  for (Link l : kAllLinks) EXPECT_TRUE(x[l] == y[l]);
}

}  // namespace
}  // namespace irsfd
