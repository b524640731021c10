#include "mtorus/foliation.hpp"
#include "mtorus/kernels.hpp"
#include "mtorus/tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mtorus;

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> z;
  for (int i = 0; i < n; ++i) z.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return z;
}

// A metric whose x~ direction is coupled to the half-plane.
MetricField twisted_metric() {
  return MetricField(
      [](const Vec3& p) {
        Mat3 g = Mat3::Identity();
        g(1, 1) = std::pow(p[2], 4);
        g(0, 1) = g(1, 0) = 0.2 * p[2];
        return g;
      },
      std::nullopt, "twisted");
}

}  // namespace

TEST(Leaves, SplitPredicate) {
  EXPECT_FALSE(straddles_split(kXt, kXt, kXt));
  EXPECT_FALSE(straddles_split(kYt, kZ, kYt));
  EXPECT_TRUE(straddles_split(kXt, kYt, kZ));
  EXPECT_TRUE(straddles_split(kYt, kXt, kXt));
  EXPECT_TRUE(straddles_split(kZ, kZ, kXt));
}

TEST(Leaves, InducedMetrics) {
  const auto m = model_metric();
  EXPECT_EQ(induced_line_metric(m, {3, -2, 0.4}), 1.0);
  const auto leaf = induced_halfplane_metric(m, 0.7);
  const Mat2 g = metric_at(leaf, Vec2(1.0, 2.0));
  EXPECT_DOUBLE_EQ(g(0, 0), 16.0);
  EXPECT_DOUBLE_EQ(g(1, 1), 1.0);
  EXPECT_EQ(g(0, 1), 0.0);
  ASSERT_TRUE(leaf.has_exact_partials());
  EXPECT_DOUBLE_EQ(leaf.exact_partials(Vec2(1.0, 2.0))[1](0, 0), 32.0);
}

TEST(LineLeaf, CompleteAndFlat) {
  const auto r = leaf_first_check(model_metric());
  EXPECT_EQ(r.geodesic.kind, Termination::Kind::completed);
  EXPECT_DOUBLE_EQ(r.geodesic.t, 1e3);
  EXPECT_EQ(r.horizon, 1e3);
  EXPECT_EQ(r.induced_metric_variation, 0.0);
  EXPECT_EQ(r.induced_metric_deviation, 0.0);
  EXPECT_LT(r.off_leaf_drift, 1e-7);
  EXPECT_LT(r.tangent_transport_defect, 1e-10);
  EXPECT_FALSE(r.note.empty());
}

TEST(HalfPlaneLeaf, CurvatureAndEscape) {
  auto zs = log_spaced(0.05, 20.0, 50);
  zs.push_back(1.0);
  zs.push_back(2.0);
  const auto r = leaf_second_check(model_metric(), zs);
  ASSERT_EQ(r.gaussian_curvature.size(), zs.size());
  EXPECT_LT(r.max_rel_defect, 1e-6);
  for (std::size_t i = 0; i < zs.size(); ++i) EXPECT_NEAR(r.gaussian_curvature[i] * zs[i] * zs[i], -2.0, 2e-6);
  EXPECT_EQ(r.escape.kind, Termination::Kind::boundary_escape);
  EXPECT_NEAR(r.escape.t_exit, 1.0, 1e-6);
  EXPECT_LT(r.off_leaf_drift, 1e-7);
}

TEST(HalfPlaneLeaf, PolicyDoesNotChangeResult) {
  const auto zs = log_spaced(0.1, 10.0, 20);
  const auto a = leaf_second_check(model_metric(), zs, {}, Exec::serial);
  const auto b = leaf_second_check(model_metric(), zs, {}, Exec::parallel);
  EXPECT_EQ(a.gaussian_curvature, b.gaussian_curvature);
  EXPECT_EQ(a.off_leaf_drift, b.off_leaf_drift);
}

TEST(ProductSplit, ModelMetric) {
  const auto r = product_split_check(model_metric(), sample_points(12, 100));
  EXPECT_EQ(r.points, 100u);
  EXPECT_EQ(r.off_block_max, 0.0);
  EXPECT_EQ(r.line_block_variation, 0.0);
  EXPECT_EQ(r.halfplane_block_dependence, 0.0);
  EXPECT_LT(r.mixed_christoffel_max, 1e-10);
  EXPECT_LT(r.mixed_sectional_max, 1e-8);
}

TEST(ProductSplit, DetectsCoupling) {
  const auto r = product_split_check(twisted_metric(), sample_points(12, 20));
  EXPECT_GT(r.off_block_max, 0.01);
  EXPECT_GT(r.mixed_christoffel_max, 1e-3);
}

TEST(LineLeaf, CoupledMetricDrifts) {
  // With the x~ line tilted against the half-plane, the x~ geodesic leaves its line.
  MetricField m(
      [](const Vec3& p) {
        Mat3 g = Mat3::Identity();
        g(0, 0) = 1.0 + 0.5 * p[2];
        return g;
      },
      std::nullopt, "z-dependent g11");
  const auto r = leaf_first_check(m, {}, 10.0);
  EXPECT_GT(r.off_leaf_drift, 1e-3);
}
