#include "mtorus/kernels.hpp"
#include "mtorus/tensor.hpp"
#include "mtorus/transport.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace mtorus;

namespace {

constexpr double kLambda = 2.6180339887498949;  // (3 + sqrt 5) / 2

TangentVector tv(const ChartPoint& p, double a, double b, double c) { return TangentVector(p, Vec3(a, b, c)); }

}  // namespace

TEST(IntegratorConfig, Validation) {
  IntegratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.rel_tol = 1e-15;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.z_floor = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.max_steps = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Curve, JoinsAndReversal) {
  CurveSpec c;
  c.then(StraightSegment{{0, 0, 1}, {1, 0, 1}}).then(CoordinateLine{{1, 0, 1}, kZ, 0.5});
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.start(), (ChartPoint{0, 0, 1}));
  EXPECT_NEAR((c.end().vec() - Vec3(1, 0, 1.5)).norm(), 0.0, 1e-15);
  const auto r = c.reversed();
  EXPECT_NEAR((r.start().vec() - Vec3(1, 0, 1.5)).norm(), 0.0, 1e-15);
  EXPECT_EQ(r.end(), (ChartPoint{0, 0, 1}));
  EXPECT_NO_THROW(r.validate());
}

TEST(Curve, ValidateRejectsGapsAndBoundary) {
  CurveSpec gap;
  gap.then(StraightSegment{{0, 0, 1}, {1, 0, 1}}).then(StraightSegment{{1, 0.1, 1}, {2, 0, 1}});
  EXPECT_THROW(gap.validate(), DomainError);
  CurveSpec low;
  low.then(CoordinateLine{{0, 0, 1}, kZ, -1.0});
  EXPECT_THROW(low.validate(), DomainError);
}

TEST(Curve, RectangleIsClosed) {
  const auto r = CurveSpec::rectangle({0, 0, 1}, kYt, kZ, 0.7, 0.5);
  EXPECT_EQ(r.segments().size(), 4u);
  EXPECT_LT((r.start().vec() - r.end().vec()).norm(), 1e-15);
}

TEST(Geodesic, DownwardEscapesAtUnitParameter) {
  const auto m = model_metric();
  const ChartPoint p{0, 0, 1};
  const auto traj = integrate_geodesic(m, p, tv(p, 0, 0, -1), 10.0);
  EXPECT_EQ(traj.termination.kind, Termination::Kind::boundary_escape);
  EXPECT_NEAR(traj.termination.t, 1.0 - kZFloor, 1e-8);
  EXPECT_NEAR(traj.termination.t_exit, 1.0, 1e-6);
  EXPECT_NEAR(traj.samples.back().p.z, kZFloor, 10 * kZFloor);
}

TEST(Geodesic, EscapeTimeEqualsStartingHeight) {
  const auto m = model_metric();
  for (double z0 : {0.3, 2.0, 5.0}) {
    const ChartPoint p{0.5, -0.5, z0};
    const auto t = integrate_geodesic(m, p, tv(p, 0, 0, -1), 100.0).termination;
    EXPECT_EQ(t.kind, Termination::Kind::boundary_escape);
    EXPECT_NEAR(t.t_exit, z0, 1e-6 * z0);
  }
}

TEST(Geodesic, UpwardSurvives) {
  const auto m = model_metric();
  const ChartPoint p{0, 0, 1};
  const auto traj = integrate_geodesic(m, p, tv(p, 0, 0, 1), 100.0);
  EXPECT_EQ(traj.termination.kind, Termination::Kind::completed);
  EXPECT_DOUBLE_EQ(traj.termination.t, 100.0);
  EXPECT_NEAR(traj.samples.back().p.z, 101.0, 1e-8);
}

TEST(Geodesic, AlongXIsStraight) {
  const auto m = model_metric();
  const ChartPoint p{0, 0, 1};
  const auto traj = integrate_geodesic(m, p, tv(p, 1, 0, 0), 50.0);
  EXPECT_EQ(traj.termination.kind, Termination::Kind::completed);
  const auto& e = traj.samples.back();
  EXPECT_NEAR(e.p.xt, 50.0, 1e-9);
  EXPECT_EQ(e.p.yt, 0.0);
  EXPECT_EQ(e.p.z, 1.0);
}

TEST(Geodesic, EuclideanStraightLine) {
  const ChartPoint p{1, 2, 3};
  const auto traj = integrate_geodesic(euclidean_metric<3>(), p, tv(p, 0.3, -0.2, 0.1), 7.0);
  EXPECT_LT((traj.samples.back().p.vec() - Vec3(1 + 2.1, 2 - 1.4, 3 + 0.7)).norm(), 1e-12);
}

TEST(Geodesic, EnergyConserved) {
  const auto m = model_metric();
  const auto pts = sample_points(21, 30, SampleBox{-1, 1, -1, 1, 0.5, 3});
  const auto dirs = sample_directions(22, 30);
  std::vector<TangentVector> seeds;
  for (std::size_t i = 0; i < pts.size(); ++i) seeds.emplace_back(pts[i], dirs[i]);
  const auto d = energy_drifts(m, seeds, 5.0, {}, Exec::serial);
  EXPECT_LT(max_of(d), 1e-8);
}

TEST(Geodesic, StepLimitReported) {
  IntegratorConfig cfg;
  cfg.max_steps = 2;
  const ChartPoint p{0, 0, 1};
  const auto t = integrate_geodesic(model_metric(), p, tv(p, 0, 1, 0), 100.0, cfg).termination;
  EXPECT_EQ(t.kind, Termination::Kind::step_limit);
  EXPECT_STREQ(to_string(t.kind), "step_limit");
}

TEST(Transport, AlongZLineScalesYComponent) {
  const auto m = model_metric();
  CurveSpec c;
  c.then(CoordinateLine{{0, 0, 1}, kZ, kLambda - 1.0});
  const Mat3 P = transport_matrix(m, c);
  Mat3 expected = Mat3::Identity();
  expected(1, 1) = 1.0 / (kLambda * kLambda);
  EXPECT_LT((P - expected).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(P(1, 1), 0.1458980, 1e-7);
}

TEST(Transport, ZeroLengthCurveIsIdentity) {
  CurveSpec c;
  c.then(CoordinateLine{{0.2, 0.3, 1.1}, kYt, 0.0});
  EXPECT_LT((transport_matrix(model_metric(), c) - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(transport_matrix(model_metric(), CurveSpec{}), Mat3::Identity());
}

TEST(Transport, EuclideanLeavesVectorsAlone) {
  const auto c = sample_curves(2, 1).front();
  const auto w = parallel_transport(euclidean_metric<3>(), c, TangentVector(c.start(), Vec3(0.3, 0.1, -2)));
  EXPECT_LT((w.comp - Vec3(0.3, 0.1, -2)).norm(), 1e-12);
}

TEST(Transport, SingleVectorMatchesMatrixColumn) {
  const auto m = model_metric();
  const auto c = sample_curves(4, 1).front();
  const Mat3 P = transport_matrix(m, c);
  const auto w = parallel_transport(m, c, TangentVector(c.start(), Vec3(0.2, -1.0, 0.5)));
  EXPECT_LT((w.comp - P * Vec3(0.2, -1.0, 0.5)).norm(), 1e-8);
  EXPECT_EQ(w.base, c.end());
}

TEST(Transport, ReversalInverts) {
  const auto m = model_metric();
  for (const auto& c : sample_curves(31, 10)) {
    const Mat3 P = transport_matrix(m, c);
    const Mat3 Q = transport_matrix(m, c.reversed());
    EXPECT_LT((Q * P - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Transport, CompositionMultiplies) {
  const auto m = model_metric();
  CurveSpec a, b;
  a.then(StraightSegment{{0, 0, 1}, {0.5, 0.7, 1.8}});
  b.then(StraightSegment{{0.5, 0.7, 1.8}, {-0.4, 0.1, 0.6}});
  CurveSpec ab = a;
  ab.then(b);
  EXPECT_LT((transport_matrix(m, ab) - transport_matrix(m, b) * transport_matrix(m, a)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Transport, IsometryOverRandomCurves) {
  const auto m = model_metric();
  const auto d = transport_isometry_defects(m, sample_curves(41, 100), {}, Exec::serial);
  EXPECT_LT(max_of(d), 1e-7);
}

TEST(Transport, XFieldIsParallel) {
  const auto m = model_metric();
  const auto d = parallel_field_defects(m, sample_curves(42, 50), {}, Exec::serial);
  EXPECT_LT(max_of(d), 1e-10);
}

TEST(Transport, TraceParameterRunsOverSegments) {
  const auto m = model_metric();
  const auto c = CurveSpec::rectangle({0, 0, 1}, kYt, kZ, 0.3, 0.2);
  const auto tr = transport_trace(m, c, TangentVector({0, 0, 1}, Vec3(0, 1, 0)));
  EXPECT_EQ(tr.samples.front().t, 0.0);
  EXPECT_NEAR(tr.samples.back().t, 4.0, 1e-12);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) EXPECT_GE(tr.samples[i].t, tr.samples[i - 1].t);
}

TEST(Transport, CurveThroughBoundaryThrows) {
  CurveSpec c;
  c.then(CoordinateLine{{0, 0, 1}, kZ, -2.0});
  EXPECT_THROW(transport_matrix(model_metric(), c), DomainError);
}

TEST(LoopCurvature, MatchesRiemann) {
  const auto m = model_metric();
  const ChartPoint p{0.1, 0.2, 1.0};
  const auto R = riemann_at(m, p);
  const Mat3 L = curvature_via_loop(m, p, kYt, kZ, 1e-3);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) EXPECT_NEAR(L(k, l), -R.R(k, l, kYt, kZ), 1e-3) << k << l;
}

TEST(LoopCurvature, SecondOrderConvergence) {
  const auto m = model_metric();
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  const ChartPoint p{0.0, 0.0, 1.5};
  const auto R = riemann_at(m, p);
  Mat3 target;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) target(k, l) = -R.R(k, l, kYt, kZ);
  const double e1 = (curvature_via_loop(m, p, kYt, kZ, 4e-2, cfg) - target).cwiseAbs().maxCoeff();
  const double e2 = (curvature_via_loop(m, p, kYt, kZ, 2e-2, cfg) - target).cwiseAbs().maxCoeff();
  EXPECT_GE(e1 / e2, 3.5);
  EXPECT_LE(e1 / e2, 4.5);
}

TEST(LoopCurvature, FlatPlanes) {
  const auto m = model_metric();
  const ChartPoint p{0, 0, 2};
  EXPECT_LT(curvature_via_loop(m, p, kXt, kZ, 1e-2).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(curvature_via_loop(m, p, kXt, kYt, 1e-2).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_THROW(curvature_via_loop(m, p, kZ, kZ, 1e-2), DomainError);
}

TEST(Probe, OrderAndPolicyIndependent) {
  const auto m = model_metric();
  const ChartPoint p{0, 0, 1};
  std::vector<TangentVector> seeds{tv(p, 0, 0, -1), tv(p, 0, 0, 1), tv(p, 1, 0, 0), tv(p, 0, 1, -0.5)};
  const auto a = completeness_probe(m, seeds, 20.0, {}, Exec::serial);
  const auto b = completeness_probe(m, seeds, 20.0, {}, Exec::parallel);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].termination, b[i].termination);
  EXPECT_EQ(a[0].termination.kind, Termination::Kind::boundary_escape);
  EXPECT_EQ(a[1].termination.kind, Termination::Kind::completed);
  EXPECT_EQ(a[2].termination.kind, Termination::Kind::completed);
}

TEST(Csv, HeaderAndRoundTrip) {
  const auto m = model_metric();
  const ChartPoint p{0, 0, 1};
  const auto traj = integrate_geodesic(m, p, tv(p, 0, 0, -1), 10.0);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,xt,yt,z,v1,v2,v3");
  std::size_t rows = 0;
  std::string last;
  while (std::getline(is, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, traj.samples.size());
  EXPECT_DOUBLE_EQ(std::stod(last.substr(0, last.find(','))), traj.samples.back().t);
}
