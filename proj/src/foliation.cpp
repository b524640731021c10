#include "mtorus/foliation.hpp"

#include "mtorus/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace mtorus {

LeafMetric induced_halfplane_metric(const MetricField& m, double xt0) {
  auto lift = [xt0](const Vec2& q) { return Vec3(xt0, q[0], q[1]); };
  auto components = [m, lift](const Vec2& q) -> Mat2 { return m.components(lift(q)).block<2, 2>(1, 1); };
  if (!m.has_exact_partials()) return LeafMetric(components, std::nullopt, "leaf of " + m.label());
  auto partials = [m, lift](const Vec2& q) {
    const auto d = m.exact_partials(lift(q));
    return LeafMetric::Partials{Mat2(d[kYt].block<2, 2>(1, 1)), Mat2(d[kZ].block<2, 2>(1, 1))};
  };
  return LeafMetric(components, partials, "leaf of " + m.label());
}

double induced_line_metric(const MetricField& m, const ChartPoint& p) { return metric_at(m, p)(kXt, kXt); }

LineLeafReport leaf_first_check(const MetricField& m, const IntegratorConfig& cfg, double t_max,
                                const ChartPoint& start) {
  LineLeafReport r;
  r.horizon = t_max;
  r.note = "completeness is numerical evidence: a geodesic along the leaf runs to the horizon without escape";

  const double g0 = induced_line_metric(m, start);
  for (const double shift : {-100.0, -3.5, 0.0, 1.0, 42.0, 1e3}) {
    ChartPoint q = start;
    q.xt += shift;
    const double g = induced_line_metric(m, q);
    r.induced_metric_variation = std::max(r.induced_metric_variation, std::abs(g - g0));
    r.induced_metric_deviation = std::max(r.induced_metric_deviation, std::abs(g - 1.0));
  }

  const auto traj = integrate_geodesic(m, start, TangentVector(start, Vec3::UnitX()), t_max, cfg);
  r.geodesic = traj.termination;
  for (const auto& s : traj.samples) {
    r.off_leaf_drift = std::max({r.off_leaf_drift, std::abs(s.p.yt - start.yt), std::abs(s.p.z - start.z)});
  }

  ChartPoint end = start;
  end.xt += 25.0;
  const auto w = parallel_transport(m, CurveSpec({StraightSegment{start, end}}), TangentVector(start, Vec3::UnitX()),
                                    cfg);
  r.tangent_transport_defect = (w.comp - Vec3::UnitX()).cwiseAbs().maxCoeff();
  return r;
}

HalfPlaneLeafReport leaf_second_check(const MetricField& m, const std::vector<double>& z_samples,
                                      const IntegratorConfig& cfg, Exec policy) {
  HalfPlaneLeafReport r;
  r.z = z_samples;
  const LeafMetric leaf = induced_halfplane_metric(m, 0.0);
  r.gaussian_curvature = map_indexed(policy, z_samples.size(), [&](std::size_t i) {
    const Vec2 q(0.0, z_samples[i]);
    return sectional_curvature_at<2>(leaf, q, Vec2::UnitX(), Vec2::UnitY());
  });
  for (std::size_t i = 0; i < z_samples.size(); ++i) {
    const double z = z_samples[i];
    r.max_rel_defect = std::max(r.max_rel_defect, std::abs(r.gaussian_curvature[i] * z * z + 2.0) / 2.0);
  }

  const ChartPoint down(0.0, 0.0, 1.0);
  r.escape = integrate_geodesic(m, down, TangentVector(down, Vec3(0, 0, -1)), 2.0, cfg).termination;

  // Geodesics launched tangent to the leaf stay in it.
  const std::vector<std::pair<ChartPoint, Vec3>> launches = {
      {{0.3, 0.0, 1.0}, Vec3(0.0, 1.0, 0.0)},
      {{-1.0, 2.0, 2.0}, Vec3(0.0, 0.6, 0.8).normalized()},
      {{2.0, -1.0, 3.0}, Vec3(0.0, -0.2, 0.5).normalized()},
      {{0.0, 0.5, 1.5}, Vec3(0.0, 1.0, -0.3).normalized()},
  };
  const auto drifts = map_indexed(policy, launches.size(), [&](std::size_t k) {
    const auto& [p, v] = launches[k];
    const auto traj = integrate_geodesic(m, p, TangentVector(p, v), 5.0, cfg);
    double d = 0.0;
    for (const auto& s : traj.samples) d = std::max(d, std::abs(s.p.xt - p.xt));
    return d;
  });
  for (double d : drifts) r.off_leaf_drift = std::max(r.off_leaf_drift, d);
  return r;
}

ProductSplitReport product_split_check(const MetricField& m, const std::vector<ChartPoint>& points, Exec policy) {
  struct PointResult {
    double off_block = 0, line_var = 0, block_dep = 0, mixed_gamma = 0, mixed_k = 0;
  };
  const double g11_ref = metric_at(m, ChartPoint(0.0, 0.0, 1.0))(kXt, kXt);

  const auto per_point = map_indexed(policy, points.size(), [&](std::size_t n) {
    const ChartPoint& p = points[n];
    PointResult r;
    const Mat3 g = metric_at(m, p);
    r.off_block = std::max({std::abs(g(0, 1)), std::abs(g(0, 2)), std::abs(g(1, 0)), std::abs(g(2, 0))});
    r.line_var = std::abs(g(0, 0) - g11_ref);
    const Mat3 g_axis = metric_at(m, ChartPoint(0.0, 0.0, p.z));
    r.block_dep = (g.block<2, 2>(1, 1) - g_axis.block<2, 2>(1, 1)).cwiseAbs().maxCoeff();

    const auto gam = christoffel_at(m, p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (straddles_split(k, i, j)) r.mixed_gamma = std::max(r.mixed_gamma, std::abs(gam(k, i, j)));

    const auto curv = riemann_at(m, p);
    for (const Vec3& other : {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0, 1, 1), Vec3(0, -2, 0.5)}) {
      r.mixed_k = std::max(r.mixed_k, std::abs(sectional_curvature(curv, g, Vec3(Vec3::UnitX()), other)));
    }
    return r;
  });

  ProductSplitReport out;
  out.points = points.size();
  for (const auto& r : per_point) {
    out.off_block_max = std::max(out.off_block_max, r.off_block);
    out.line_block_variation = std::max(out.line_block_variation, r.line_var);
    out.halfplane_block_dependence = std::max(out.halfplane_block_dependence, r.block_dep);
    out.mixed_christoffel_max = std::max(out.mixed_christoffel_max, r.mixed_gamma);
    out.mixed_sectional_max = std::max(out.mixed_sectional_max, r.mixed_k);
  }
  return out;
}

}  // namespace mtorus
