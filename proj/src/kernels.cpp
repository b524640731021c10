#include "mtorus/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mtorus {

std::vector<ChartPoint> sample_points(std::uint64_t seed, std::size_t n, const SampleBox& box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.xt_min, box.xt_max), uy(box.yt_min, box.yt_max),
      uz(box.z_min, box.z_max);
  std::vector<ChartPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng), y = uy(rng), z = uz(rng);
    out.emplace_back(x, y, z);
  }
  return out;
}

std::vector<Vec3> sample_directions(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  std::vector<Vec3> out;
  out.reserve(n);
  while (out.size() < n) {
    const double a = normal(rng), b = normal(rng), c = normal(rng);
    const Vec3 v(a, b, c);
    if (v.norm() > 1e-3) out.push_back(v.normalized());
  }
  return out;
}

std::vector<CurveSpec> sample_curves(std::uint64_t seed, std::size_t n, double z_min, double z_max) {
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
  const double margin = 0.25 * std::min(1.0, z_max - z_min);
  std::uniform_real_distribution<double> uxy(-2.0, 2.0), uz(z_min + margin, z_max - margin),
      bulge(-margin, margin);
  std::vector<CurveSpec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = uxy(rng), ay = uxy(rng), az = uz(rng);
    const double bx = uxy(rng), by = uxy(rng), bz = uz(rng);
    const Vec3 a(ax, ay, az), b(bx, by, bz);
    if (i % 2 == 0) {
      // Chord followed by a coordinate line in y~.
      CurveSpec c({StraightSegment{ChartPoint(a), ChartPoint(b)}});
      c.then(CoordinateLine{ChartPoint(b), kYt, uxy(rng)});
      out.push_back(std::move(c));
    } else {
      const double d0 = uxy(rng), d1 = uxy(rng), d2 = bulge(rng);
      const Vec3 d(d0, d1, d2);
      auto pos = [a, b, d](double t) -> Vec3 { return a + t * (b - a) + std::sin(std::numbers::pi * t) * d; };
      auto vel = [a, b, d](double t) -> Vec3 {
        return (b - a) + std::numbers::pi * std::cos(std::numbers::pi * t) * d;
      };
      out.emplace_back(std::vector<Segment>{ParametricSegment{pos, vel}});
    }
  }
  return out;
}

//--------------------------------------------------------------------------------------------------

std::vector<double> homothety_residuals(const ToralMatrix& a, const MetricField& m,
                                        const std::vector<ChartPoint>& points, Exec policy) {
  return map_indexed(policy, points.size(), [&](std::size_t i) { return pullback_metric_residual(a, m, points[i]); });
}

std::vector<double> invariance_residuals(const ToralMatrix& a, const MetricField& m,
                                         const std::vector<ChartPoint>& points, Exec policy) {
  return map_indexed(policy, points.size(), [&](std::size_t i) { return pullback_residual(a, m, points[i], 1.0); });
}

std::vector<double> compatibility_residuals(const MetricField& m, const std::vector<ChartPoint>& points,
                                            const DiffOptions& opt, Exec policy) {
  return map_indexed(policy, points.size(), [&](std::size_t i) {
    return max_abs<3>(covariant_metric_derivative_at<3>(m, m, points[i].vec(), opt));
  });
}

std::vector<double> christoffel_discrepancies(const MetricField& m, const std::vector<ChartPoint>& points, double h,
                                              Exec policy) {
  const MetricField numeric = m.numeric_only();
  DiffOptions opt;
  opt.step = h;
  return map_indexed(policy, points.size(), [&](std::size_t i) {
    const auto exact = christoffel_at(m, points[i]);
    const auto approx = christoffel_at(numeric, points[i], opt);
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d = std::max(d, (exact.gamma[k] - approx.gamma[k]).cwiseAbs().maxCoeff());
    return d;
  });
}

std::vector<CurvatureSample> curvature_samples(const MetricField& m, const std::vector<ChartPoint>& points,
                                               Exec policy) {
  return map_indexed(policy, points.size(), [&](std::size_t n) {
    const ChartPoint& p = points[n];
    const auto curv = riemann_at(m, p);
    const Mat3 g = metric_at(m, p);
    CurvatureSample s;
    s.scalar = curv.scalar;
    s.sectional_23 = sectional_curvature(curv, g, Vec3(Vec3::UnitY()), Vec3(Vec3::UnitZ()));
    for (const Vec3& other : {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0, 1, 1), Vec3(0, 0.3, -1.7)}) {
      s.v1_plane_max = std::max(s.v1_plane_max, std::abs(sectional_curvature(curv, g, Vec3(Vec3::UnitX()), other)));
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            s.antisym_max = std::max(s.antisym_max, std::abs(curv.R(i, j, k, l) + curv.R(i, j, l, k)));
            s.bianchi_max =
                std::max(s.bianchi_max, std::abs(curv.R(i, j, k, l) + curv.R(i, k, l, j) + curv.R(i, l, j, k)));
          }
    return s;
  });
}

std::vector<ConformalDeviation> conformal_samples(const MetricField& m_conn, const MetricField& m_target,
                                                  const std::vector<ChartPoint>& points,
                                                  const std::vector<Vec3>& directions, Exec policy) {
  if (directions.size() != points.size()) throw DomainError("conformal_samples: need one direction per point");
  return map_indexed(policy, points.size(), [&](std::size_t i) {
    return conformal_deviation_at<3>(m_conn, m_target, points[i].vec(), directions[i]);
  });
}

std::vector<double> transport_isometry_defects(const MetricField& m, const std::vector<CurveSpec>& curves,
                                               const IntegratorConfig& cfg, Exec policy) {
  return map_indexed(policy, curves.size(), [&](std::size_t i) {
    const auto& c = curves[i];
    const Mat3 p = transport_matrix(m, c, cfg);
    return (p.transpose() * metric_at(m, c.end()) * p - metric_at(m, c.start())).cwiseAbs().maxCoeff();
  });
}

std::vector<double> parallel_field_defects(const MetricField& m, const std::vector<CurveSpec>& curves,
                                           const IntegratorConfig& cfg, Exec policy) {
  return map_indexed(policy, curves.size(), [&](std::size_t i) {
    const auto& c = curves[i];
    const auto w = parallel_transport(m, c, TangentVector(c.start(), Vec3::UnitX()), cfg);
    return (w.comp - Vec3::UnitX()).cwiseAbs().maxCoeff();
  });
}

std::vector<double> energy_drifts(const MetricField& m, const std::vector<TangentVector>& seeds, double t_max,
                                  const IntegratorConfig& cfg, Exec policy) {
  return map_indexed(policy, seeds.size(), [&](std::size_t i) {
    const auto traj = integrate_geodesic(m, seeds[i].base, seeds[i], t_max, cfg);
    const auto energy = [&m](const TrajectorySample& s) { return s.v.dot(metric_at(m, s.p, 0.0) * s.v); };
    const double e0 = energy(traj.samples.front());
    double lo = e0, hi = e0;
    for (const auto& s : traj.samples) {
      const double e = energy(s);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    return (hi - lo) / std::abs(e0);
  });
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return x;
    m = std::max(m, x);
  }
  return m;
}

}  // namespace mtorus
