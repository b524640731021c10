#pragma once

// Batch kernels over sampled points. Each takes an execution policy:
// Exec::serial is the reference implementation, Exec::parallel distributes the
// same per-sample work with OpenMP. Results are per sample, in input order.

#include "mtorus/chart.hpp"
#include "mtorus/metric_field.hpp"
#include "mtorus/parallel.hpp"
#include "mtorus/quotient.hpp"
#include "mtorus/tensor.hpp"
#include "mtorus/transport.hpp"

#include <cstdint>
#include <vector>

namespace mtorus {

struct SampleBox {
  double xt_min = -5.0, xt_max = 5.0;
  double yt_min = -5.0, yt_max = 5.0;
  double z_min = 0.2, z_max = 10.0;
};

/// Seeded, reproducible points in the box.
std::vector<ChartPoint> sample_points(std::uint64_t seed, std::size_t n, const SampleBox& box = {});

/// Seeded unit vectors (uniform on the sphere).
std::vector<Vec3> sample_directions(std::uint64_t seed, std::size_t n);

/// Seeded random curves: straight chords and smooth parametric arcs with
/// z in [z_min, z_max].
std::vector<CurveSpec> sample_curves(std::uint64_t seed, std::size_t n, double z_min = 0.5, double z_max = 5.0);

//--------------------------------------------------------------------------------------------------

std::vector<double> homothety_residuals(const ToralMatrix& a, const MetricField& m,
                                        const std::vector<ChartPoint>& points, Exec policy);

/// pullback_residual with factor 1: the defect of f-invariance.
std::vector<double> invariance_residuals(const ToralMatrix& a, const MetricField& m,
                                         const std::vector<ChartPoint>& points, Exec policy);

/// max |nabla g| with the Levi-Civita connection of m itself.
std::vector<double> compatibility_residuals(const MetricField& m, const std::vector<ChartPoint>& points,
                                            const DiffOptions& opt, Exec policy);

/// max |G_exact - G_numeric(h)| per point.
std::vector<double> christoffel_discrepancies(const MetricField& m, const std::vector<ChartPoint>& points, double h,
                                              Exec policy);

struct CurvatureSample {
  double scalar = 0.0;
  double sectional_23 = 0.0;   // K(d/dy~, d/dz)
  double v1_plane_max = 0.0;   // max |K| over planes containing d/dx~
  double bianchi_max = 0.0;    // max |R^i_jkl + R^i_klj + R^i_ljk|
  double antisym_max = 0.0;    // max |R^i_jkl + R^i_jlk|
};

std::vector<CurvatureSample> curvature_samples(const MetricField& m, const std::vector<ChartPoint>& points,
                                               Exec policy);

std::vector<ConformalDeviation> conformal_samples(const MetricField& m_conn, const MetricField& m_target,
                                                  const std::vector<ChartPoint>& points,
                                                  const std::vector<Vec3>& directions, Exec policy);

/// max |P^T g(end) P - g(start)| per curve.
std::vector<double> transport_isometry_defects(const MetricField& m, const std::vector<CurveSpec>& curves,
                                               const IntegratorConfig& cfg, Exec policy);

/// max |P d/dx~ - d/dx~| per curve.
std::vector<double> parallel_field_defects(const MetricField& m, const std::vector<CurveSpec>& curves,
                                           const IntegratorConfig& cfg, Exec policy);

/// Relative spread of g(x', x') along each geodesic.
std::vector<double> energy_drifts(const MetricField& m, const std::vector<TangentVector>& seeds, double t_max,
                                  const IntegratorConfig& cfg, Exec policy);

double max_of(const std::vector<double>& v);

}  // namespace mtorus
