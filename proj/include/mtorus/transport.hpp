#pragma once

// Geodesics and parallel transport on the cover chart.

#include "mtorus/chart.hpp"
#include "mtorus/metric_field.hpp"
#include "mtorus/parallel.hpp"

#include <functional>
#include <iosfwd>
#include <variant>
#include <vector>

namespace mtorus {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  long max_steps = 1'000'000;
  double z_floor = kZFloor;

  /// Throws ConfigError unless all fields are positive and rel_tol >= 1e-14.
  void validate() const;
};

//--------------------------------------------------------------------------------------------------
// Curves. Every segment is parametrized over [0, 1] and carries its exact tangent.

struct CoordinateLine {
  ChartPoint start;
  int axis = kZ;
  double length = 0.0;  // signed
};

struct StraightSegment {
  ChartPoint start;
  ChartPoint end;
};

struct ParametricSegment {
  std::function<Vec3(double)> position;
  std::function<Vec3(double)> velocity;
};

using Segment = std::variant<CoordinateLine, StraightSegment, ParametricSegment>;

Vec3 segment_position(const Segment& s, double t);
Vec3 segment_velocity(const Segment& s, double t);

class CurveSpec {
 public:
  CurveSpec() = default;
  explicit CurveSpec(std::vector<Segment> segments);

  CurveSpec& then(Segment s);
  CurveSpec& then(const CurveSpec& other);

  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  ChartPoint start() const;
  ChartPoint end() const;

  /// Same trace, opposite direction.
  CurveSpec reversed() const;

  /// Throws DomainError if consecutive segments do not meet (1e-12) or a
  /// sampled point has z <= z_floor.
  void validate(double z_floor = kZFloor) const;

  /// Closed axis-aligned rectangle through `corner`: +side_i along axis i, then
  /// +side_j along axis j, then back.
  static CurveSpec rectangle(const ChartPoint& corner, int axis_i, int axis_j, double side_i, double side_j);

 private:
  std::vector<Segment> segments_;
};

//--------------------------------------------------------------------------------------------------

struct Termination {
  enum class Kind { completed, boundary_escape, step_limit };
  Kind kind = Kind::completed;
  double t = 0.0;  // end of integration; for boundary_escape, where z reached z_floor
  // boundary_escape only: parameter at which z reaches 0, extrapolated from the
  // state at t with the local quadratic z(t + s) = z + z' s + z'' s^2 / 2.
  double t_exit = 0.0;

  bool operator==(const Termination&) const = default;
};

const char* to_string(Termination::Kind k);

struct TrajectorySample {
  double t = 0.0;
  ChartPoint p;
  Vec3 v = Vec3::Zero();
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Termination termination;
};

/// Solves x'' + G(x', x') = 0 from (p0, v0) up to affine parameter t_max.
/// Stops with boundary_escape at the first parameter where z <= cfg.z_floor,
/// located to 1e-9, and reports the extrapolated exit parameter as well.
Trajectory integrate_geodesic(const MetricField& m, const ChartPoint& p0, const TangentVector& v0, double t_max,
                              const IntegratorConfig& cfg = {});

/// Parallel transport of w0 along c.
TangentVector parallel_transport(const MetricField& m, const CurveSpec& c, const TangentVector& w0,
                                 const IntegratorConfig& cfg = {});

/// As parallel_transport, keeping every accepted step. The parameter t runs
/// over [k, k+1] on segment k.
Trajectory transport_trace(const MetricField& m, const CurveSpec& c, const TangentVector& w0,
                           const IntegratorConfig& cfg = {});

/// Columns are the transports of the coordinate frame vectors.
Mat3 transport_matrix(const MetricField& m, const CurveSpec& c, const IntegratorConfig& cfg = {});

/// (P_loop - I) / eps^2 for a square of side eps in the (i, j) coordinate
/// plane centered at p; tends to the matrix with entries -R^k_lij.
Mat3 curvature_via_loop(const MetricField& m, const ChartPoint& p, int i, int j, double eps,
                        const IntegratorConfig& cfg = {});

struct ProbeResult {
  ChartPoint p;
  Vec3 v = Vec3::Zero();
  Termination termination;
};

/// Batch geodesic runs; results are in seed order whatever the policy.
std::vector<ProbeResult> completeness_probe(const MetricField& m, const std::vector<TangentVector>& seeds,
                                            double t_max, const IntegratorConfig& cfg = {},
                                            Exec policy = Exec::parallel);

/// CSV with header t,xt,yt,z,v1,v2,v3.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace mtorus
