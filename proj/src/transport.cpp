#include "mtorus/transport.hpp"

#include "mtorus/ode.hpp"
#include "mtorus/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace mtorus {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0 && abs_tol > 0 && max_steps > 0 && z_floor > 0)) {
    throw ConfigError("IntegratorConfig: tolerances, max_steps and z_floor must be positive");
  }
  if (rel_tol < 1e-14) throw ConfigError("IntegratorConfig: rel_tol must be at least 1e-14");
}

namespace {

ode::Options ode_options(const IntegratorConfig& cfg, bool reject_on_domain_error) {
  ode::Options o;
  o.rel_tol = cfg.rel_tol;
  o.abs_tol = cfg.abs_tol;
  o.max_steps = cfg.max_steps;
  o.reject_on_domain_error = reject_on_domain_error;
  return o;
}

constexpr double kJoinTol = 1e-12;

// Smallest s >= 0 with z + z' s + z'' s^2 / 2 = 0, from the geodesic state (x, v).
double time_to_boundary(const MetricField& m, const Eigen::Matrix<double, 6, 1>& y) {
  const double z = std::max(0.0, y[kZ]);
  const double dz = y[3 + kZ];
  if (z == 0.0) return 0.0;
  double ddz = 0.0;
  try {
    DiffOptions eval;
    eval.z_floor = 0.0;
    const Vec3 v = y.tail<3>();
    ddz = -christoffel_at(m, Vec3(y.head<3>()), eval).contract(v, v)[kZ];
  } catch (const DomainError&) {
    ddz = 0.0;
  }
  if (ddz != 0.0) {
    const double disc = dz * dz - 2.0 * ddz * z;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      // Numerically stable roots of (ddz/2) s^2 + dz s + z.
      const double q = -0.5 * (dz + std::copysign(r, dz));
      double best = std::numeric_limits<double>::infinity();
      for (const double s : {q / (0.5 * ddz), z / q})
        if (std::isfinite(s) && s >= 0.0) best = std::min(best, s);
      if (std::isfinite(best)) return best;
    }
  }
  return dz < 0.0 ? z / -dz : 0.0;
}

}  // namespace

//--------------------------------------------------------------------------------------------------
// Curves

Vec3 segment_position(const Segment& s, double t) {
  return std::visit(
      [t](const auto& seg) -> Vec3 {
        using T = std::decay_t<decltype(seg)>;
        if constexpr (std::is_same_v<T, CoordinateLine>) {
          Vec3 p = seg.start.vec();
          p[seg.axis] += t * seg.length;
          return p;
        } else if constexpr (std::is_same_v<T, StraightSegment>) {
          return seg.start.vec() + t * (seg.end.vec() - seg.start.vec());
        } else {
          return seg.position(t);
        }
      },
      s);
}

Vec3 segment_velocity(const Segment& s, double t) {
  return std::visit(
      [t](const auto& seg) -> Vec3 {
        using T = std::decay_t<decltype(seg)>;
        if constexpr (std::is_same_v<T, CoordinateLine>) {
          Vec3 v = Vec3::Zero();
          v[seg.axis] = seg.length;
          return v;
        } else if constexpr (std::is_same_v<T, StraightSegment>) {
          return seg.end.vec() - seg.start.vec();
        } else {
          return seg.velocity(t);
        }
      },
      s);
}

CurveSpec::CurveSpec(std::vector<Segment> segments) : segments_(std::move(segments)) {}

CurveSpec& CurveSpec::then(Segment s) {
  segments_.push_back(std::move(s));
  return *this;
}

CurveSpec& CurveSpec::then(const CurveSpec& other) {
  segments_.insert(segments_.end(), other.segments_.begin(), other.segments_.end());
  return *this;
}

ChartPoint CurveSpec::start() const {
  if (segments_.empty()) throw DomainError("CurveSpec::start: empty curve");
  return ChartPoint(segment_position(segments_.front(), 0.0));
}

ChartPoint CurveSpec::end() const {
  if (segments_.empty()) throw DomainError("CurveSpec::end: empty curve");
  return ChartPoint(segment_position(segments_.back(), 1.0));
}

CurveSpec CurveSpec::reversed() const {
  std::vector<Segment> out;
  out.reserve(segments_.size());
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    std::visit(
        [&out](const auto& seg) {
          using T = std::decay_t<decltype(seg)>;
          if constexpr (std::is_same_v<T, CoordinateLine>) {
            Vec3 end = seg.start.vec();
            end[seg.axis] += seg.length;
            out.emplace_back(CoordinateLine{ChartPoint(end), seg.axis, -seg.length});
          } else if constexpr (std::is_same_v<T, StraightSegment>) {
            out.emplace_back(StraightSegment{seg.end, seg.start});
          } else {
            auto pos = seg.position;
            auto vel = seg.velocity;
            out.emplace_back(ParametricSegment{[pos](double t) { return pos(1.0 - t); },
                                               [vel](double t) -> Vec3 { return -vel(1.0 - t); }});
          }
        },
        *it);
  }
  return CurveSpec(std::move(out));
}

void CurveSpec::validate(double z_floor) const {
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& s = segments_[k];
    if (k > 0) {
      const Vec3 gap = segment_position(s, 0.0) - segment_position(segments_[k - 1], 1.0);
      if (gap.cwiseAbs().maxCoeff() > kJoinTol) throw DomainError("CurveSpec: consecutive segments do not meet");
    }
    // Coordinate lines and straight segments are affine in t, so their
    // endpoints bound z; parametric segments are sampled.
    const int samples = std::holds_alternative<ParametricSegment>(s) ? 64 : 1;
    for (int q = 0; q <= samples; ++q) {
      const Vec3 p = segment_position(s, static_cast<double>(q) / samples);
      if (!p.allFinite()) throw DomainError("CurveSpec: non-finite point");
      require_in_chart(p[kZ], z_floor, "CurveSpec");
    }
  }
}

CurveSpec CurveSpec::rectangle(const ChartPoint& corner, int axis_i, int axis_j, double side_i, double side_j) {
  CurveSpec c;
  Vec3 p = corner.vec();
  c.then(CoordinateLine{ChartPoint(p), axis_i, side_i});
  p[axis_i] += side_i;
  c.then(CoordinateLine{ChartPoint(p), axis_j, side_j});
  p[axis_j] += side_j;
  c.then(CoordinateLine{ChartPoint(p), axis_i, -side_i});
  p[axis_i] -= side_i;
  c.then(CoordinateLine{ChartPoint(p), axis_j, -side_j});
  return c;
}

//--------------------------------------------------------------------------------------------------
// Geodesics

const char* to_string(Termination::Kind k) {
  switch (k) {
    case Termination::Kind::completed:
      return "completed";
    case Termination::Kind::boundary_escape:
      return "boundary_escape";
    case Termination::Kind::step_limit:
      return "step_limit";
  }
  return "unknown";
}

Trajectory integrate_geodesic(const MetricField& m, const ChartPoint& p0, const TangentVector& v0, double t_max,
                              const IntegratorConfig& cfg) {
  cfg.validate();
  require_in_chart(p0.z, cfg.z_floor, "integrate_geodesic");
  if (v0.comp.squaredNorm() == 0.0) throw DomainError("integrate_geodesic: zero initial velocity");

  using State = Eigen::Matrix<double, 6, 1>;
  // Stages may dip below z_floor while the step is being localized; only z <= 0 is fatal.
  DiffOptions eval;
  eval.z_floor = 0.0;
  auto rhs = [&m, &eval](double, const State& y) -> State {
    const Vec3 x = y.head<3>();
    const Vec3 v = y.tail<3>();
    State dy;
    dy.head<3>() = v;
    dy.tail<3>() = -christoffel_at(m, x, eval).contract(v, v);
    return dy;
  };

  Trajectory traj;
  auto observe = [&traj](double t, const State& y) {
    traj.samples.push_back({t, ChartPoint(Vec3(y.head<3>())), y.tail<3>()});
  };
  const double floor = cfg.z_floor;
  auto event = [floor](double, const State& y) { return y[kZ] - floor; };

  State y0;
  y0 << p0.vec(), v0.comp;
  const auto res = ode::integrate<6>(rhs, 0.0, y0, t_max, ode_options(cfg, true), event, observe);
  switch (res.status) {
    case ode::Status::completed:
      traj.termination = {Termination::Kind::completed, res.t, 0.0};
      break;
    case ode::Status::event:
      traj.termination = {Termination::Kind::boundary_escape, res.t, res.t + time_to_boundary(m, res.y)};
      break;
    case ode::Status::step_limit:
      traj.termination = {Termination::Kind::step_limit, res.t, 0.0};
      break;
  }
  return traj;
}

//--------------------------------------------------------------------------------------------------
// Parallel transport

namespace {

template <int N, class Observer>
Eigen::Matrix<double, N, 1> transport_segment(const MetricField& m, const Segment& seg,
                                              const Eigen::Matrix<double, N, 1>& w0, const IntegratorConfig& cfg,
                                              Observer&& observe) {
  using State = Eigen::Matrix<double, N, 1>;
  constexpr int cols = N / 3;
  DiffOptions eval;
  eval.z_floor = cfg.z_floor;
  auto rhs = [&](double t, const State& w) -> State {
    const Vec3 x = segment_position(seg, t);
    const Vec3 u = segment_velocity(seg, t);
    const Mat3 a = christoffel_at(m, x, eval).connection_matrix(u);
    State dw;
    for (int c = 0; c < cols; ++c) dw.template segment<3>(3 * c) = -a * w.template segment<3>(3 * c);
    return dw;
  };
  const auto res = ode::integrate<N>(
      rhs, 0.0, w0, 1.0, ode_options(cfg, false), [](double, const State&) { return 1.0; }, observe);
  if (res.status != ode::Status::completed) {
    throw NumericError("parallel transport: step limit reached along a curve segment");
  }
  return res.y;
}

}  // namespace

TangentVector parallel_transport(const MetricField& m, const CurveSpec& c, const TangentVector& w0,
                                 const IntegratorConfig& cfg) {
  cfg.validate();
  if (c.empty()) return w0;
  c.validate(cfg.z_floor);
  if ((w0.base.vec() - c.start().vec()).cwiseAbs().maxCoeff() > kJoinTol) {
    throw DomainError("parallel_transport: vector is not based at the curve start");
  }
  Vec3 w = w0.comp;
  for (const auto& seg : c.segments()) w = transport_segment<3>(m, seg, w, cfg, [](double, const Vec3&) {});
  return TangentVector(c.end(), w);
}

Trajectory transport_trace(const MetricField& m, const CurveSpec& c, const TangentVector& w0,
                           const IntegratorConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  if (c.empty()) {
    traj.samples.push_back({0.0, w0.base, w0.comp});
    return traj;
  }
  c.validate(cfg.z_floor);
  if ((w0.base.vec() - c.start().vec()).cwiseAbs().maxCoeff() > kJoinTol) {
    throw DomainError("transport_trace: vector is not based at the curve start");
  }
  Vec3 w = w0.comp;
  for (std::size_t k = 0; k < c.segments().size(); ++k) {
    const auto& seg = c.segments()[k];
    const double offset = static_cast<double>(k);
    const bool skip_first = k > 0;  // shared endpoint already recorded
    bool first = true;
    w = transport_segment<3>(m, seg, w, cfg, [&](double t, const Vec3& y) {
      if (first && skip_first) {
        first = false;
        return;
      }
      first = false;
      traj.samples.push_back({offset + t, ChartPoint(segment_position(seg, t)), y});
    });
  }
  traj.termination = {Termination::Kind::completed, static_cast<double>(c.segments().size())};
  return traj;
}

Mat3 transport_matrix(const MetricField& m, const CurveSpec& c, const IntegratorConfig& cfg) {
  cfg.validate();
  if (c.empty()) return Mat3::Identity();
  c.validate(cfg.z_floor);
  using State = Eigen::Matrix<double, 9, 1>;
  State w = Eigen::Map<const State>(Mat3::Identity().eval().data());
  for (const auto& seg : c.segments()) w = transport_segment<9>(m, seg, w, cfg, [](double, const State&) {});
  return Eigen::Map<const Mat3>(w.data());
}

Mat3 curvature_via_loop(const MetricField& m, const ChartPoint& p, int i, int j, double eps,
                        const IntegratorConfig& cfg) {
  if (i == j || i < 0 || j < 0 || i > 2 || j > 2) throw DomainError("curvature_via_loop: need two distinct axes");
  if (!(eps > 0)) throw DomainError("curvature_via_loop: eps must be positive");
  // Lasso: p -> corner, square around p, corner -> p.
  Vec3 corner = p.vec();
  corner[i] -= 0.5 * eps;
  corner[j] -= 0.5 * eps;
  CurveSpec loop;
  loop.then(StraightSegment{p, ChartPoint(corner)});
  loop.then(CurveSpec::rectangle(ChartPoint(corner), i, j, eps, eps));
  loop.then(StraightSegment{ChartPoint(corner), p});
  return (transport_matrix(m, loop, cfg) - Mat3::Identity()) / (eps * eps);
}

//--------------------------------------------------------------------------------------------------

std::vector<ProbeResult> completeness_probe(const MetricField& m, const std::vector<TangentVector>& seeds,
                                            double t_max, const IntegratorConfig& cfg, Exec policy) {
  cfg.validate();
  return map_indexed(policy, seeds.size(), [&](std::size_t k) {
    const auto& s = seeds[k];
    ProbeResult r;
    r.p = s.base;
    r.v = s.comp;
    r.termination = integrate_geodesic(m, s.base, s, t_max, cfg).termination;
    return r;
  });
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto old_prec = os.precision(std::numeric_limits<double>::max_digits10);
  os << "t,xt,yt,z,v1,v2,v3\n";
  for (const auto& s : traj.samples) {
    os << s.t << ',' << s.p.xt << ',' << s.p.yt << ',' << s.p.z << ',' << s.v[0] << ',' << s.v[1] << ',' << s.v[2]
       << '\n';
  }
  os.precision(old_prec);
}

}  // namespace mtorus
