#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mtorus {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Points closer to the z = 0 boundary than this are rejected; the curvature
// of the model metric blows up like 1/z^2 there.
inline constexpr double kZFloor = 1e-6;

// Index names for the eigenbasis chart (x~, y~, z).
inline constexpr int kXt = 0;
inline constexpr int kYt = 1;
inline constexpr int kZ = 2;

//--------------------------------------------------------------------------------------------------
// Errors

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegeneratePlaneError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

//--------------------------------------------------------------------------------------------------

/// A point (x~, y~, z) of the cover chart R^2 x R_+ in eigenbasis coordinates.
struct ChartPoint {
  double xt = 0.0;
  double yt = 0.0;
  double z = 1.0;

  ChartPoint() = default;
  ChartPoint(double xt_, double yt_, double z_) : xt(xt_), yt(yt_), z(z_) {}
  explicit ChartPoint(const Vec3& v) : xt(v[0]), yt(v[1]), z(v[2]) {}

  Vec3 vec() const { return {xt, yt, z}; }
  operator Vec3() const { return vec(); }  // NOLINT: chart points are coordinate vectors

  bool operator==(const ChartPoint&) const = default;
};

/// Tangent vector in the coordinate frame (d/dx~, d/dy~, d/dz) at `base`.
struct TangentVector {
  ChartPoint base;
  Vec3 comp = Vec3::Zero();

  TangentVector() = default;
  TangentVector(const ChartPoint& b, const Vec3& c) : base(b), comp(c) {
    if (!comp.allFinite()) throw DomainError("tangent vector has non-finite components");
  }
};

inline void require_in_chart(double z, double floor, const char* what) {
  if (!(z > floor)) {
    throw DomainError(std::string(what) + ": z = " + std::to_string(z) +
                      " is not above the chart floor " + std::to_string(floor));
  }
}

}  // namespace mtorus
