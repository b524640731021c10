#pragma once

// The mapping torus (T^2 x R_+)/Z, where Z is generated by
//   f(x, y, z) = (A (x, y) mod 1, lambda z)
// for a hyperbolic A in SL(2, Z). Geometry is done on the cover in eigenbasis
// coordinates (x~, y~, z); torus coordinates (x, y, z) appear only at the
// boundary of this module.

#include "mtorus/chart.hpp"
#include "mtorus/metric_field.hpp"
#include "mtorus/transport.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtorus {

class LiftEscapeError : public DomainError {
 public:
  using DomainError::DomainError;
};

using IntMatrix2 = std::array<std::int64_t, 4>;  // row-major a11 a12 a21 a22

/// An integer 2x2 matrix with det = 1 and trace > 2.
class ToralMatrix {
 public:
  const IntMatrix2& entries() const { return entries_; }
  std::int64_t trace() const { return entries_[0] + entries_[3]; }
  Mat2 as_real() const;
  /// A^k for any integer k; A^-1 is integral since det A = 1.
  IntMatrix2 power(int k) const;

  bool operator==(const ToralMatrix&) const = default;

 private:
  explicit ToralMatrix(const IntMatrix2& e) : entries_(e) {}
  friend ToralMatrix validate_toral_matrix(const IntMatrix2& entries);
  IntMatrix2 entries_;
};

/// Throws ConfigError("not in SL(2,Z)") for det != 1 and
/// ConfigError("eigenvalues not real and > 1") for trace <= 2.
ToralMatrix validate_toral_matrix(const IntMatrix2& entries);

/// Parses four whitespace-separated integers "a11 a12 a21 a22".
IntMatrix2 parse_matrix_entries(std::string_view text);

struct TorusPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

struct EigenBasis {
  double lambda = 1.0;      // > 1
  double lambda_inv = 1.0;  // the second root, 1 / lambda
  Vec2 v1 = Vec2::Zero();   // A v1 = lambda v1, second component 1
  Vec2 v2 = Vec2::Zero();   // A v2 = v2 / lambda, second component 1
  /// Columns [v1 | v2 | e_z]: maps eigenbasis components to torus components.
  /// Its inverse converts torus coordinates to (x~, y~, z).
  Mat3 frame_change = Mat3::Identity();

  TorusPoint to_torus(const ChartPoint& p) const;
  ChartPoint to_chart(const TorusPoint& p) const;
};

EigenBasis eigen_basis(const ToralMatrix& a);

/// Reduces into [0, 1).
double mod1(double v);

TorusPoint deck_apply(const ToralMatrix& a, const TorusPoint& p);
TorusPoint deck_apply_inverse(const ToralMatrix& a, const TorusPoint& p);

/// df in the (v1, v2, v3) frame; diag(lambda, 1/lambda, lambda).
Mat3 deck_differential(const ToralMatrix& a, const EigenBasis& frame);

/// f on the cover in eigenbasis coordinates (a linear map).
ChartPoint deck_apply_chart(const ToralMatrix& a, const EigenBasis& frame, const ChartPoint& p);

/// max |df^T g(f p) df - factor g(p)|.
double pullback_residual(const ToralMatrix& a, const MetricField& m, const ChartPoint& p, double factor);

/// Homothety defect of f for m: pullback_residual with factor lambda^2.
double pullback_metric_residual(const ToralMatrix& a, const MetricField& m, const ChartPoint& p);

struct FundamentalDomainPoint {
  TorusPoint q;  // q.z in [1, lambda), torus part in [0, 1)
  int k = 0;     // f^k(p) = q
};

FundamentalDomainPoint reduce_to_fundamental_domain(const ToralMatrix& a, const TorusPoint& p);

/// g' = z^-2 g. For the model metric this is invariant under f and so descends
/// to the quotient.
MetricField quotient_conformal_metric(const MetricField& m);

//--------------------------------------------------------------------------------------------------
// Holonomy

/// gx, gy: unit torus translations; gz: the deck map f; gz_inv: its inverse.
enum class Generator { gx, gy, gz, gz_inv };

const char* to_string(Generator g);

struct LoopClass {
  std::vector<Generator> word;       // leftmost generator is traversed first
  ChartPoint basepoint{0.0, 0.0, 1.0};  // eigenbasis coordinates on the cover
};

/// An affine map p -> linear p + shift of the cover chart.
struct DeckTransform {
  Mat3 linear = Mat3::Identity();
  Vec3 shift = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return linear * p + shift; }
  /// (*this) o inner
  DeckTransform compose(const DeckTransform& inner) const { return {linear * inner.linear, linear * inner.shift + shift}; }
  DeckTransform inverse() const;
};

/// The deck transformation carrying the basepoint to the end of the canonical
/// lift of g. For gz and gz_inv the basepoint's torus part must be fixed by A
/// mod Z^2.
DeckTransform generator_transform(const ToralMatrix& a, const EigenBasis& frame, Generator g,
                                  const ChartPoint& basepoint);

struct HolonomyElement {
  Mat3 matrix = Mat3::Identity();  // in the (v1, v2, v3) frame at the basepoint
  double scale = 1.0;              // mean g-length ratio over the frame
  double ortho_defect = 0.0;       // spread of the ratios and g-orthogonality defect of matrix/scale
};

/// Packs a holonomy matrix with its similarity scale and defect.
HolonomyElement make_holonomy_element(const Mat3& matrix, const Mat3& g_at_base);

/// Transports along the developed lift of the word (each generator's canonical
/// straight lift, moved by the deck transformations accumulated so far) and
/// pulls back with the inverse differential of the total deck transformation.
HolonomyElement holonomy_of_loop(const ToralMatrix& a, const MetricField& m, const LoopClass& loop,
                                 const IntegratorConfig& cfg = {});

/// Holonomy of a closed curve in the chart (a contractible loop).
HolonomyElement holonomy_of_closed_curve(const MetricField& m, const CurveSpec& loop, const IntegratorConfig& cfg = {});

struct HolonomyClassification {
  double scale = 1.0;
  Mat3 ortho_part = Mat3::Identity();
  double ortho_residual = 0.0;           // max |O^T g O - g| / max |g|
  double invariant_line_residual = 0.0;  // g-sine of the angle between h v1 and v1
};

/// Throws NumericError for a singular matrix.
HolonomyClassification classify_holonomy(const HolonomyElement& h, const Mat3& g_at_base);

}  // namespace mtorus
