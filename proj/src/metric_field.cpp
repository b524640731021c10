#include "mtorus/metric_field.hpp"

#include <cmath>
#include <sstream>

namespace mtorus {

MetricField warped_metric(double exponent) {
  std::ostringstream label;
  label << "diag(1, z^" << exponent << ", 1)";
  auto components = [exponent](const Vec3& p) -> Mat3 {
    Mat3 g = Mat3::Identity();
    g(kYt, kYt) = std::pow(p[kZ], exponent);
    return g;
  };
  auto partials = [exponent](const Vec3& p) {
    MetricField::Partials d;
    for (auto& m : d) m.setZero();
    d[kZ](kYt, kYt) = exponent * std::pow(p[kZ], exponent - 1.0);
    return d;
  };
  return MetricField(components, partials, label.str());
}

MetricField conformal_rescale(const MetricField& m, std::function<double(double)> phi_sq,
                              std::function<double(double)> dphi_sq, std::string label) {
  auto components = [m, phi_sq](const Vec3& p) -> Mat3 { return phi_sq(p[kZ]) * m.components(p); };
  if (!m.has_exact_partials()) return MetricField(components, std::nullopt, std::move(label));

  // d_k(phi^2 g) = phi^2 d_k g + delta_kz (phi^2)' g
  auto partials = [m, phi_sq, dphi_sq](const Vec3& p) {
    MetricField::Partials d = m.exact_partials(p);
    const double s = phi_sq(p[kZ]);
    for (auto& dk : d) dk *= s;
    d[kZ] += dphi_sq(p[kZ]) * m.components(p);
    return d;
  };
  return MetricField(components, partials, std::move(label));
}

LeafMetric halfplane_leaf_metric(double exponent) {
  // Coordinates (y~, z); the fiber coordinate is last.
  auto components = [exponent](const Vec2& p) -> Mat2 {
    Mat2 g = Mat2::Identity();
    g(0, 0) = std::pow(p[1], exponent);
    return g;
  };
  auto partials = [exponent](const Vec2& p) {
    LeafMetric::Partials d;
    for (auto& m : d) m.setZero();
    d[1](0, 0) = exponent * std::pow(p[1], exponent - 1.0);
    return d;
  };
  std::ostringstream label;
  label << "leaf diag(z^" << exponent << ", 1)";
  return LeafMetric(components, partials, label.str());
}

}  // namespace mtorus
