#pragma once

#include "mtorus/chart.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace mtorus {

/// A Riemannian metric on a chart of dimension Dim whose last coordinate is
/// the fiber coordinate z > 0.
///
/// `components` returns the symmetric positive-definite matrix g_ij(p).
/// `exact_partials`, when present, returns the three (or two) matrices
/// d_k g_ij(p); without it, derivatives are taken by central differences.
template <int Dim>
class MetricFieldN {
 public:
  using Point = Eigen::Matrix<double, Dim, 1>;
  using Matrix = Eigen::Matrix<double, Dim, Dim>;
  using Partials = std::array<Matrix, Dim>;
  using ComponentsFn = std::function<Matrix(const Point&)>;
  using PartialsFn = std::function<Partials(const Point&)>;

  MetricFieldN(ComponentsFn components, std::optional<PartialsFn> exact_partials, std::string label)
      : components_(std::move(components)),
        exact_partials_(std::move(exact_partials)),
        label_(std::move(label)) {}

  Matrix components(const Point& p) const { return components_(p); }
  bool has_exact_partials() const { return exact_partials_.has_value(); }
  Partials exact_partials(const Point& p) const { return (*exact_partials_)(p); }
  const std::string& label() const { return label_; }

  /// Same metric, but forcing the finite-difference derivative path.
  MetricFieldN numeric_only() const { return MetricFieldN(components_, std::nullopt, label_ + " [numeric]"); }

 private:
  ComponentsFn components_;
  std::optional<PartialsFn> exact_partials_;
  std::string label_;
};

using MetricField = MetricFieldN<3>;
using LeafMetric = MetricFieldN<2>;

/// g = dx~^2 + z^exponent dy~^2 + dz^2. The model metric uses exponent 4; other
/// exponents exist as a mutation hook (they break the homothety under the deck map).
MetricField warped_metric(double exponent = 4.0);

/// The model metric diag(1, z^4, 1).
inline MetricField model_metric() { return warped_metric(4.0); }

/// Constant identity metric in dimension Dim.
template <int Dim>
MetricFieldN<Dim> euclidean_metric() {
  using M = MetricFieldN<Dim>;
  return M([](const typename M::Point&) -> typename M::Matrix { return M::Matrix::Identity(); },
           [](const typename M::Point&) {
             typename M::Partials d;
             for (auto& m : d) m.setZero();
             return d;
           },
           "euclidean");
}

/// phi(z)^2 * m for a positive conformal factor depending on z only, with exact
/// partials when m has them. `dphi_sq` is the z-derivative of phi^2.
MetricField conformal_rescale(const MetricField& m, std::function<double(double)> phi_sq,
                              std::function<double(double)> dphi_sq, std::string label);

/// Induced metric diag(z^exponent, 1) on the (y~, z) half-plane leaf.
LeafMetric halfplane_leaf_metric(double exponent = 4.0);

}  // namespace mtorus
