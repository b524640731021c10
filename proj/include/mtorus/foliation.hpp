#pragma once

// The two holonomy-invariant foliations of the cover: lines tangent to d/dx~
// and half-planes spanned by d/dy~, d/dz.

#include "mtorus/chart.hpp"
#include "mtorus/metric_field.hpp"
#include "mtorus/parallel.hpp"
#include "mtorus/transport.hpp"

#include <string>
#include <vector>

namespace mtorus {

enum class LeafKind { line_leaf, halfplane_leaf };

/// Metric induced on the half-plane leaf {x~ = xt0}, coordinates (y~, z).
LeafMetric induced_halfplane_metric(const MetricField& m, double xt0 = 0.0);

/// The 1x1 metric induced on the line leaf through p.
double induced_line_metric(const MetricField& m, const ChartPoint& p);

struct LineLeafReport {
  double induced_metric_variation = 0.0;  // max |g_11(p) - g_11(start)| over probe points
  double induced_metric_deviation = 0.0;  // max |g_11 - 1|
  Termination geodesic;                   // long-horizon run along d/dx~
  double horizon = 0.0;
  double off_leaf_drift = 0.0;            // max |(y~, z) - start| along that geodesic
  double tangent_transport_defect = 0.0;  // |P d/dx~ - d/dx~| along the leaf
  std::string note;
};

/// Flatness is by dimension; completeness is evidenced by a geodesic that runs
/// to t_max without escaping.
LineLeafReport leaf_first_check(const MetricField& m, const IntegratorConfig& cfg = {}, double t_max = 1e3,
                                const ChartPoint& start = {0.0, 0.0, 1.0});

struct HalfPlaneLeafReport {
  std::vector<double> z;
  std::vector<double> gaussian_curvature;
  double max_rel_defect = 0.0;  // max |K z^2 + 2| / 2
  Termination escape;           // downward geodesic from (y~, z) = (0, 1)
  double off_leaf_drift = 0.0;  // max |x~ - x~0| over geodesics launched in the leaf
};

HalfPlaneLeafReport leaf_second_check(const MetricField& m, const std::vector<double>& z_samples,
                                      const IntegratorConfig& cfg = {}, Exec policy = Exec::parallel);

struct ProductSplitReport {
  std::size_t points = 0;
  double off_block_max = 0.0;               // max |g_12|, |g_13|
  double line_block_variation = 0.0;        // max |g_11(p) - g_11(0, 0, 1)|
  double halfplane_block_dependence = 0.0;  // max |block(p) - block(0, 0, p.z)|
  double mixed_christoffel_max = 0.0;       // symbols with indices on both sides of the split
  double mixed_sectional_max = 0.0;         // |K| of planes containing d/dx~
};

ProductSplitReport product_split_check(const MetricField& m, const std::vector<ChartPoint>& points,
                                       Exec policy = Exec::parallel);

/// True when {k, i, j} has indices from both {x~} and {y~, z}.
constexpr bool straddles_split(int k, int i, int j) {
  const int in_line = (k == kXt) + (i == kXt) + (j == kXt);
  return in_line > 0 && in_line < 3;
}

}  // namespace mtorus
