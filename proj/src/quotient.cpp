#include "mtorus/quotient.hpp"

#include "mtorus/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mtorus {

namespace {

IntMatrix2 multiply(const IntMatrix2& l, const IntMatrix2& r) {
  return {l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3], l[2] * r[0] + l[3] * r[2],
          l[2] * r[1] + l[3] * r[3]};
}

Vec2 apply(const IntMatrix2& m, double x, double y) {
  return {static_cast<double>(m[0]) * x + static_cast<double>(m[1]) * y,
          static_cast<double>(m[2]) * x + static_cast<double>(m[3]) * y};
}

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

//--------------------------------------------------------------------------------------------------

Mat2 ToralMatrix::as_real() const {
  Mat2 m;
  m << static_cast<double>(entries_[0]), static_cast<double>(entries_[1]), static_cast<double>(entries_[2]),
      static_cast<double>(entries_[3]);
  return m;
}

IntMatrix2 ToralMatrix::power(int k) const {
  const IntMatrix2 inv{entries_[3], -entries_[1], -entries_[2], entries_[0]};
  const IntMatrix2& base = k >= 0 ? entries_ : inv;
  IntMatrix2 out{1, 0, 0, 1};
  for (int i = 0; i < std::abs(k); ++i) out = multiply(out, base);
  return out;
}

ToralMatrix validate_toral_matrix(const IntMatrix2& e) {
  const std::int64_t det = e[0] * e[3] - e[1] * e[2];
  if (det != 1) throw ConfigError("not in SL(2,Z): determinant is " + std::to_string(det));
  if (e[0] + e[3] <= 2) {
    throw ConfigError("eigenvalues not real and > 1: trace is " + std::to_string(e[0] + e[3]));
  }
  return ToralMatrix(e);
}

IntMatrix2 parse_matrix_entries(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  IntMatrix2 e{};
  for (auto& v : e) {
    if (!(in >> v)) throw ConfigError("matrix must be four integers \"a11 a12 a21 a22\", got \"" + std::string(text) + "\"");
  }
  std::string rest;
  if (in >> rest) throw ConfigError("matrix has trailing input: \"" + rest + "\"");
  return e;
}

//--------------------------------------------------------------------------------------------------

TorusPoint EigenBasis::to_torus(const ChartPoint& p) const {
  const Vec3 t = frame_change * p.vec();
  return {t[0], t[1], t[2]};
}

ChartPoint EigenBasis::to_chart(const TorusPoint& p) const {
  return ChartPoint(Vec3(frame_change.partialPivLu().solve(Vec3(p.x, p.y, p.z))));
}

EigenBasis eigen_basis(const ToralMatrix& a) {
  const auto& e = a.entries();
  const double tr = static_cast<double>(a.trace());
  EigenBasis b;
  b.lambda = 0.5 * (tr + std::sqrt(tr * tr - 4.0));
  b.lambda_inv = 1.0 / b.lambda;
  // a21 != 0: an integer triangular matrix of determinant 1 has trace +-2.
  const double a21 = static_cast<double>(e[2]), a22 = static_cast<double>(e[3]);
  b.v1 = Vec2((b.lambda - a22) / a21, 1.0);
  b.v2 = Vec2((b.lambda_inv - a22) / a21, 1.0);
  b.frame_change.setIdentity();
  b.frame_change.block<2, 1>(0, 0) = b.v1;
  b.frame_change.block<2, 1>(0, 1) = b.v2;
  return b;
}

double mod1(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r = 0.0;
  return r;
}

TorusPoint deck_apply(const ToralMatrix& a, const TorusPoint& p) {
  const Vec2 xy = apply(a.entries(), p.x, p.y);
  return {mod1(xy[0]), mod1(xy[1]), eigen_basis(a).lambda * p.z};
}

TorusPoint deck_apply_inverse(const ToralMatrix& a, const TorusPoint& p) {
  const Vec2 xy = apply(a.power(-1), p.x, p.y);
  return {mod1(xy[0]), mod1(xy[1]), p.z / eigen_basis(a).lambda};
}

Mat3 deck_differential(const ToralMatrix& a, const EigenBasis& frame) {
  Mat3 torus = Mat3::Zero();
  torus.block<2, 2>(0, 0) = a.as_real();
  torus(2, 2) = frame.lambda;
  return frame.frame_change.partialPivLu().solve(torus * frame.frame_change);
}

ChartPoint deck_apply_chart(const ToralMatrix& a, const EigenBasis& frame, const ChartPoint& p) {
  return ChartPoint(Vec3(deck_differential(a, frame) * p.vec()));
}

double pullback_residual(const ToralMatrix& a, const MetricField& m, const ChartPoint& p, double factor) {
  const EigenBasis frame = eigen_basis(a);
  const Mat3 df = deck_differential(a, frame);
  const ChartPoint fp(Vec3(df * p.vec()));
  const Mat3 pulled = df.transpose() * metric_at(m, fp) * df;
  return max_abs(pulled - factor * metric_at(m, p));
}

double pullback_metric_residual(const ToralMatrix& a, const MetricField& m, const ChartPoint& p) {
  const double lambda = eigen_basis(a).lambda;
  return pullback_residual(a, m, p, lambda * lambda);
}

FundamentalDomainPoint reduce_to_fundamental_domain(const ToralMatrix& a, const TorusPoint& p) {
  if (!(p.z > 0.0)) throw DomainError("reduce_to_fundamental_domain: z must be positive");
  const double lambda = eigen_basis(a).lambda;
  int k = -static_cast<int>(std::floor(std::log(p.z) / std::log(lambda)));
  auto scaled = [&](int kk) { return p.z * std::pow(lambda, kk); };
  while (scaled(k) >= lambda) --k;
  while (scaled(k) < 1.0) ++k;
  const Vec2 xy = apply(a.power(k), p.x, p.y);
  return {{mod1(xy[0]), mod1(xy[1]), scaled(k)}, k};
}

MetricField quotient_conformal_metric(const MetricField& m) {
  return conformal_rescale(
      m, [](double z) { return 1.0 / (z * z); }, [](double z) { return -2.0 / (z * z * z); },
      "z^-2 * " + m.label());
}

//--------------------------------------------------------------------------------------------------

const char* to_string(Generator g) {
  switch (g) {
    case Generator::gx:
      return "gx";
    case Generator::gy:
      return "gy";
    case Generator::gz:
      return "gz";
    case Generator::gz_inv:
      return "gz^-1";
  }
  return "?";
}

DeckTransform DeckTransform::inverse() const {
  const Mat3 li = linear.inverse();
  return {li, -li * shift};
}

DeckTransform generator_transform(const ToralMatrix& a, const EigenBasis& frame, Generator g,
                                  const ChartPoint& basepoint) {
  const auto to_chart_vector = [&](const Vec3& torus_vec) -> Vec3 {
    return frame.frame_change.partialPivLu().solve(torus_vec);
  };
  switch (g) {
    case Generator::gx:
      return {Mat3::Identity(), to_chart_vector(Vec3(1, 0, 0))};
    case Generator::gy:
      return {Mat3::Identity(), to_chart_vector(Vec3(0, 1, 0))};
    case Generator::gz:
    case Generator::gz_inv: {
      // f(b) = b + n on the torus part; compose with the translation by -n so
      // that the lift stays on the z-line through the basepoint.
      const TorusPoint bt = frame.to_torus(basepoint);
      const Vec2 image = apply(a.entries(), bt.x, bt.y);
      const Vec2 n(image[0] - bt.x, image[1] - bt.y);
      if ((n - n.array().round().matrix()).cwiseAbs().maxCoeff() > 1e-9) {
        throw DomainError("gz loop needs a basepoint whose torus part is fixed by A mod Z^2");
      }
      DeckTransform f{deck_differential(a, frame), -to_chart_vector(Vec3(std::round(n[0]), std::round(n[1]), 0.0))};
      return g == Generator::gz ? f : f.inverse();
    }
  }
  return {};
}

HolonomyElement make_holonomy_element(const Mat3& matrix, const Mat3& g) {
  HolonomyElement h;
  h.matrix = matrix;
  Vec3 ratios;
  for (int i = 0; i < 3; ++i) {
    const Vec3 col = matrix.col(i);
    ratios[i] = std::sqrt(col.dot(g * col) / g(i, i));
  }
  h.scale = ratios.mean();
  const Mat3 ortho = matrix / h.scale;
  const double spread = (ratios.array() / h.scale - 1.0).abs().maxCoeff();
  const double orth = max_abs(ortho.transpose() * g * ortho - g) / max_abs(g);
  h.ortho_defect = std::max(spread, orth);
  return h;
}

HolonomyElement holonomy_of_loop(const ToralMatrix& a, const MetricField& m, const LoopClass& loop,
                                 const IntegratorConfig& cfg) {
  const Mat3 g_base = metric_at(m, loop.basepoint, cfg.z_floor);
  if (loop.word.empty()) return make_holonomy_element(Mat3::Identity(), g_base);

  const EigenBasis frame = eigen_basis(a);
  const Vec3 base = loop.basepoint.vec();
  DeckTransform developed;  // deck transformation reached so far
  Mat3 transport = Mat3::Identity();
  for (const Generator g : loop.word) {
    const DeckTransform step = generator_transform(a, frame, g, loop.basepoint);
    const Vec3 from = developed.apply(base);
    const Vec3 to = developed.apply(step.apply(base));
    CurveSpec lift({StraightSegment{ChartPoint(from), ChartPoint(to)}});
    try {
      lift.validate(cfg.z_floor);
    } catch (const DomainError& e) {
      throw LiftEscapeError(std::string("lift of ") + to_string(g) + " leaves the chart: " + e.what());
    }
    transport = transport_matrix(m, lift, cfg) * transport;
    developed = developed.compose(step);
  }
  // The lift ends at developed(base), so pulling back by its differential closes the loop.
  const Mat3 pulled_back = developed.linear.partialPivLu().solve(transport);
  return make_holonomy_element(pulled_back, g_base);
}

HolonomyElement holonomy_of_closed_curve(const MetricField& m, const CurveSpec& loop, const IntegratorConfig& cfg) {
  if (loop.empty()) throw DomainError("holonomy_of_closed_curve: empty curve");
  if ((loop.end().vec() - loop.start().vec()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("holonomy_of_closed_curve: curve is not closed");
  }
  return make_holonomy_element(transport_matrix(m, loop, cfg), metric_at(m, loop.start(), cfg.z_floor));
}

HolonomyClassification classify_holonomy(const HolonomyElement& h, const Mat3& g) {
  if (!(std::abs(h.matrix.determinant()) > 1e-14)) throw NumericError("classify_holonomy: singular holonomy matrix");
  const HolonomyElement packed = make_holonomy_element(h.matrix, g);
  HolonomyClassification c;
  c.scale = packed.scale;
  c.ortho_part = h.matrix / c.scale;
  c.ortho_residual = max_abs(c.ortho_part.transpose() * g * c.ortho_part - g) / max_abs(g);

  const Vec3 e1 = Vec3::UnitX();
  const Vec3 u = h.matrix * e1;
  const Vec3 perp = u - (u.dot(g * e1) / g(0, 0)) * e1;
  c.invariant_line_residual = std::sqrt(std::max(0.0, perp.dot(g * perp))) / std::sqrt(u.dot(g * u));
  return c;
}

}  // namespace mtorus
