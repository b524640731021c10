#pragma once

// Pointwise tensor calculus on a chart whose last coordinate z is positive.
//
// Conventions (used everywhere in this library):
//   Christoffel   G^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij),   stored as gamma[k](i, j)
//   Riemann       R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
//                 R(d_k, d_l) d_j = R^i_jkl d_i
//                 R^i_jkl = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj
//   Ricci         R_jl = R^i_jil,  scalar = g^jl R_jl
// With these, a round sphere has positive sectional curvature.

#include "mtorus/chart.hpp"
#include "mtorus/metric_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace mtorus {

struct DiffOptions {
  /// Central-difference step; empty means 1e-5 * max(1, |z|).
  std::optional<double> step;
  double z_floor = kZFloor;
};

inline double default_step(double z) { return 1e-5 * std::max(1.0, std::abs(z)); }

template <int Dim>
struct ChristoffelN {
  using Matrix = Eigen::Matrix<double, Dim, Dim>;
  std::array<Matrix, Dim> gamma;  // gamma[k](i, j) = G^k_ij

  double operator()(int k, int i, int j) const { return gamma[k](i, j); }

  /// G^k_ij u^i v^j
  Eigen::Matrix<double, Dim, 1> contract(const Eigen::Matrix<double, Dim, 1>& u,
                                         const Eigen::Matrix<double, Dim, 1>& v) const {
    Eigen::Matrix<double, Dim, 1> out;
    for (int k = 0; k < Dim; ++k) out[k] = u.dot(gamma[k] * v);
    return out;
  }

  /// Matrix A^k_j = G^k_ij u^i, so that transport reads w' = -A w.
  Matrix connection_matrix(const Eigen::Matrix<double, Dim, 1>& u) const {
    Matrix a;
    for (int k = 0; k < Dim; ++k) a.row(k) = u.transpose() * gamma[k];
    return a;
  }
};

template <int Dim>
struct CurvatureN {
  using Matrix = Eigen::Matrix<double, Dim, Dim>;
  std::array<double, Dim * Dim * Dim * Dim> riemann{};  // R^i_jkl
  Matrix ricci = Matrix::Zero();
  double scalar = 0.0;

  double& R(int i, int j, int k, int l) { return riemann[((i * Dim + j) * Dim + k) * Dim + l]; }
  double R(int i, int j, int k, int l) const { return riemann[((i * Dim + j) * Dim + k) * Dim + l]; }

  double max_abs() const {
    double m = 0.0;
    for (double r : riemann) m = std::max(m, std::abs(r));
    return m;
  }
};

using Christoffel = ChristoffelN<3>;
using Curvature = CurvatureN<3>;

struct ConformalDeviation {
  double mu = 0.0;
  double residual = 0.0;
};

//--------------------------------------------------------------------------------------------------

template <int Dim>
typename MetricFieldN<Dim>::Matrix metric_at(const MetricFieldN<Dim>& m,
                                             const typename MetricFieldN<Dim>::Point& p,
                                             double z_floor = kZFloor) {
  require_in_chart(p[Dim - 1], z_floor, "metric_at");
  return m.components(p);
}

/// d_k g_ij at p: exact partials when the metric has them, central differences otherwise.
template <int Dim>
typename MetricFieldN<Dim>::Partials metric_partials_at(const MetricFieldN<Dim>& m,
                                                        const typename MetricFieldN<Dim>::Point& p,
                                                        const DiffOptions& opt = {}) {
  const double z = p[Dim - 1];
  require_in_chart(z, opt.z_floor, "metric_partials_at");
  if (m.has_exact_partials()) return m.exact_partials(p);

  const double h = opt.step.value_or(default_step(z));
  require_in_chart(z - h, opt.z_floor, "metric_partials_at stencil");
  typename MetricFieldN<Dim>::Partials d;
  for (int k = 0; k < Dim; ++k) {
    auto plus = p, minus = p;
    plus[k] += h;
    minus[k] -= h;
    d[k] = (m.components(plus) - m.components(minus)) / (2.0 * h);
    d[k] = 0.5 * (d[k] + d[k].transpose()).eval();
  }
  return d;
}

template <int Dim>
ChristoffelN<Dim> christoffel_at(const MetricFieldN<Dim>& m, const typename MetricFieldN<Dim>::Point& p,
                                 const DiffOptions& opt = {}) {
  using Matrix = typename MetricFieldN<Dim>::Matrix;
  const Matrix g = metric_at(m, p, opt.z_floor);
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || std::abs(g.determinant()) < 1e-300) {
    throw NumericError("christoffel_at: metric is not invertible at the given point");
  }
  const Matrix ginv = ldlt.solve(Matrix::Identity());
  const auto dg = metric_partials_at(m, p, opt);

  // Lowered symbols G_ijl = 1/2 (d_i g_jl + d_j g_il - d_l g_ij), then raise l.
  ChristoffelN<Dim> out;
  for (auto& gk : out.gamma) gk.setZero();
  for (int i = 0; i < Dim; ++i) {
    for (int j = i; j < Dim; ++j) {
      Eigen::Matrix<double, Dim, 1> lowered;
      for (int l = 0; l < Dim; ++l) lowered[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      const Eigen::Matrix<double, Dim, 1> raised = ginv * lowered;
      for (int k = 0; k < Dim; ++k) {
        out.gamma[k](i, j) = raised[k];
        out.gamma[k](j, i) = raised[k];
      }
    }
  }
  return out;
}

/// Riemann tensor, Ricci tensor and scalar curvature. Derivatives of the
/// Christoffel symbols are central differences of christoffel_at.
template <int Dim>
CurvatureN<Dim> riemann_at(const MetricFieldN<Dim>& m, const typename MetricFieldN<Dim>::Point& p,
                           const DiffOptions& opt = {}) {
  const double z = p[Dim - 1];
  require_in_chart(z, opt.z_floor, "riemann_at");
  const double h = opt.step.value_or(default_step(z));
  require_in_chart(z - h, opt.z_floor, "riemann_at stencil");

  const auto gam = christoffel_at(m, p, opt);
  // Inner Christoffel evaluations use their own default step.
  DiffOptions inner = opt;
  inner.step.reset();
  std::array<ChristoffelN<Dim>, Dim> dgam;  // dgam[k].gamma[i](l, j) = d_k G^i_lj
  for (int k = 0; k < Dim; ++k) {
    auto plus = p, minus = p;
    plus[k] += h;
    minus[k] -= h;
    const auto cp = christoffel_at(m, plus, inner);
    const auto cm = christoffel_at(m, minus, inner);
    for (int i = 0; i < Dim; ++i) dgam[k].gamma[i] = (cp.gamma[i] - cm.gamma[i]) / (2.0 * h);
  }

  CurvatureN<Dim> out;
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j)
      for (int k = 0; k < Dim; ++k)
        for (int l = 0; l < Dim; ++l) {
          double r = dgam[k].gamma[i](l, j) - dgam[l].gamma[i](k, j);
          for (int s = 0; s < Dim; ++s) r += gam.gamma[i](k, s) * gam.gamma[s](l, j) - gam.gamma[i](l, s) * gam.gamma[s](k, j);
          out.R(i, j, k, l) = r;
        }

  for (int j = 0; j < Dim; ++j)
    for (int l = 0; l < Dim; ++l) {
      double r = 0.0;
      for (int i = 0; i < Dim; ++i) r += out.R(i, j, i, l);
      out.ricci(j, l) = r;
    }
  out.ricci = (0.5 * (out.ricci + out.ricci.transpose())).eval();
  const auto ginv = metric_at(m, p, opt.z_floor).inverse();
  out.scalar = (ginv.cwiseProduct(out.ricci)).sum();
  return out;
}

/// <R(u,v)v, u> / (|u|^2 |v|^2 - <u,v>^2) from an already computed curvature.
template <int Dim>
double sectional_curvature(const CurvatureN<Dim>& curv, const Eigen::Matrix<double, Dim, Dim>& g,
                           const Eigen::Matrix<double, Dim, 1>& u, const Eigen::Matrix<double, Dim, 1>& v) {
  const double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
  const double gram = uu * vv - uv * uv;
  if (!(gram > 1e-12 * uu * vv)) throw DegeneratePlaneError("sectional_curvature: vectors span no plane");
  Eigen::Matrix<double, Dim, 1> ruvv = Eigen::Matrix<double, Dim, 1>::Zero();
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j)
      for (int k = 0; k < Dim; ++k)
        for (int l = 0; l < Dim; ++l) ruvv[i] += curv.R(i, j, k, l) * v[j] * u[k] * v[l];
  return u.dot(g * ruvv) / gram;
}

template <int Dim>
double sectional_curvature_at(const MetricFieldN<Dim>& m, const typename MetricFieldN<Dim>::Point& p,
                              const Eigen::Matrix<double, Dim, 1>& u, const Eigen::Matrix<double, Dim, 1>& v,
                              const DiffOptions& opt = {}) {
  const auto g = metric_at(m, p, opt.z_floor);
  {
    // Reject degenerate planes before paying for the curvature.
    const double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
    if (!(uu * vv - uv * uv > 1e-12 * uu * vv)) {
      throw DegeneratePlaneError("sectional_curvature_at: vectors span no plane");
    }
  }
  return sectional_curvature(riemann_at(m, p, opt), g, u, v);
}

inline double sectional_curvature_at(const MetricField& m, const ChartPoint& p, const TangentVector& u,
                                     const TangentVector& v, const DiffOptions& opt = {}) {
  if (!(u.base == p) || !(v.base == p)) throw DomainError("sectional_curvature_at: vectors not based at p");
  return sectional_curvature_at<3>(m, p.vec(), u.comp, v.comp, opt);
}

/// (nabla g_target)_{ij;k} for the Levi-Civita connection of m_conn, returned
/// as out[k](i, j) = d_k g_ij - G^l_ki g_lj - G^l_kj g_il.
template <int Dim>
std::array<Eigen::Matrix<double, Dim, Dim>, Dim> covariant_metric_derivative_at(
    const MetricFieldN<Dim>& m_conn, const MetricFieldN<Dim>& m_target,
    const typename MetricFieldN<Dim>::Point& p, const DiffOptions& opt = {}) {
  const auto gam = christoffel_at(m_conn, p, opt);
  const auto g = metric_at(m_target, p, opt.z_floor);
  const auto dg = metric_partials_at(m_target, p, opt);
  std::array<Eigen::Matrix<double, Dim, Dim>, Dim> out;
  for (int k = 0; k < Dim; ++k) {
    Eigen::Matrix<double, Dim, Dim> a;  // a(l, i) = G^l_ki
    for (int l = 0; l < Dim; ++l) a.row(l) = gam.gamma[l].row(k);
    const Eigen::Matrix<double, Dim, Dim> t = a.transpose() * g;  // t(i, j) = G^l_ki g_lj
    out[k] = dg[k] - t - t.transpose();
  }
  return out;
}

template <int Dim>
double max_abs(const std::array<Eigen::Matrix<double, Dim, Dim>, Dim>& t) {
  double m = 0.0;
  for (const auto& x : t) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

/// Least-squares mu with nabla_V g_target ~ mu g_target, and the Frobenius
/// norm of what is left over.
template <int Dim>
ConformalDeviation conformal_deviation_at(const MetricFieldN<Dim>& m_conn, const MetricFieldN<Dim>& m_target,
                                          const typename MetricFieldN<Dim>::Point& p,
                                          const Eigen::Matrix<double, Dim, 1>& V, const DiffOptions& opt = {}) {
  if (!V.allFinite() || V.squaredNorm() == 0.0) throw DomainError("conformal_deviation_at: V must be nonzero");
  const auto d = covariant_metric_derivative_at(m_conn, m_target, p, opt);
  Eigen::Matrix<double, Dim, Dim> n = Eigen::Matrix<double, Dim, Dim>::Zero();
  for (int k = 0; k < Dim; ++k) n += V[k] * d[k];
  const auto g = metric_at(m_target, p, opt.z_floor);
  ConformalDeviation out;
  out.mu = n.cwiseProduct(g).sum() / g.squaredNorm();
  out.residual = (n - out.mu * g).norm();
  return out;
}

inline ConformalDeviation conformal_deviation_at(const MetricField& m_conn, const MetricField& m_target,
                                                 const ChartPoint& p, const TangentVector& V,
                                                 const DiffOptions& opt = {}) {
  if (!(V.base == p)) throw DomainError("conformal_deviation_at: V not based at p");
  return conformal_deviation_at<3>(m_conn, m_target, p.vec(), V.comp, opt);
}

}  // namespace mtorus
