// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// the number of failed criteria (capped at 1 for ctest).

#include "mtorus/checklist.hpp"
#include "mtorus/foliation.hpp"
#include "mtorus/kernels.hpp"
#include "mtorus/tensor.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace mtorus;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void need(bool cond, const std::string& what, double value, const std::string& target) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.4g [%s]%s ", what.c_str(), value, target.c_str(), cond ? "" : " <-- FAIL");
    detail << buf;
    ok = ok && cond;
  }
  void below(const std::string& what, double value, double bound) {
    char t[32];
    std::snprintf(t, sizeof t, "< %.0e", bound);
    need(value < bound, what, value, t);
  }
};

int failures = 0;

void criterion(const char* name, double time_limit, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (time_limit > 0) o.below("runtime_s", secs, time_limit);
  std::printf("%s %-28s %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.str().c_str());
  std::fflush(stdout);
  failures += !o.ok;
}

struct Run {
  int status = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  Run r;
  const std::string cmd = std::string("\"") + MTORUS_VERIFY_EXE + "\" " + args;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

constexpr std::size_t kSamples = 1000;
constexpr std::uint64_t kSeed = 20261016;

}  // namespace

int main() {
  const auto a = validate_toral_matrix({2, 1, 1, 1});
  const auto frame = eigen_basis(a);
  const double lambda = frame.lambda;
  const MetricField g = model_metric();
  const IntegratorConfig icfg;  // 1e-10 / 1e-12

  criterion("homothety", 1.0, [&](Outcome& o) {
    o.below("max_pullback_residual", max_of(homothety_residuals(a, g, sample_points(kSeed, kSamples), Exec::parallel)),
            1e-10);
  });

  criterion("nonflatness", 1.0, [&](Outcome& o) {
    const auto pts = sample_points(kSeed + 1, kSamples);
    const auto s = curvature_samples(g, pts, Exec::parallel);
    double scalar = 0, k23 = 0, v1 = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double z2 = pts[i].z * pts[i].z;
      scalar = std::max(scalar, std::abs(s[i].scalar * z2 + 4.0) / 4.0);
      k23 = std::max(k23, std::abs(s[i].sectional_23 * z2 + 2.0) / 2.0);
      v1 = std::max(v1, s[i].v1_plane_max);
    }
    o.below("scalar_z2_rel", scalar, 1e-6);
    o.below("K23_rel", k23, 1e-6);
    o.below("v1_planes", v1, 1e-8);
  });

  criterion("local_metricity", 0, [&](Outcome& o) {
    const auto pts = sample_points(kSeed + 2, kSamples);
    o.below("exact", max_of(compatibility_residuals(g, pts, {}, Exec::parallel)), 1e-8);
    DiffOptions h;
    h.step = 1e-5;
    const auto conn = g.numeric_only();
    const auto num = map_indexed(Exec::parallel, pts.size(), [&](std::size_t i) {
      return max_abs<3>(covariant_metric_derivative_at(conn, g, pts[i].vec(), h));
    });
    o.below("numeric_h1e-5", max_of(num), 1e-5);
    const double d1 = max_of(christoffel_discrepancies(g, pts, 1e-4, Exec::parallel));
    const double d2 = max_of(christoffel_discrepancies(g, pts, 5e-5, Exec::parallel));
    o.below("|order-2|", std::abs(std::log2(d1 / d2) - 2.0), 0.3);
  });

  const Mat3 g_base = metric_at(g, ChartPoint{0, 0, 1});
  criterion("reducibility", 5.0, [&](Outcome& o) {
    double worst = 0;
    for (auto gen : {Generator::gx, Generator::gy, Generator::gz}) {
      worst = std::max(worst, classify_holonomy(holonomy_of_loop(a, g, {{gen}}, icfg), g_base).invariant_line_residual);
    }
    const auto rect = holonomy_of_closed_curve(g, CurveSpec::rectangle({0, 0, 1}, kYt, kZ, 0.7, 0.5), icfg);
    worst = std::max(worst, classify_holonomy(rect, g_base).invariant_line_residual);
    o.below("invariant_line", worst, 1e-7);
  });

  criterion("nonmetric_signature", 0, [&](Outcome& o) {
    const auto hz = holonomy_of_loop(a, g, {{Generator::gz}}, icfg);
    o.below("|H[gz]-I/lambda|", (hz.matrix - Mat3::Identity() / lambda).cwiseAbs().maxCoeff(), 1e-6);
    double unit = 0;
    for (auto gen : {Generator::gx, Generator::gy}) {
      unit = std::max(unit, std::abs(classify_holonomy(holonomy_of_loop(a, g, {{gen}}, icfg), g_base).scale - 1.0));
    }
    const auto rect = holonomy_of_closed_curve(g, CurveSpec::rectangle({0, 0, 1}, kYt, kZ, 0.7, 0.5), icfg);
    unit = std::max(unit, std::abs(classify_holonomy(rect, g_base).scale - 1.0));
    o.below("|scale-1|", unit, 1e-7);
  });

  criterion("incompleteness", 0, [&](Outcome& o) {
    const ChartPoint p{0, 0, 1};
    const auto down = integrate_geodesic(g, p, TangentVector(p, Vec3(0, 0, -1)), 100.0, icfg).termination;
    o.need(down.kind == Termination::Kind::boundary_escape, "downward_escaped",
           down.kind == Termination::Kind::boundary_escape, "1");
    o.below("|t*-1|", std::abs(down.t_exit - 1.0), 1e-6);
    const auto up = integrate_geodesic(g, p, TangentVector(p, Vec3(0, 0, 1)), 100.0, icfg).termination;
    o.need(up.kind == Termination::Kind::completed && up.t == 100.0, "upward_t", up.t, "completed at 100");
  });

  criterion("conformal_preservation", 0, [&](Outcome& o) {
    const auto pts = sample_points(kSeed + 3, kSamples);
    const auto dirs = sample_directions(kSeed + 3, kSamples);
    const auto gq = quotient_conformal_metric(g);
    const auto dev = conformal_samples(g, gq, pts, dirs, Exec::parallel);
    double res = 0, mu = 0;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      res = std::max(res, dev[i].residual);
      mu = std::max(mu, std::abs(dev[i].mu + 2.0 * dirs[i][kZ] / pts[i].z));
    }
    o.below("residual", res, 1e-8);
    o.below("mu_err", mu, 1e-8);
    o.below("f_invariance", max_of(invariance_residuals(a, gq, pts, Exec::parallel)), 1e-10);
  });

  criterion("leaves", 0, [&](Outcome& o) {
    std::vector<double> zs;
    for (int i = 0; i < 50; ++i) zs.push_back(0.05 * std::pow(400.0, i / 49.0));
    const auto half = leaf_second_check(g, zs, icfg);
    o.below("|Kz2+2|/2", half.max_rel_defect, 1e-6);
    const auto line = leaf_first_check(g, icfg, 1e3);
    o.need(line.geodesic.kind == Termination::Kind::completed && line.geodesic.t == 1e3, "line_leaf_t",
           line.geodesic.t, "completed at 1000");
    o.below("mixed_christoffel",
            product_split_check(g, sample_points(kSeed + 4, kSamples), Exec::parallel).mixed_christoffel_max, 1e-10);
  });

  criterion("transport_engine", 0, [&](Outcome& o) {
    const auto pts = sample_points(kSeed + 5, 100, SampleBox{-2, 2, -2, 2, 0.5, 5});
    const auto dirs = sample_directions(kSeed + 5, 100);
    std::vector<TangentVector> seeds;
    for (std::size_t i = 0; i < pts.size(); ++i) seeds.emplace_back(pts[i], dirs[i]);
    o.below("energy_rel", max_of(energy_drifts(g, seeds, 5.0, icfg, Exec::parallel)), 1e-8);
    o.below("isometry", max_of(transport_isometry_defects(g, sample_curves(kSeed + 6, 100), icfg, Exec::parallel)),
            1e-7);

    const ChartPoint p{0.0, 0.0, 1.5};
    const auto R = riemann_at(g, p);
    Mat3 target;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) target(k, l) = -R.R(k, l, kYt, kZ);
    IntegratorConfig tight;
    tight.rel_tol = 1e-13;
    tight.abs_tol = 1e-15;
    const double e1 = (curvature_via_loop(g, p, kYt, kZ, 4e-2, tight) - target).cwiseAbs().maxCoeff();
    const double e2 = (curvature_via_loop(g, p, kYt, kZ, 2e-2, tight) - target).cwiseAbs().maxCoeff();
    o.below("loop_err_eps1e-3",
            (curvature_via_loop(g, p, kYt, kZ, 1e-3, icfg) - target).cwiseAbs().maxCoeff(),
            1e-3);
    o.need(e1 / e2 >= 3.5 && e1 / e2 <= 4.5, "loop_halving_ratio", e1 / e2, "in [3.5, 4.5]");
  });

  criterion("end_to_end", 0, [&](Outcome& o) {
    const auto t0 = Clock::now();
    const auto run = run_cli("--report json");
    o.below("default_run_s", std::chrono::duration<double>(Clock::now() - t0).count(), 30.0);
    o.need(run.status == 0, "exit", run.status, "0");
    const auto rep = parse_report_json(run.out);
    std::size_t passed = 0;
    for (const auto& c : rep.checks) passed += c.passed;
    o.need(rep.checks.size() == 12 && passed == 12, "checks_passed", double(passed), "12 of 12");

    const auto mutated = run_cli("--report json --metric-exponent 3");
    o.need(mutated.status == 1, "mutated_exit", mutated.status, "1");
    bool c2_failed = false;
    for (const auto& c : parse_report_json(mutated.out).checks) c2_failed = c2_failed || (c.id == "C2" && !c.passed);
    o.need(c2_failed, "mutated_C2_failed", c2_failed, "1");
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
