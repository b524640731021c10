#include "mtorus/checklist.hpp"

#include "mtorus/foliation.hpp"
#include "mtorus/kernels.hpp"
#include "mtorus/tensor.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

namespace mtorus {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Bisection bracket (1e-9) plus integration error on the escape event.
constexpr double kEventLocalization = 1e-8;

class CheckBuilder {
 public:
  CheckBuilder(std::string id, std::string description, std::string claim) {
    check_.id = std::move(id);
    check_.description = std::move(description);
    check_.paper_claim = std::move(claim);
  }

  void part(std::string name, double residual, double tolerance) {
    const bool ok = !std::isnan(residual) && residual <= tolerance;
    check_.parts.push_back({std::move(name), residual, tolerance, ok});
  }

  /// Boolean evidence: residual 0 when the condition holds, 1 otherwise.
  void require(std::string name, bool condition) { part(std::move(name), condition ? 0.0 : 1.0, 0.5); }

  Check finish() {
    double worst = 0.0;
    bool all = !check_.parts.empty() && check_.diagnostic.empty();
    for (const auto& p : check_.parts) {
      all = all && p.passed;
      double ratio = p.residual / p.tolerance;
      if (std::isnan(ratio)) ratio = kInf;
      worst = std::max(worst, ratio);
    }
    if (!check_.diagnostic.empty() || check_.parts.empty()) worst = kInf;
    check_.residual = worst;
    check_.tolerance = 1.0;
    check_.passed = all && worst <= check_.tolerance;
    return check_;
  }

  void fail(std::string diagnostic) { check_.diagnostic = std::move(diagnostic); }

 private:
  Check check_;
};

struct CheckSpec {
  const char* id;
  const char* description;
  const char* claim;
};

// Claim strings state the mathematical assertion each check certifies.
constexpr CheckSpec kChecks[] = {
    {"C1", "A is in SL(2,Z) with real eigenvalues lambda > 1 > 1/lambda",
     "A in SL(2,Z) has real positive eigenvalues, one of them lambda > 1"},
    {"C2", "deck map is a homothety: df^T g(f p) df = lambda^2 g(p)",
     "f acts on g as a homothety with coefficient lambda"},
    {"C3", "metric compatibility nabla g = 0 (exact and finite-difference partials)",
     "the connection is the Levi-Civita connection of g near every point (locally metric)"},
    {"C4", "nonflatness: scalar curvature z^2 = -4, K(v2,v3) = -2/z^2, planes with v1 flat",
     "g and its connection are not flat"},
    {"C5", "v1 = d/dx~ is parallel and its line is preserved by df", "the vector field v1 is parallel"},
    {"C6", "holonomy preserves the v1 line for gx, gy, gz, a word and a contractible loop",
     "the holonomy group has an invariant line (reducible)"},
    {"C7", "[gz] holonomy is (1/lambda) I; torus and contractible loops are isometric",
     "holonomy is locally metric but the deck map is a proper similarity"},
    {"C8", "downward z-geodesic escapes at affine parameter 1; upward one survives",
     "g on T^2 x R_+ is not complete, so the connection is not complete"},
    {"C9", "g' = z^-2 g: nabla_V g' = mu(V) g' with mu(V) = -2 V_z / z, and f*g' = g'",
     "the connection preserves a conformal structure"},
    {"C10", "line leaf: induced metric constant, long geodesic completes, leaf is totally geodesic",
     "leaves of the first foliation are complete and flat"},
    {"C11", "half-plane leaf: Gaussian curvature -2/z^2, downward geodesic escapes, totally geodesic",
     "leaves of the second foliation are neither complete nor flat"},
    {"C12", "product split: block-diagonal g, leaf-only block dependence, no mixed symbols or curvature",
     "the cover is isometric to the product of a line leaf and a half-plane leaf"},
};

using CheckBody = std::function<void(CheckBuilder&)>;

Check run_one(const CheckSpec& spec, const CheckBody& body) {
  CheckBuilder b(spec.id, spec.description, spec.claim);
  try {
    body(b);
  } catch (const std::exception& e) {
    b.fail(e.what());
  }
  return b.finish();
}

double rel(double value, double expected) { return std::abs(value - expected) / std::abs(expected); }

// One holonomy computation per loop, shared by C6 and C7.
struct HolonomyEvidence {
  HolonomyElement gx, gy, gz, word, contractible;
  Mat3 g_base;
};

HolonomyEvidence compute_holonomies(const ToralMatrix& a, const MetricField& m, const IntegratorConfig& cfg,
                                    Exec policy) {
  const ChartPoint base(0.0, 0.0, 1.0);
  HolonomyEvidence ev;
  ev.g_base = metric_at(m, base);
  const std::vector<std::vector<Generator>> words = {
      {Generator::gx},
      {Generator::gy},
      {Generator::gz},
      {Generator::gx, Generator::gz, Generator::gy, Generator::gz_inv},
  };
  auto elems = map_indexed(policy, words.size() + 1, [&](std::size_t i) {
    if (i < words.size()) return holonomy_of_loop(a, m, LoopClass{words[i], base}, cfg);
    return holonomy_of_closed_curve(m, CurveSpec::rectangle(base, kYt, kZ, 0.7, 0.5), cfg);
  });
  ev.gx = elems[0];
  ev.gy = elems[1];
  ev.gz = elems[2];
  ev.word = elems[3];
  ev.contractible = elems[4];
  return ev;
}

}  // namespace

bool VerificationReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

VerificationReport run_checklist(const CheckConfig& config) {
  VerificationReport report;
  auto& echo = report.config;
  echo.matrix = config.matrix;
  echo.samples = config.samples;
  echo.seed = config.seed;
  echo.t_max = config.t_max;
  echo.metric_exponent = config.metric_exponent;
  echo.rel_tol = config.integrator.rel_tol;
  echo.abs_tol = config.integrator.abs_tol;
  echo.z_floor = config.integrator.z_floor;
  echo.tol = config.tol;

  const auto& tol = config.tol;
  const auto& cfg = config.integrator;
  const Exec policy = config.policy;

  // C1 gates everything else.
  std::optional<ToralMatrix> a;
  report.checks.push_back(run_one(kChecks[0], [&](CheckBuilder& b) {
    const auto& e = config.matrix;
    const std::int64_t det = e[0] * e[3] - e[1] * e[2];
    const std::int64_t trace = e[0] + e[3];
    b.part("|det A - 1|", static_cast<double>(std::llabs(det - 1)), 0.5);
    b.part("max(0, 3 - trace A)", static_cast<double>(std::max<std::int64_t>(0, 3 - trace)), 0.5);
    a = validate_toral_matrix(e);
    const EigenBasis frame = eigen_basis(*a);
    const Mat2 am = a->as_real();
    b.part("|lambda * lambda_2 - 1|", std::abs(frame.lambda * frame.lambda_inv - 1.0), 1e-14);
    b.part("|A v1 - lambda v1| / |lambda v1|", (am * frame.v1 - frame.lambda * frame.v1).norm() / (frame.lambda * frame.v1.norm()),
           1e-12);
    b.part("|A v2 - v2 / lambda| / |v2 / lambda|",
           (am * frame.v2 - frame.lambda_inv * frame.v2).norm() / (frame.lambda_inv * frame.v2.norm()), 1e-12);
  }));

  if (!a) {
    for (std::size_t i = 1; i < std::size(kChecks); ++i) {
      report.checks.push_back(run_one(kChecks[i], [](CheckBuilder& b) { b.fail("not run: matrix rejected at C1"); }));
    }
    return report;
  }

  const EigenBasis frame = eigen_basis(*a);
  const double lambda = frame.lambda;
  const MetricField g = warped_metric(config.metric_exponent);
  const auto points = sample_points(config.seed, config.samples);
  const auto directions = sample_directions(config.seed, config.samples);

  // C2
  report.checks.push_back(run_one(kChecks[1], [&](CheckBuilder& b) {
    b.part("max |df^T g(f p) df - lambda^2 g(p)|", max_of(homothety_residuals(*a, g, points, policy)), tol.homothety);
    const Mat3 df = deck_differential(*a, frame);
    const Mat3 expected = Vec3(lambda, 1.0 / lambda, lambda).asDiagonal();
    b.part("max |df - diag(lambda, 1/lambda, lambda)| / lambda", (df - expected).cwiseAbs().maxCoeff() / lambda, 1e-12);
  }));

  // C3
  report.checks.push_back(run_one(kChecks[2], [&](CheckBuilder& b) {
    b.part("max |nabla g| (exact partials)", max_of(compatibility_residuals(g, points, {}, policy)), tol.zero);
    DiffOptions numeric;
    numeric.step = 1e-5;
    // Connection from finite differences, differentiating the exact metric:
    // with the same partials on both sides nabla g vanishes identically.
    const MetricField numeric_g = g.numeric_only();
    const auto numeric_residuals = map_indexed(policy, points.size(), [&](std::size_t i) {
      return max_abs<3>(covariant_metric_derivative_at<3>(numeric_g, g, points[i].vec(), numeric));
    });
    b.part("max |nabla g| (central-difference connection, h = 1e-5)", max_of(numeric_residuals),
           tol.numeric_partials);
    const double d1 = max_of(christoffel_discrepancies(g, points, 1e-4, policy));
    const double d2 = max_of(christoffel_discrepancies(g, points, 5e-5, policy));
    b.part("|observed finite-difference order - 2|", std::abs(std::log2(d1 / d2) - 2.0), tol.fd_order_band);
  }));

  // C4
  report.checks.push_back(run_one(kChecks[3], [&](CheckBuilder& b) {
    const auto samples = curvature_samples(g, points, policy);
    double scalar_defect = 0.0, k23_defect = 0.0, v1_plane = 0.0, symmetry = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double z = points[i].z;
      scalar_defect = std::max(scalar_defect, rel(samples[i].scalar * z * z, -4.0));
      k23_defect = std::max(k23_defect, rel(samples[i].sectional_23, -2.0 / (z * z)));
      v1_plane = std::max(v1_plane, samples[i].v1_plane_max);
      symmetry = std::max({symmetry, samples[i].antisym_max, samples[i].bianchi_max});
      if (std::isnan(samples[i].scalar)) scalar_defect = samples[i].scalar;
    }
    b.part("max |scalar z^2 + 4| / 4", scalar_defect, tol.relative);
    b.part("max |K(v2,v3) z^2 + 2| / 2", k23_defect, tol.relative);
    b.part("max |K| over planes containing v1", v1_plane, tol.zero);
    b.part("max antisymmetry / first Bianchi defect", symmetry, 1e-6);
  }));

  // C5
  report.checks.push_back(run_one(kChecks[4], [&](CheckBuilder& b) {
    const auto gamma_v1 = map_indexed(policy, points.size(), [&](std::size_t i) {
      const auto gam = christoffel_at(g, points[i]);
      double d = 0.0;
      for (int k = 0; k < 3; ++k) d = std::max(d, gam.gamma[k].col(kXt).cwiseAbs().maxCoeff());
      return d;
    });
    b.part("max |nabla v1| = max |G^k_i1|", max_of(gamma_v1), tol.zero);
    const auto curves = sample_curves(config.seed, 50);
    b.part("max |P v1 - v1| over 50 random curves", max_of(parallel_field_defects(g, curves, cfg, policy)), tol.zero);
    const Mat3 df = deck_differential(*a, frame);
    b.part("|df v1 - (df v1)_1 v1| / |df v1|", df.col(kXt).tail<2>().norm() / df.col(kXt).norm(), 1e-12);
  }));

  // C6 and C7 share the holonomy computations.
  std::optional<HolonomyEvidence> hol;
  std::string hol_error;
  try {
    hol = compute_holonomies(*a, g, cfg, policy);
  } catch (const std::exception& e) {
    hol_error = e.what();
  }

  report.checks.push_back(run_one(kChecks[5], [&](CheckBuilder& b) {
    if (!hol) throw std::runtime_error(hol_error);
    const std::pair<const char*, const HolonomyElement*> loops[] = {
        {"[gx]", &hol->gx}, {"[gy]", &hol->gy}, {"[gz]", &hol->gz},
        {"[gx gz gy gz^-1]", &hol->word}, {"contractible y~-z rectangle", &hol->contractible}};
    for (const auto& [name, h] : loops) {
      b.part(std::string("invariant-line residual ") + name,
             classify_holonomy(*h, hol->g_base).invariant_line_residual, tol.holonomy);
    }
  }));

  report.checks.push_back(run_one(kChecks[6], [&](CheckBuilder& b) {
    if (!hol) throw std::runtime_error(hol_error);
    b.part("max |H[gz] - I / lambda|", (hol->gz.matrix - Mat3::Identity() / lambda).cwiseAbs().maxCoeff(),
           tol.similarity_entry);
    b.part("|scale[gz] - 1/lambda|", std::abs(classify_holonomy(hol->gz, hol->g_base).scale - 1.0 / lambda),
           tol.similarity_entry);
    b.part("ortho defect [gz]", hol->gz.ortho_defect, tol.holonomy);
    const std::pair<const char*, const HolonomyElement*> unit[] = {
        {"[gx]", &hol->gx}, {"[gy]", &hol->gy}, {"contractible", &hol->contractible}};
    for (const auto& [name, h] : unit) {
      const auto c = classify_holonomy(*h, hol->g_base);
      b.part(std::string("|scale - 1| ") + name, std::abs(c.scale - 1.0), tol.holonomy);
      b.part(std::string("ortho defect ") + name, h->ortho_defect, tol.holonomy);
    }
  }));

  // C8
  report.checks.push_back(run_one(kChecks[7], [&](CheckBuilder& b) {
    const ChartPoint p0(0.0, 0.0, 1.0);
    std::vector<TangentVector> seeds = {TangentVector(p0, Vec3(0, 0, -1)), TangentVector(p0, Vec3(0, 0, 1)),
                                        TangentVector(p0, Vec3(1, 0, 0)),
                                        TangentVector(ChartPoint(1.0, -2.0, 3.0), Vec3(0.0, 0.3, -1.0))};
    const auto probe = completeness_probe(g, seeds, config.t_max, cfg, policy);
    const auto& down = probe[0].termination;
    const bool escaped = down.kind == Termination::Kind::boundary_escape;
    b.part("|t* - 1| for the downward geodesic (exit at z = 0)", escaped ? std::abs(down.t_exit - 1.0) : kInf,
           tol.escape_parameter);
    b.part("|t_event - (1 - z_floor)| (event at z = z_floor)",
           escaped ? std::abs(down.t - (1.0 - cfg.z_floor)) : kInf, kEventLocalization);
    b.require("upward geodesic completes to t_max", probe[1].termination.kind == Termination::Kind::completed &&
                                                        probe[1].termination.t == config.t_max);
    std::size_t escapes = 0;
    for (const auto& r : probe) escapes += r.termination.kind == Termination::Kind::boundary_escape;
    b.require("probe batch reports at least one boundary escape", escapes >= 1);
  }));

  // C9
  report.checks.push_back(run_one(kChecks[8], [&](CheckBuilder& b) {
    const MetricField gprime = quotient_conformal_metric(g);
    const auto dev = conformal_samples(g, gprime, points, directions, policy);
    std::vector<double> residuals(dev.size()), mu_errors(dev.size());
    for (std::size_t i = 0; i < dev.size(); ++i) {
      residuals[i] = dev[i].residual;
      mu_errors[i] = std::abs(dev[i].mu + 2.0 * directions[i][kZ] / points[i].z);
    }
    b.part("max conformal residual |nabla_V g' - mu g'|", max_of(residuals), tol.zero);
    b.part("max |mu(V) + 2 V_z / z|", max_of(mu_errors), tol.zero);
    b.part("max |df^T g'(f p) df - g'(p)|", max_of(invariance_residuals(*a, gprime, points, policy)), tol.homothety);
  }));

  // C10
  report.checks.push_back(run_one(kChecks[9], [&](CheckBuilder& b) {
    const auto r = leaf_first_check(g, cfg, 1e3);
    b.part("induced metric variation along the leaf", r.induced_metric_variation, tol.zero);
    b.require("geodesic along d/dx~ completes to t = 1e3 (" + r.note + ")",
              r.geodesic.kind == Termination::Kind::completed && r.geodesic.t == r.horizon);
    b.part("off-leaf drift of that geodesic", r.off_leaf_drift, tol.leaf_drift);
    b.part("|P d/dx~ - d/dx~| along the leaf", r.tangent_transport_defect, tol.zero);
  }));

  // C11
  report.checks.push_back(run_one(kChecks[10], [&](CheckBuilder& b) {
    std::vector<double> zs;
    for (int i = 0; i < 50; ++i) zs.push_back(0.2 * std::pow(50.0, i / 49.0));
    zs.push_back(1.0);
    zs.push_back(2.0);
    const auto r = leaf_second_check(g, zs, cfg, policy);
    b.part("max |K z^2 + 2| / 2", r.max_rel_defect, tol.relative);
    const bool escaped = r.escape.kind == Termination::Kind::boundary_escape;
    b.part("|t* - 1| in the leaf (exit at z = 0)", escaped ? std::abs(r.escape.t_exit - 1.0) : kInf,
           tol.escape_parameter);
    b.part("x~ drift of geodesics launched in the leaf", r.off_leaf_drift, tol.leaf_drift);
  }));

  // C12
  report.checks.push_back(run_one(kChecks[11], [&](CheckBuilder& b) {
    const std::vector<ChartPoint> subset(points.begin(), points.begin() + std::min<std::size_t>(points.size(), 100));
    const auto r = product_split_check(g, subset, policy);
    b.part("max |g_12|, |g_13|", r.off_block_max, tol.zero);
    b.part("variation of the x~ block", r.line_block_variation, tol.zero);
    b.part("dependence of the (y~, z) block on x~, y~", r.halfplane_block_dependence, tol.zero);
    b.part("max mixed Christoffel symbol", r.mixed_christoffel_max, tol.mixed_christoffel);
    b.part("max |K| of mixed planes", r.mixed_sectional_max, tol.zero);
  }));

  if (config.traces_dir) report.traces_emitted = emit_traces(config, *config.traces_dir);
  return report;
}

std::vector<std::string> emit_traces(const CheckConfig& config, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create trace directory " + dir + ": " + ec.message());

  const ToralMatrix a = validate_toral_matrix(config.matrix);
  const EigenBasis frame = eigen_basis(a);
  const MetricField g = warped_metric(config.metric_exponent);
  const auto& cfg = config.integrator;

  auto write = [](const fs::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace file " + path.string());
    write_trajectory_csv(out, traj);
    out.close();
    if (!out) throw std::runtime_error("failed writing trace file " + path.string());
    return path.string();
  };

  std::vector<std::string> written;
  const ChartPoint p0(0.0, 0.0, 1.0);
  written.push_back(write(fs::path(dir) / "escape_geodesic.csv",
                          integrate_geodesic(g, p0, TangentVector(p0, Vec3(0, 0, -1)), 2.0, cfg)));

  const CurveSpec lift({CoordinateLine{p0, kZ, frame.lambda - 1.0}});
  for (int i = 0; i < 3; ++i) {
    const auto name = "gz_transport_v" + std::to_string(i + 1) + ".csv";
    written.push_back(write(fs::path(dir) / name, transport_trace(g, lift, TangentVector(p0, Vec3::Unit(i)), cfg)));
  }
  return written;
}

}  // namespace mtorus
