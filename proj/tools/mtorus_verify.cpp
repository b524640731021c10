// mtorus-verify: runs the verification checklist for the mapping-torus
// connection and prints a report.
//
// Exit codes: 0 all checks pass, 1 some check fails, 2 configuration error.

#include "mtorus/checklist.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

// Keys mirror the long flag names; flags given on the command line win.
void apply_config_file(const std::string& path, mtorus::CheckConfig& cfg, const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw mtorus::ConfigError("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw mtorus::ConfigError("config file " + path + ": " + e.what());
  }
  auto unset = [&app](const char* flag) { return app.count(flag) == 0; };
  try {
    if (j.contains("matrix") && unset("--matrix")) {
      const auto& m = j["matrix"];
      if (m.is_string()) {
        cfg.matrix = mtorus::parse_matrix_entries(m.get<std::string>());
      } else {
        cfg.matrix = m.get<mtorus::IntMatrix2>();
      }
    }
    if (j.contains("samples") && unset("--samples")) cfg.samples = j["samples"].get<std::size_t>();
    if (j.contains("seed") && unset("--seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tol_abs") && unset("--tol-abs")) cfg.tol.zero = j["tol_abs"].get<double>();
    if (j.contains("tol_rel") && unset("--tol-rel")) cfg.tol.relative = j["tol_rel"].get<double>();
    if (j.contains("t_max") && unset("--t-max")) cfg.t_max = j["t_max"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw mtorus::ConfigError("config file " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verify the nonflat, reducible, locally metric connection on the mapping torus of a hyperbolic "
               "toral automorphism."};

  mtorus::CheckConfig cfg;
  std::string matrix = "2 1 1 1";
  std::string report = "text";
  std::string traces_dir;
  std::string config_file;
  bool serial = false;
  int threads = 0;

  app.add_option("--matrix", matrix, "Toral matrix as \"a11 a12 a21 a22\"")->capture_default_str();
  app.add_option("--config", config_file, "JSON config file (keys: matrix, samples, seed, tol_abs, tol_rel, t_max)")
      ->check(CLI::ExistingFile);
  app.add_option("--samples", cfg.samples, "Random sample points per check")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--tol-abs", cfg.tol.zero, "Tolerance for quantities that must vanish")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--tol-rel", cfg.tol.relative, "Relative tolerance for derived constants")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Sampling seed")->capture_default_str();
  app.add_option("--report", report, "Report format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  app.add_option("--emit-traces", traces_dir, "Write CSV traces into this directory");
  app.add_option("--t-max", cfg.t_max, "Horizon for the upward (surviving) geodesic")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--metric-exponent", cfg.metric_exponent, "Warping exponent of g (test hook; 4 is the model)")
      ->capture_default_str()
      ->group("Testing");
  app.add_flag("--serial", serial, "Use the serial reference kernels");
  app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_file.empty()) apply_config_file(config_file, cfg, app);
    if (app.count("--matrix") || config_file.empty()) cfg.matrix = mtorus::parse_matrix_entries(matrix);
  } catch (const mtorus::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (!traces_dir.empty()) cfg.traces_dir = traces_dir;
  cfg.policy = serial ? mtorus::Exec::serial : mtorus::Exec::parallel;
  if (threads > 0) omp_set_num_threads(threads);

  mtorus::VerificationReport result;
  try {
    result = mtorus::run_checklist(cfg);
  } catch (const std::runtime_error& e) {
    // Trace emission is the only thing that can escape the checklist.
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  std::cout << mtorus::emit_report(result, report == "json" ? mtorus::ReportFormat::json : mtorus::ReportFormat::text);
  return result.all_passed() ? 0 : 1;
}
