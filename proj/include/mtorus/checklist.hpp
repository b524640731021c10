#pragma once

// The twelve-item verification checklist for the mapping-torus connection and
// its report formats.

#include "mtorus/parallel.hpp"
#include "mtorus/quotient.hpp"
#include "mtorus/transport.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mtorus {

inline constexpr int kReportSchemaVersion = 1;

struct Tolerances {
  double zero = 1e-8;               // "exactly zero" claims
  double relative = 1e-6;           // derived nonzero constants
  double homothety = 1e-10;         // f*g = lambda^2 g and f*g' = g'
  double numeric_partials = 1e-5;   // nabla g on the finite-difference path
  double fd_order_band = 0.3;       // |observed order - 2|
  double holonomy = 1e-7;           // invariant line, unit scale, orthogonality
  double similarity_entry = 1e-6;   // [gz] holonomy against I / lambda
  double escape_parameter = 1e-6;   // |t* - 1|
  double mixed_christoffel = 1e-10;
  double leaf_drift = 1e-7;

  bool operator==(const Tolerances&) const = default;
};

struct CheckConfig {
  IntMatrix2 matrix{2, 1, 1, 1};
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  Tolerances tol;
  double t_max = 100.0;         // survival horizon for the upward geodesic
  double metric_exponent = 4.0; // mutation hook: anything but 4 breaks the homothety
  IntegratorConfig integrator;
  Exec policy = Exec::parallel;
  std::optional<std::string> traces_dir;
};

struct CheckPart {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;

  bool operator==(const CheckPart&) const = default;
};

/// One checklist item. `residual` is the worst part's residual/tolerance
/// ratio and `tolerance` is 1, so passed == (residual <= tolerance) for every
/// item; the raw values are kept in `parts`.
struct Check {
  std::string id;
  std::string description;
  std::string paper_claim;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 1.0;
  std::vector<CheckPart> parts;
  std::string diagnostic;  // set when the check could not run

  bool operator==(const Check&) const = default;
};

struct ConfigEcho {
  IntMatrix2 matrix{};
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double t_max = 0.0;
  double metric_exponent = 0.0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  double z_floor = 0.0;
  Tolerances tol;

  bool operator==(const ConfigEcho&) const = default;
};

struct VerificationReport {
  int schema_version = kReportSchemaVersion;
  ConfigEcho config;
  std::vector<Check> checks;
  std::vector<std::string> traces_emitted;

  bool all_passed() const;
  bool operator==(const VerificationReport&) const = default;
};

/// Runs C1..C12 in order. Module errors become failed checks with a diagnostic.
VerificationReport run_checklist(const CheckConfig& config);

enum class ReportFormat { json, text };

std::string emit_report(const VerificationReport& r, ReportFormat format);

/// Inverse of emit_report(r, ReportFormat::json). Throws ConfigError on malformed input.
VerificationReport parse_report_json(const std::string& text);

/// Writes escape_geodesic.csv and gz_transport_v{1,2,3}.csv into dir and
/// returns their paths. Throws std::runtime_error naming the path on I/O failure.
std::vector<std::string> emit_traces(const CheckConfig& config, const std::string& dir);

}  // namespace mtorus
