#include "mtorus/checklist.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mtorus {

namespace {

using Json = nlohmann::ordered_json;

// JSON has no NaN or infinity; those are written as strings.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double read_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("report: expected a number");
}

Json tolerances_to_json(const Tolerances& t) {
  Json j;
  j["zero"] = t.zero;
  j["relative"] = t.relative;
  j["homothety"] = t.homothety;
  j["numeric_partials"] = t.numeric_partials;
  j["fd_order_band"] = t.fd_order_band;
  j["holonomy"] = t.holonomy;
  j["similarity_entry"] = t.similarity_entry;
  j["escape_parameter"] = t.escape_parameter;
  j["mixed_christoffel"] = t.mixed_christoffel;
  j["leaf_drift"] = t.leaf_drift;
  return j;
}

Tolerances tolerances_from_json(const Json& j) {
  Tolerances t;
  t.zero = j.at("zero").get<double>();
  t.relative = j.at("relative").get<double>();
  t.homothety = j.at("homothety").get<double>();
  t.numeric_partials = j.at("numeric_partials").get<double>();
  t.fd_order_band = j.at("fd_order_band").get<double>();
  t.holonomy = j.at("holonomy").get<double>();
  t.similarity_entry = j.at("similarity_entry").get<double>();
  t.escape_parameter = j.at("escape_parameter").get<double>();
  t.mixed_christoffel = j.at("mixed_christoffel").get<double>();
  t.leaf_drift = j.at("leaf_drift").get<double>();
  return t;
}

Json to_json(const VerificationReport& r) {
  Json j;
  j["schema_version"] = r.schema_version;

  Json cfg;
  cfg["matrix"] = r.config.matrix;
  cfg["samples"] = r.config.samples;
  cfg["seed"] = r.config.seed;
  cfg["t_max"] = r.config.t_max;
  cfg["metric_exponent"] = r.config.metric_exponent;
  cfg["rel_tol"] = r.config.rel_tol;
  cfg["abs_tol"] = r.config.abs_tol;
  cfg["z_floor"] = r.config.z_floor;
  cfg["tolerances"] = tolerances_to_json(r.config.tol);
  j["config"] = cfg;

  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json jc;
    jc["id"] = c.id;
    jc["description"] = c.description;
    jc["paper_claim"] = c.paper_claim;
    jc["status"] = c.passed ? "pass" : "fail";
    jc["residual"] = number(c.residual);
    jc["tolerance"] = number(c.tolerance);
    Json parts = Json::array();
    for (const auto& p : c.parts) {
      Json jp;
      jp["name"] = p.name;
      jp["residual"] = number(p.residual);
      jp["tolerance"] = number(p.tolerance);
      jp["status"] = p.passed ? "pass" : "fail";
      parts.push_back(jp);
    }
    jc["parts"] = parts;
    if (!c.diagnostic.empty()) jc["diagnostic"] = c.diagnostic;
    checks.push_back(jc);
  }
  j["checks"] = checks;
  j["traces_emitted"] = r.traces_emitted;
  j["all_passed"] = r.all_passed();
  return j;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

std::string emit_report(const VerificationReport& r, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(r).dump(2) + "\n";

  std::ostringstream out;
  for (const auto& c : r.checks) {
    out << c.id << ' ' << (c.passed ? "PASS" : "FAIL") << " residual=" << format_number(c.residual)
        << " tolerance=" << format_number(c.tolerance) << "  " << c.description;
    if (!c.diagnostic.empty()) out << "  [" << c.diagnostic << ']';
    out << '\n';
  }
  return out.str();
}

VerificationReport parse_report_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    VerificationReport r;
    r.schema_version = j.at("schema_version").get<int>();
    const auto& cfg = j.at("config");
    r.config.matrix = cfg.at("matrix").get<IntMatrix2>();
    r.config.samples = cfg.at("samples").get<std::size_t>();
    r.config.seed = cfg.at("seed").get<std::uint64_t>();
    r.config.t_max = cfg.at("t_max").get<double>();
    r.config.metric_exponent = cfg.at("metric_exponent").get<double>();
    r.config.rel_tol = cfg.at("rel_tol").get<double>();
    r.config.abs_tol = cfg.at("abs_tol").get<double>();
    r.config.z_floor = cfg.at("z_floor").get<double>();
    r.config.tol = tolerances_from_json(cfg.at("tolerances"));
    for (const auto& jc : j.at("checks")) {
      Check c;
      c.id = jc.at("id").get<std::string>();
      c.description = jc.at("description").get<std::string>();
      c.paper_claim = jc.at("paper_claim").get<std::string>();
      c.passed = jc.at("status").get<std::string>() == "pass";
      c.residual = read_number(jc.at("residual"));
      c.tolerance = read_number(jc.at("tolerance"));
      for (const auto& jp : jc.at("parts")) {
        c.parts.push_back({jp.at("name").get<std::string>(), read_number(jp.at("residual")),
                           read_number(jp.at("tolerance")), jp.at("status").get<std::string>() == "pass"});
      }
      if (jc.contains("diagnostic")) c.diagnostic = jc.at("diagnostic").get<std::string>();
      r.checks.push_back(std::move(c));
    }
    r.traces_emitted = j.at("traces_emitted").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace mtorus
