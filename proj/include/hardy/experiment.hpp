#pragma once

#include "hardy/estimators.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hardy {

enum class ExperimentKind {
  BoundaryConstant,
  FullDomain,
  Local,
  WeakCurve,
  CriticalAngle,
  Witness,
  Verify1D,
  Semibounded,
  ReferenceReport,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::BoundaryConstant;
  std::string domain_key = "interval";
  Domain domain;
  std::vector<double> deltas;
  std::vector<double> r_list;
  double h0 = 0.0;
  int levels = 1;
  Protocol protocol;

  // kind-specific
  Point point = Point::Zero();          // local, witness
  std::vector<double> radii;           // local
  std::vector<double> penalties;       // weak-curve
  std::vector<long> n_list;            // witness
  double witness_radius = 0.25;        // witness
  std::vector<double> betas;           // semibounded
  int spline_count = 0;                // verify-1d
  int spline_knots = 4;                // verify-1d
  CriticalAngleProtocol critical;      // critical-angle
  ConvexityClass domain_class = ConvexityClass::C11;  // reference-report

  std::string csv_path;
  std::string json_path;
  std::string svg_dir;
  bool timing = false;
  nlohmann::json source;
};

/// Parses and validates a config; throws ValidationError (or a more specific
/// error) before any run starts.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ReportRow {
  std::string experiment;
  std::string domain;
  double delta = 0.0;
  double r = 0.0;
  double h = 0.0;
  std::string level;  // integer level, "extrapolated", or a case label
  std::optional<double> lambda_min;
  std::optional<double> constant;
  std::optional<double> reference;
  std::string ref_citation;
  std::optional<double> residual;
  bool certified = false;
  double wall_ms = 0.0;
  std::string error;
};

struct Series {
  std::string name;
  std::vector<double> values;
  std::optional<double> reference;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<Series> series;
  nlohmann::json details = nlohmann::json::object();
  bool failed = false;
};

/// Runs every configured case; independent runs use HARDY_THREADS workers.
Report run_experiment(const ExperimentConfig& config);

void write_csv(const std::vector<ReportRow>& rows, std::ostream& out);
nlohmann::json report_json(const ExperimentConfig& config, const Report& report);
void write_svg(const Series& series, std::ostream& out);

/// Writes CSV, JSON and SVG files named by the config.
void emit_outputs(const ExperimentConfig& config, const Report& report);

/// Full pipeline; returns 0 on success, 1 on run failure, 2 on invalid config.
int run_config(const std::filesystem::path& path, std::ostream& log);
int validate_config(const std::filesystem::path& path, std::ostream& log);

int thread_count();

}  // namespace hardy
