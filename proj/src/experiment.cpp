#include "hardy/experiment.hpp"

#include "hardy/error.hpp"
#include "hardy/reference.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace hardy {

using nlohmann::json;

namespace {

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::BoundaryConstant, "boundary-constant"},
    {ExperimentKind::FullDomain, "full-domain"},
    {ExperimentKind::Local, "local"},
    {ExperimentKind::WeakCurve, "weak-curve"},
    {ExperimentKind::CriticalAngle, "critical-angle"},
    {ExperimentKind::Witness, "witness"},
    {ExperimentKind::Verify1D, "verify-1d"},
    {ExperimentKind::Semibounded, "semibounded"},
    {ExperimentKind::ReferenceReport, "reference-report"},
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_opt(const std::optional<double>& x) { return x ? fmt(*x) : "none"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

Domain resolve_domain(const json& j, std::string& key) {
  const json& d = j.at("domain");
  if (d.is_string()) {
    key = d.get<std::string>();
    return domain_from_key(key);
  }
  key = d.at("key").get<std::string>();
  if (key == "wedge-complement") {
    const double alpha = d.at("alpha").get<double>();
    Domain w = make_wedge_complement(alpha);
    key = w.key;
    return w;
  }
  if (key == "interval" && d.contains("lo")) return make_interval(d.at("lo").get<double>(), d.at("hi").get<double>());
  if (key == "disk" && d.contains("radius")) {
    const auto c = get_or<std::vector<double>>(d, "center", {0.0, 0.0});
    if (c.size() != 2) throw ValidationError("disk center needs two coordinates");
    return make_disk(Point(c[0], c[1]), d.at("radius").get<double>());
  }
  if ((key == "convex-polygon" || key == "polygon-complement") && d.contains("vertices")) {
    std::vector<Point> v;
    for (const auto& p : d.at("vertices")) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return key == "convex-polygon" ? make_convex_polygon(v) : make_polygon_complement(v);
  }
  return domain_from_key(key);
}

std::uint64_t spline_seed(std::uint64_t seed, double delta, double r) {
  const auto a = std::bit_cast<std::uint64_t>(delta);
  const auto b = std::bit_cast<std::uint64_t>(r);
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(a), std::uint32_t(a >> 32),
                    std::uint32_t(b), std::uint32_t(b >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[0]) << 32) | words[1];
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void check_delta(ExperimentKind kind, double delta) {
  require(std::isfinite(delta) && delta >= 0, "delta must be a finite number >= 0");
  const bool constant_kind = kind == ExperimentKind::BoundaryConstant ||
                             kind == ExperimentKind::FullDomain || kind == ExperimentKind::Local ||
                             kind == ExperimentKind::WeakCurve;
  if (constant_kind && delta == 1.0) {
    throw ExceptionalValueError("delta = 1 is exceptional: the boundary constant is infinite");
  }
}

bool needs_box(const Domain& d) {
  return d.kind == DomainKind::PolygonComplement || d.kind == DomainKind::WedgeComplement ||
         d.kind == DomainKind::HalfPlane;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  throw ValidationError("unknown experiment kind: " + name);
}

int thread_count() {
  const char* env = std::getenv("HARDY_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) return 1;
  return int(std::min<long>(n, 256));
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  c.source = j;
  try {
    require(j.is_object(), "config must be a JSON object");
    c.kind = experiment_from_string(j.at("experiment").get<std::string>());
    c.domain = c.kind == ExperimentKind::CriticalAngle && !j.contains("domain")
                   ? make_wedge_complement(std::numbers::pi / 2)
                   : resolve_domain(j, c.domain_key);
    if (c.domain_key.empty()) c.domain_key = c.domain.key;
    c.deltas = number_list(j, "delta");
    c.r_list = number_list(j, "r");
    c.h0 = get_or<double>(j, "h0", 0.0);
    c.levels = get_or<int>(j, "levels", 1);
    c.protocol.tol = get_or<double>(j, "tol", c.protocol.tol);
    c.protocol.seed = get_or<std::uint64_t>(j, "seed", c.protocol.seed);
    if (j.contains("mesh")) {
      const json& m = j.at("mesh");
      c.protocol.mesh.grading = get_or<double>(m, "grading", c.protocol.mesh.grading);
      c.protocol.mesh.depth = get_or<double>(m, "depth", c.protocol.mesh.depth);
      c.protocol.mesh.tangential_h = get_or<double>(m, "tangential_h", c.protocol.mesh.tangential_h);
      c.protocol.mesh.angular_depth = get_or<double>(m, "angular_depth", c.protocol.mesh.angular_depth);
    }
    if (j.contains("box")) {
      const auto b = j.at("box").get<std::vector<double>>();
      require(b.size() == 4 && b[0] < b[1] && b[2] < b[3], "box must be [xmin, xmax, ymin, ymax]");
      c.protocol.mesh.box = Box{b[0], b[1], b[2], b[3]};
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      const std::string inner = get_or<std::string>(s, "inner", "direct");
      require(inner == "direct" || inner == "cg", "solver.inner must be direct or cg");
      c.protocol.eigen.inner = inner == "cg" ? InnerSolver::ConjugateGradient : InnerSolver::Direct;
      c.protocol.eigen.max_iterations = get_or<int>(s, "max_iterations", c.protocol.eigen.max_iterations);
      c.protocol.eigen.block_size = get_or<int>(s, "block_size", c.protocol.eigen.block_size);
    }
    if (j.contains("point")) {
      const auto p = j.at("point").get<std::vector<double>>();
      require(p.size() == 2 || p.size() == 1, "point needs one or two coordinates");
      c.point = Point(p[0], p.size() == 2 ? p[1] : 0.0);
    }
    c.radii = number_list(j, "radii");
    c.penalties = number_list(j, "c");
    if (j.contains("n")) {
      const json& n = j.at("n");
      if (n.is_number()) c.n_list = {n.get<long>()};
      else c.n_list = n.get<std::vector<long>>();
    }
    c.witness_radius = get_or<double>(j, "witness_radius", c.witness_radius);
    c.betas = number_list(j, "beta");
    c.spline_count = get_or<int>(j, "splines", 0);
    c.spline_knots = get_or<int>(j, "knots", 4);
    if (j.contains("critical")) {
      const json& k = j.at("critical");
      c.critical.lo = get_or<double>(k, "lo", 0.0);
      c.critical.hi = get_or<double>(k, "hi", 0.0);
      c.critical.tol_angle = get_or<double>(k, "tol_angle", c.critical.tol_angle);
      c.critical.margin = get_or<double>(k, "margin", c.critical.margin);
      c.critical.radius = get_or<double>(k, "radius", c.critical.radius);
      c.critical.h = get_or<double>(k, "h", c.critical.h);
      c.critical.levels = get_or<int>(k, "levels", c.critical.levels);
    }
    c.critical.numerics = c.protocol;
    if (j.contains("domain_class")) c.domain_class = convexity_from_string(j.at("domain_class").get<std::string>());
    if (j.contains("output")) {
      const json& o = j.at("output");
      c.csv_path = get_or<std::string>(o, "csv", "");
      c.json_path = get_or<std::string>(o, "json", "");
      c.svg_dir = get_or<std::string>(o, "svg_dir", "");
    }
    c.timing = get_or<bool>(j, "timing", false);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }

  require(c.protocol.tol > 0 && c.protocol.tol < 1, "tol must lie in (0, 1)");
  require(c.levels >= 1 && c.levels <= 12, "levels must lie in [1, 12]");
  require(c.protocol.mesh.depth > 0, "mesh.depth must be positive");
  require(c.protocol.mesh.tangential_h >= 0, "mesh.tangential_h must be >= 0");
  require(c.protocol.eigen.max_iterations >= 1 && c.protocol.eigen.block_size >= 1,
          "solver settings must be positive");
  for (double d : c.deltas) check_delta(c.kind, d);

  switch (c.kind) {
    case ExperimentKind::BoundaryConstant:
    case ExperimentKind::FullDomain:
    case ExperimentKind::Local:
    case ExperimentKind::WeakCurve:
      require(!c.deltas.empty(), "delta list is empty");
      require(c.domain.meshable(), "domain " + c.domain_key + " cannot be meshed");
      require(c.h0 > 0, "h0 must be positive");
      break;
    default:
      break;
  }
  switch (c.kind) {
    case ExperimentKind::BoundaryConstant:
      require(!c.r_list.empty(), "r list is empty");
      for (double r : c.r_list) {
        require(r > 0, "r must be positive");
        if (c.h0 >= r / 4) throw ResolutionError("h0 must be below r/4 for every layer depth");
      }
      if (needs_box(c.domain)) require(c.protocol.mesh.box.has_value(), "unbounded domains need a box");
      break;
    case ExperimentKind::FullDomain:
    case ExperimentKind::WeakCurve:
      require(c.domain.bounded(), "whole-domain runs need a bounded domain");
      if (c.kind == ExperimentKind::WeakCurve) {
        require(!c.penalties.empty(), "penalty list c is empty");
        for (std::size_t i = 0; i < c.penalties.size(); ++i) {
          require(c.penalties[i] >= 0, "penalties must be >= 0");
          if (i > 0) require(c.penalties[i] > c.penalties[i - 1], "penalties must increase");
        }
      }
      break;
    case ExperimentKind::Local:
      require(c.r_list.size() == 1 && c.r_list[0] > 0, "local runs need one positive r");
      require(!c.radii.empty(), "radii list is empty");
      for (std::size_t i = 0; i < c.radii.size(); ++i) {
        require(c.radii[i] > 0, "radii must be positive");
        if (i > 0) require(c.radii[i] < c.radii[i - 1], "radii must decrease");
      }
      if (std::abs(signed_distance(c.domain, c.point)) > 1e-12) {
        throw DomainMembershipError("local point must lie on the boundary");
      }
      if (needs_box(c.domain) && !(c.domain.kind == DomainKind::WedgeComplement && c.point.norm() <= 1e-14)) {
        require(c.protocol.mesh.box.has_value(), "unbounded domains need a box");
      }
      break;
    case ExperimentKind::CriticalAngle:
      require(c.critical.tol_angle > 0 && c.critical.radius > 0 && c.critical.h > 0,
              "critical-angle settings must be positive");
      require(c.critical.levels >= 1, "critical.levels must be >= 1");
      break;
    case ExperimentKind::Witness:
      require(!c.deltas.empty(), "delta list is empty");
      require(c.r_list.size() == 1 && c.r_list[0] > 0, "witness runs need one positive r");
      require(!c.n_list.empty(), "n list is empty");
      for (long n : c.n_list) require(n >= 2, "n must be >= 2");
      require(c.witness_radius > 0, "witness_radius must be positive");
      if (std::abs(signed_distance(c.domain, c.point)) > 1e-12) {
        throw DomainMembershipError("witness patch center must lie on the boundary");
      }
      break;
    case ExperimentKind::Verify1D:
      require(!c.deltas.empty() && !c.r_list.empty(), "verify-1d needs delta and r lists");
      for (double r : c.r_list) require(r > 0, "r must be positive");
      require(c.spline_count >= 1, "splines must be >= 1");
      require(c.spline_knots >= 1, "knots must be >= 1");
      break;
    case ExperimentKind::Semibounded:
      require(c.domain.kind == DomainKind::Interval, "semibounded scans run on an interval");
      require(c.deltas.size() == 1, "semibounded scans take one delta");
      require(c.deltas[0] < 2 && c.deltas[0] != 1.0, "semibounded scans need delta in [0, 2), delta != 1");
      require(!c.betas.empty(), "beta list is empty");
      require(c.levels >= 2, "semibounded scans need at least two levels");
      require(c.h0 > 0, "h0 must be positive");
      break;
    case ExperimentKind::ReferenceReport:
      require(!c.deltas.empty(), "delta list is empty");
      for (double d : c.deltas) {
        if (d == 1.0) throw ExceptionalValueError("delta = 1 is exceptional");
      }
      require(c.domain_class != ConvexityClass::Other, "domain_class must be c11, convex or convex-complement");
      break;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

namespace {

struct RunOutput {
  std::vector<ReportRow> rows;
  std::vector<Series> series;
  json details = json::object();
  bool failed = false;
};

using Task = std::function<RunOutput()>;

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct Context {
  const ExperimentConfig& cfg;
  std::string experiment;

  ReportRow row(double delta) const {
    ReportRow r;
    r.experiment = experiment;
    r.domain = cfg.domain_key;
    r.delta = delta;
    if (auto ref = catalogue_reference(experiment, cfg.domain, delta)) {
      r.reference = ref->value;
      r.ref_citation = ref->provenance;
    }
    return r;
  }

  ReportRow estimate_row(const HardyEstimate& e, double ms) const {
    ReportRow r = row(e.delta);
    r.r = e.r;
    r.h = e.h;
    r.level = std::to_string(e.level);
    r.lambda_min = e.lambda_min;
    r.constant = e.constant;
    r.residual = e.residual;
    r.certified = e.certified_lower_bound;
    r.wall_ms = cfg.timing ? ms : 0.0;
    return r;
  }

  ReportRow error_row(double delta, const std::exception& e) const {
    ReportRow r = row(delta);
    r.level = "error";
    r.error = e.what();
    return r;
  }
};

std::string series_name(const Context& ctx, double delta, const std::string& extra) {
  std::ostringstream s;
  s << ctx.experiment << "_" << ctx.cfg.domain_key << "_delta" << fmt(delta) << extra;
  std::string out = s.str();
  for (char& ch : out) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
  }
  return out;
}

json extrapolation_json(const Extrapolation& x) {
  json j;
  j["monotone"] = x.monotone;
  j["value"] = x.value ? json(*x.value) : json(nullptr);
  j["exponent"] = x.exponent;
  return j;
}

RunOutput sweep_output(const Context& ctx, const SweepResult& s, double delta, double r,
                       const std::vector<double>& ms) {
  RunOutput out;
  Series series;
  series.name = series_name(ctx, delta, r > 0 ? "_r" + fmt(r) : "");
  double worst_residual = 0.0;
  for (std::size_t i = 0; i < s.estimates.size(); ++i) {
    out.rows.push_back(ctx.estimate_row(s.estimates[i], ms[i]));
    series.values.push_back(s.estimates[i].constant);
    worst_residual = std::max(worst_residual, s.estimates[i].residual);
  }
  if (s.extrapolation.value) {
    ReportRow x = ctx.row(delta);
    x.r = r;
    x.h = 0.0;
    x.level = "extrapolated";
    x.constant = *s.extrapolation.value;
    x.lambda_min = 1.0 / (*x.constant * *x.constant);
    x.residual = worst_residual;
    x.certified = false;
    out.rows.push_back(x);
  }
  series.reference = out.rows.front().reference;
  out.series.push_back(series);
  json d;
  d["delta"] = delta;
  d["r"] = r;
  d["extrapolation"] = extrapolation_json(s.extrapolation);
  out.details["sweeps"].push_back(d);
  return out;
}

// Sweep with per-level timing.
std::pair<SweepResult, std::vector<double>> timed_sweep(const Mesh& base, const Domain& domain,
                                                        double delta, int levels,
                                                        const Protocol& protocol) {
  SweepResult s;
  std::vector<double> ms;
  std::vector<double> constants;
  Mesh mesh = base;
  for (int k = 0; k < levels; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    if (k > 0) mesh = refine(mesh);
    s.estimates.push_back(estimate_on_mesh(mesh, domain, delta, protocol));
    ms.push_back(elapsed_ms(t0));
    constants.push_back(s.estimates.back().constant);
  }
  s.extrapolation = extrapolate(constants);
  return {s, ms};
}

RunOutput guarded(const Context& ctx, double delta, const std::function<RunOutput()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    RunOutput out;
    out.rows.push_back(ctx.error_row(delta, e));
    out.details["errors"].push_back({{"delta", delta}, {"message", e.what()}});
    out.failed = true;
    return out;
  }
}

std::vector<Task> plan_tasks(const ExperimentConfig& cfg, const Context& ctx) {
  std::vector<Task> tasks;
  const Protocol& P = cfg.protocol;
  switch (cfg.kind) {
    case ExperimentKind::BoundaryConstant:
      for (double delta : cfg.deltas) {
        for (double r : cfg.r_list) {
          tasks.push_back([&, delta, r] {
            return guarded(ctx, delta, [&] {
              const Mesh base = build_layer_mesh(cfg.domain, r, cfg.h0, P.mesh);
              auto [s, ms] = timed_sweep(base, cfg.domain, delta, cfg.levels, P);
              return sweep_output(ctx, s, delta, r, ms);
            });
          });
        }
      }
      break;
    case ExperimentKind::FullDomain:
      for (double delta : cfg.deltas) {
        tasks.push_back([&, delta] {
          return guarded(ctx, delta, [&] {
            const Mesh base = build_domain_mesh(cfg.domain, cfg.h0, P.mesh);
            auto [s, ms] = timed_sweep(base, cfg.domain, delta, cfg.levels, P);
            return sweep_output(ctx, s, delta, 0.0, ms);
          });
        });
      }
      break;
    case ExperimentKind::Local:
      for (double delta : cfg.deltas) {
        tasks.push_back([&, delta] {
          return guarded(ctx, delta, [&] {
            RunOutput out;
            const auto t0 = std::chrono::steady_clock::now();
            const auto est = local_constant(cfg.domain, cfg.point, delta, cfg.radii, cfg.r_list[0],
                                            cfg.h0, P, cfg.levels);
            const double ms = elapsed_ms(t0) / double(est.size());
            Series series;
            series.name = series_name(ctx, delta, "");
            for (std::size_t i = 0; i < est.size(); ++i) {
              ReportRow row = ctx.estimate_row(est[i], ms);
              row.r = cfg.radii[i];
              out.rows.push_back(row);
              series.values.push_back(est[i].constant);
            }
            series.reference = out.rows.front().reference;
            out.series.push_back(series);
            return out;
          });
        });
      }
      break;
    case ExperimentKind::WeakCurve:
      for (double delta : cfg.deltas) {
        tasks.push_back([&, delta] {
          return guarded(ctx, delta, [&] {
            RunOutput out;
            const auto t0 = std::chrono::steady_clock::now();
            const auto curve = weak_constant_curve(cfg.domain, delta, cfg.penalties, cfg.h0, P, cfg.levels);
            const double ms = elapsed_ms(t0) / double(curve.size());
            Series series;
            series.name = series_name(ctx, delta, "");
            for (const auto& pt : curve) {
              ReportRow row = ctx.row(delta);
              row.r = pt.c;
              row.h = cfg.h0 / std::pow(2.0, cfg.levels - 1);
              row.level = std::to_string(cfg.levels - 1);
              row.lambda_min = pt.lambda_min;
              row.constant = pt.b_of_c;
              row.residual = pt.residual;
              row.certified = true;
              row.wall_ms = cfg.timing ? ms : 0.0;
              out.rows.push_back(row);
              series.values.push_back(pt.b_of_c);
            }
            for (std::size_t i = 1; i < curve.size(); ++i) {
              if (curve[i].b_of_c > curve[i - 1].b_of_c * (1 + 1e-9)) {
                out.failed = true;
                out.details["errors"].push_back({{"delta", delta}, {"message", "b(c) increased with c"}});
              }
            }
            series.reference = out.rows.front().reference;
            out.series.push_back(series);
            return out;
          });
        });
      }
      break;
    case ExperimentKind::CriticalAngle:
      tasks.push_back([&] {
        return guarded(ctx, 0.0, [&] {
          RunOutput out;
          const auto result = critical_angle(cfg.critical);
          Series series;
          series.name = series_name(ctx, 0.0, "_trace");
          json trace = json::array();
          for (const auto& step : result.trace) {
            ReportRow row = ctx.row(0.0);
            row.r = step.alpha;
            row.h = cfg.critical.h;
            row.level = std::to_string(cfg.critical.levels - 1);
            row.constant = step.constant;
            row.lambda_min = 1.0 / (step.constant * step.constant);
            row.certified = true;
            out.rows.push_back(row);
            series.values.push_back(step.constant);
            trace.push_back({{"lo", step.lo}, {"hi", step.hi}, {"alpha", step.alpha},
                             {"anomalous", step.anomalous}, {"constant", step.constant}});
          }
          series.reference = 2.0;
          out.series.push_back(series);
          out.details["trace"] = trace;
          out.details["angle"] = result.angle;
          out.details["alpha_c"] = critical_angles().alpha_c;
          return out;
        });
      });
      break;
    case ExperimentKind::Witness:
      for (double delta : cfg.deltas) {
        tasks.push_back([&, delta] {
          return guarded(ctx, delta, [&] {
            RunOutput out;
            const WitnessPatch patch = make_witness_patch(cfg.domain, cfg.point, cfg.witness_radius);
            Series series;
            series.name = series_name(ctx, delta, "");
            for (long n : cfg.n_list) {
              const auto t0 = std::chrono::steady_clock::now();
              const WitnessIntegrals w = witness_integrals(cfg.domain, patch, delta, cfg.r_list[0], n);
              ReportRow row = ctx.row(delta);
              row.r = cfg.r_list[0];
              row.level = std::to_string(n);
              row.constant = w.ratio;
              row.lambda_min = 1.0 / (w.ratio * w.ratio);
              row.certified = true;
              row.wall_ms = cfg.timing ? elapsed_ms(t0) : 0.0;
              out.rows.push_back(row);
              series.values.push_back(w.ratio);
            }
            series.reference = out.rows.front().reference;
            out.series.push_back(series);
            return out;
          });
        });
      }
      break;
    case ExperimentKind::Verify1D:
      for (double delta : cfg.deltas) {
        for (double r : cfg.r_list) {
          tasks.push_back([&, delta, r] {
            return guarded(ctx, delta, [&] {
              RunOutput out;
              std::mt19937_64 rng(spline_seed(cfg.protocol.seed, delta, r));
              std::uniform_real_distribution<double> unit(0.0, 1.0);
              std::normal_distribution<double> normal(0.0, 1.0);
              double worst = std::numeric_limits<double>::infinity();
              for (int s = 0; s < cfg.spline_count; ++s) {
                HermiteSpline f;
                std::vector<double> interior;
                for (int k = 0; k < cfg.spline_knots - 1; ++k) interior.push_back(r * (0.05 + 0.9 * unit(rng)));
                std::sort(interior.begin(), interior.end());
                f.knots.push_back(0.0);
                for (double t : interior) {
                  if (t > f.knots.back() + 1e-6 * r) f.knots.push_back(t);
                }
                f.knots.push_back(r);
                for (std::size_t k = 0; k < f.knots.size(); ++k) {
                  f.values.push_back(k == 0 ? 0.0 : normal(rng));
                  f.slopes.push_back(normal(rng));
                }
                const InequalityCheck chk = verify_1d_inequality(f, delta, r);
                const double rel = chk.slack / std::max(chk.scale, 1e-300);
                worst = std::min(worst, rel);
                ReportRow row = ctx.row(delta);
                row.r = r;
                row.level = "spline-" + std::to_string(s);
                row.residual = rel;
                row.certified = chk.slack >= -1e-9 * chk.scale;
                if (!row.certified) out.failed = true;
                out.rows.push_back(row);
              }
              out.details["worst_relative_slack"].push_back({{"delta", delta}, {"r", r}, {"value", worst}});
              return out;
            });
          });
        }
      }
      break;
    case ExperimentKind::Semibounded:
      tasks.push_back([&] {
        const double delta = cfg.deltas[0];
        return guarded(ctx, delta, [&] {
          RunOutput out;
          const SemiboundedScan scan = semibounded_scan(cfg.domain, delta, cfg.betas, cfg.levels, cfg.h0, P);
          json rows = json::array();
          for (const auto& sr : scan.rows) {
            for (std::size_t k = 0; k < sr.lambdas.size(); ++k) {
              ReportRow row = ctx.row(delta);
              row.r = sr.beta;
              row.h = cfg.h0 / std::pow(2.0, double(k));
              row.level = std::to_string(k);
              row.lambda_min = sr.lambdas[k];
              if (sr.lambdas[k] > 0) row.constant = 1.0 / std::sqrt(sr.lambdas[k]);
              row.certified = true;
              out.rows.push_back(row);
            }
            rows.push_back({{"beta", sr.beta}, {"lambdas", sr.lambdas}, {"verdict", to_string(sr.verdict)}});
          }
          out.details["scale"] = scan.scale;
          out.details["scan"] = rows;
          return out;
        });
      });
      break;
    case ExperimentKind::ReferenceReport:
      tasks.push_back([&] {
        RunOutput out;
        json thresholds = json::array();
        for (double delta : cfg.deltas) {
          for (const char* exp : {"boundary-constant", "full-domain", "witness", "semibounded"}) {
            if (auto ref = catalogue_reference(exp, cfg.domain, delta)) {
              ReportRow row;
              row.experiment = "reference-report";
              row.domain = cfg.domain_key;
              row.delta = delta;
              row.level = exp;
              row.reference = ref->value;
              row.ref_citation = ref->provenance;
              out.rows.push_back(row);
            }
          }
          const ThresholdReport t = threshold_report(cfg.domain_class, delta);
          json tj{{"delta", delta},
                  {"domain_class", to_string(t.domain_class)},
                  {"self_adjoint_sufficient", t.self_adjoint_sufficient},
                  {"necessary_met", t.necessary_met}};
          tj["beta_star"] = t.beta_star ? json(*t.beta_star) : json(nullptr);
          thresholds.push_back(tj);
        }
        out.details["thresholds"] = thresholds;
        const CriticalAngles ta = critical_angles();
        out.details["critical_angles"] = {{"beta_c", ta.beta_c}, {"alpha_c", ta.alpha_c},
                                          {"cos_alpha_c", std::cos(ta.alpha_c)}};
        const KochComparison k = koch_comparison();
        out.details["koch"] = {{"hausdorff_dim", k.hausdorff_dim},
                               {"formula_value", k.formula_value},
                               {"stated_value", k.stated_value}};
        json simplex = json::array();
        for (const auto& s : simplex_comparison(10)) {
          simplex.push_back({{"d", s.d}, {"dihedral", s.dihedral}, {"alpha_c", s.alpha_c},
                             {"below_critical", s.below_critical},
                             {"anomalous_as_stated", s.anomalous_as_stated}});
        }
        out.details["simplex"] = simplex;
        return out;
      });
      break;
  }
  return tasks;
}

void merge_details(json& into, const json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) {
    if (it->is_array() && into.contains(it.key()) && into[it.key()].is_array()) {
      for (const auto& v : *it) into[it.key()].push_back(v);
    } else {
      into[it.key()] = *it;
    }
  }
}

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
  Context ctx{config, to_string(config.kind)};
  const std::vector<Task> tasks = plan_tasks(config, ctx);
  std::vector<RunOutput> results(tasks.size());
  const int workers = std::min<int>(thread_count(), int(tasks.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = tasks[i]();
      });
    }
    for (auto& t : pool) t.join();
  }
  Report report;
  for (auto& r : results) {
    report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
    report.series.insert(report.series.end(), r.series.begin(), r.series.end());
    merge_details(report.details, r.details);
    report.failed = report.failed || r.failed;
  }
  return report;
}

void write_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "experiment,domain,delta,r,h,level,lambda_min,constant,reference,ref_citation,residual,certified,wall_ms\n";
  for (const auto& r : rows) {
    out << csv_field(r.experiment) << ',' << csv_field(r.domain) << ',' << fmt(r.delta) << ','
        << fmt(r.r) << ',' << fmt(r.h) << ',' << csv_field(r.level) << ',' << fmt_opt(r.lambda_min)
        << ',' << fmt_opt(r.constant) << ',' << fmt_opt(r.reference) << ','
        << csv_field(r.reference ? r.ref_citation : (r.error.empty() ? "none" : "error: " + r.error))
        << ',' << fmt_opt(r.residual) << ',' << (r.certified ? "true" : "false") << ','
        << fmt(r.wall_ms) << '\n';
  }
}

json report_json(const ExperimentConfig& config, const Report& report) {
  json j;
  j["experiment"] = to_string(config.kind);
  j["domain"] = config.domain_key;
  j["config"] = config.source;
  j["failed"] = report.failed;
  json rows = json::array();
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  for (const auto& r : report.rows) {
    json row{{"experiment", r.experiment}, {"domain", r.domain}, {"delta", r.delta}, {"r", r.r},
             {"h", r.h}, {"level", r.level}, {"certified", r.certified}, {"wall_ms", r.wall_ms}};
    row["lambda_min"] = opt(r.lambda_min);
    row["constant"] = opt(r.constant);
    row["reference"] = opt(r.reference);
    row["ref_citation"] = r.reference ? r.ref_citation : "none";
    row["residual"] = opt(r.residual);
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  j["rows"] = rows;
  for (auto it = report.details.begin(); it != report.details.end(); ++it) j[it.key()] = *it;
  return j;
}

void write_svg(const Series& series, std::ostream& out) {
  constexpr double W = 800, H = 600, left = 90, right = 30, top = 40, bottom = 70;
  std::vector<double> all = series.values;
  if (series.reference) all.push_back(*series.reference);
  double lo = all.empty() ? 0.0 : *std::min_element(all.begin(), all.end());
  double hi = all.empty() ? 1.0 : *std::max_element(all.begin(), all.end());
  if (!(hi > lo)) {
    lo -= 0.5 * std::max(1.0, std::abs(lo));
    hi += 0.5 * std::max(1.0, std::abs(hi));
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const int n = std::max<int>(1, int(series.values.size()) - 1);
  auto X = [&](double i) { return left + (W - left - right) * i / n; };
  auto Y = [&](double v) { return top + (H - top - bottom) * (hi - v) / (hi - lo); };
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << series.name << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n"
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                left, H - bottom, W - right, H - bottom, left, top, left, H - bottom);
  out << buf;
  for (int i = 0; i <= n; ++i) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">%d</text>\n",
                  X(i), H - bottom, X(i), H - bottom + 6, X(i), H - bottom + 22, i);
    out << buf;
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = lo + (hi - lo) * i / 5;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">%.5g</text>\n",
                  left - 6, Y(v), left, Y(v), left - 10, Y(v) + 4, v);
    out << buf;
  }
  out << "<text x=\"400\" y=\"585\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">level</text>\n";
  out << "<text x=\"20\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
         "transform=\"rotate(-90 20 300)\">constant</text>\n";
  if (series.reference) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"red\" stroke-dasharray=\"6 4\"/>\n",
                  left, Y(*series.reference), W - right, Y(*series.reference));
    out << buf;
  }
  out << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", X(double(i)), Y(series.values[i]));
    out << buf;
  }
  out << "\"/>\n</svg>\n";
}

void emit_outputs(const ExperimentConfig& config, const Report& report) {
  if (report.rows.empty()) throw ValidationError("report has no rows");
  auto open = [](const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    return out;
  };
  if (!config.csv_path.empty()) {
    auto out = open(config.csv_path);
    write_csv(report.rows, out);
    if (!out) throw Error("cannot write " + config.csv_path);
  }
  if (!config.json_path.empty()) {
    auto out = open(config.json_path);
    out << report_json(config, report).dump(2) << '\n';
    if (!out) throw Error("cannot write " + config.json_path);
  }
  if (!config.svg_dir.empty()) {
    for (const auto& s : report.series) {
      auto out = open(std::filesystem::path(config.svg_dir) / (s.name + ".svg"));
      write_svg(s, out);
    }
  }
}

int validate_config(const std::filesystem::path& path, std::ostream& log) {
  try {
    load_config(path);
    log << "valid\n";
    return 0;
  } catch (const Error& e) {
    log << "invalid: " << e.what() << '\n';
    return 2;
  }
}

int run_config(const std::filesystem::path& path, std::ostream& log) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const Error& e) {
    log << "invalid: " << e.what() << '\n';
    return 2;
  }
  Report report = run_experiment(cfg);
  try {
    emit_outputs(cfg, report);
  } catch (const Error& e) {
    log << "output failed: " << e.what() << '\n';
    return 1;
  }
  if (cfg.csv_path.empty() && cfg.json_path.empty()) write_csv(report.rows, log);
  for (const auto& r : report.rows) {
    if (!r.error.empty()) log << "run failed (delta=" << fmt(r.delta) << "): " << r.error << '\n';
  }
  return report.failed ? 1 : 0;
}

}  // namespace hardy
