#pragma once

#include "hardy/assembly.hpp"
#include "hardy/geometry.hpp"
#include "hardy/linalg.hpp"
#include "hardy/mesh.hpp"
#include "hardy/weights.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hardy {

struct HardyEstimate {
  double delta = 0.0;
  double r = 0.0;  // 0 for whole-domain runs
  double h = 0.0;
  double lambda_min = 0.0;
  double constant = 0.0;  // lambda_min^(-1/2)
  double residual = 0.0;
  bool certified_lower_bound = false;
  int level = 0;
  int unknowns = 0;
  int iterations = 0;
  double tol = 0.0;
};

struct WeakCurvePoint {
  double c = 0.0;
  double b_of_c = 0.0;
  double lambda_min = 0.0;
  double residual = 0.0;
};

/// Numerical settings shared by all estimators.
struct Protocol {
  MeshOptions mesh;
  AssemblyOptions assembly;
  EigenOptions eigen;
  double tol = 1e-8;
  std::uint64_t seed = 20240611;
};

/// Estimate from a prepared mesh.
HardyEstimate estimate_on_mesh(const Mesh& mesh, const Domain& domain, double delta,
                               const Protocol& protocol);

/// Certified lower bound of the layer constant a_delta(Gamma_r).
HardyEstimate boundary_constant(const Domain& domain, double delta, double r, double h,
                                const Protocol& protocol = {});

struct Extrapolation {
  bool monotone = true;
  std::optional<double> value;
  double exponent = 0.0;
};

/// Richardson extrapolation c_inf - K h^p over the last three of a sequence
/// computed at h, h/2, h/4, ...; the exponent is fitted and clamped to [0.5, 2].
Extrapolation extrapolate(const std::vector<double>& constants);

struct SweepResult {
  std::vector<HardyEstimate> estimates;
  Extrapolation extrapolation;
};

/// Nested refinement sweep; r > 0 uses the layer mesh, r == 0 the whole domain.
SweepResult refine_sweep(const Domain& domain, double delta, double r, double h0, int levels,
                         const Protocol& protocol = {});
/// Same sweep on a caller-supplied level-0 mesh.
SweepResult refine_sweep(const Mesh& base, const Domain& domain, double delta, int levels,
                         const Protocol& protocol);

HardyEstimate full_domain_constant(const Domain& domain, double delta, double h,
                                   const Protocol& protocol = {});

/// Layer estimates restricted to balls B(x, s) for each radius; the apex of a
/// wedge complement uses a polar mesh of the ball. Each radius is refined
/// `levels - 1` times and the finest estimate is returned.
std::vector<HardyEstimate> local_constant(const Domain& domain, const Point& x, double delta,
                                          const std::vector<double>& radii, double r, double h,
                                          const Protocol& protocol = {}, int levels = 1);

std::vector<WeakCurvePoint> weak_constant_curve(const Domain& domain, double delta,
                                                const std::vector<double>& c_list, double h,
                                                const Protocol& protocol = {}, int levels = 1);

struct BisectionStep {
  double lo = 0.0;
  double hi = 0.0;
  double alpha = 0.0;
  bool anomalous = false;
  double constant = 0.0;
};

struct CriticalAngleResult {
  double angle = 0.0;
  std::vector<BisectionStep> trace;
};

/// Bisection on [lo, hi]: `classify` returns whether the angle is anomalous
/// and the constant it observed. lo must classify anomalous, hi standard.
CriticalAngleResult bisect_critical_angle(
    const std::function<std::pair<bool, double>(double)>& classify, double lo, double hi,
    double tol_angle);

struct CriticalAngleProtocol {
  double lo = 0.0;  // 0: pi/8
  double hi = 0.0;  // 0: pi/2
  double tol_angle = 0.05;
  double margin = 0.02;
  double radius = 0.25;  // ball around the apex
  double h = 0.05;
  int levels = 1;
  Protocol numerics;
};

/// Local apex constant of a wedge complement at delta = 0.
HardyEstimate apex_constant(double alpha, const CriticalAngleProtocol& protocol);

CriticalAngleResult critical_angle(const CriticalAngleProtocol& protocol);

struct WitnessQuadrature {
  int points_per_panel = 8;
  double panel_ratio = 2.0;   // geometric panels in the distance variable
  int tangential_panels = 48;
  double min_distance = 0.0;  // 0: integrate down to r/n
};

struct WitnessIntegrals {
  double numerator = 0.0;    // |d^(delta/2-1) phi|^2
  double denominator = 0.0;  // |d^(delta/2) grad phi|^2
  double ratio = 0.0;        // sqrt(numerator / denominator)
};

/// Ratio for phi = d^(-a/2) psi_n with a = (d - d_H) + delta - 2.
WitnessIntegrals witness_integrals(const Domain& domain, const WitnessPatch& patch, double delta,
                                   double r, long n, const WitnessQuadrature& quad = {});
double witness_ratio(const Domain& domain, const WitnessPatch& patch, double delta, double r,
                     long n, const WitnessQuadrature& quad = {});

/// Piecewise cubic Hermite function on [0, r].
struct HermiteSpline {
  std::vector<double> knots;
  std::vector<double> values;
  std::vector<double> slopes;

  double value(double t) const;
  double derivative(double t) const;
  void validate() const;
};

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double scale = 0.0;  // magnitude of the terms, for relative tolerances
};

/// slack = int t^d f'^2 - [((d-1)/2)^2 int t^(d-2) f^2 - ((d-1)/2) r^(d-1) f(r)^2].
InequalityCheck verify_1d_inequality(const HermiteSpline& f, double delta, double r);

enum class Verdict { Semibounded, Unbounded, Inconclusive };
std::string to_string(Verdict v);

struct SemiboundedRow {
  double beta = 0.0;
  std::vector<double> lambdas;  // lambda_min(A - beta B, B0) per level
  Verdict verdict = Verdict::Inconclusive;
};

struct SemiboundedScan {
  double scale = 0.0;  // lambda_min(A, B0) on the coarsest level
  std::vector<SemiboundedRow> rows;
};

/// Level k uses h0 / 2^k and grading depth protocol.mesh.depth / 2^(levels-1-k).
SemiboundedScan semibounded_scan(const Domain& domain, double delta,
                                 const std::vector<double>& betas, int levels, double h0,
                                 const Protocol& protocol = {});

}  // namespace hardy
