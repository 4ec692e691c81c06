#include "hardy/estimators.hpp"

#include "hardy/error.hpp"
#include "hardy/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hardy {

namespace {

constexpr double kPi = std::numbers::pi;

double constant_from_lambda(double lambda) {
  return lambda > 0 ? 1.0 / std::sqrt(lambda) : std::numeric_limits<double>::infinity();
}

// Panels on [a, b] with endpoint ratio at most `ratio` (geometric), as breakpoints.
void geometric_panels(double a, double b, double ratio, std::vector<double>& out) {
  if (!(b > a)) return;
  const int k = std::max(1, int(std::ceil(std::log(b / a) / std::log(ratio) - 1e-12)));
  for (int i = 0; i < k; ++i) out.push_back(a * std::pow(b / a, double(i) / k));
}

std::vector<double> distance_breakpoints(double lo, double hi, const std::vector<double>& kinks,
                                         double ratio) {
  std::vector<double> cuts{lo, hi};
  for (double k : kinks) {
    if (k > lo && k < hi) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) geometric_panels(cuts[i], cuts[i + 1], ratio, out);
  out.push_back(hi);
  return out;
}

struct WitnessAccumulator {
  const WitnessParams& params;
  double delta;
  double alpha;  // exponent shift (d - d_H) + delta - 2
  double num = 0.0;
  double den = 0.0;

  void add(const Point& x, double d, const Point& grad_d, double weight) {
    const WitnessValue w = witness_with_gradient(params, x, d, grad_d);
    if (w.value == 0.0 && w.gradient.squaredNorm() == 0.0) return;
    const double scale = std::pow(d, -alpha / 2);
    const double phi = scale * w.value;
    const Point grad = scale * (w.gradient - (alpha / 2) * w.value / d * grad_d);
    num += weight * std::pow(d, delta - 2) * phi * phi;
    den += weight * std::pow(d, delta) * grad.squaredNorm();
  }
};

}  // namespace

HardyEstimate estimate_on_mesh(const Mesh& mesh, const Domain& domain, double delta,
                               const Protocol& protocol) {
  const SparseSystem sys = assemble_system(mesh, domain, delta, protocol.assembly);
  const EigenResult eig = smallest_eigenpair(sys.A, sys.B, protocol.tol, protocol.seed, protocol.eigen);
  HardyEstimate est;
  est.delta = delta;
  est.r = mesh.r;
  est.h = mesh.h;
  est.lambda_min = eig.lambda_min;
  est.constant = constant_from_lambda(eig.lambda_min);
  est.residual = eig.residual;
  est.certified_lower_bound = true;
  est.level = mesh.level;
  est.unknowns = mesh.n_free;
  est.iterations = eig.iterations;
  est.tol = protocol.tol;
  return est;
}

HardyEstimate boundary_constant(const Domain& domain, double delta, double r, double h,
                                const Protocol& protocol) {
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  const Mesh mesh = build_layer_mesh(domain, r, h, protocol.mesh);
  return estimate_on_mesh(mesh, domain, delta, protocol);
}

Extrapolation extrapolate(const std::vector<double>& c) {
  Extrapolation out;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i] < c[i - 1] - 1e-9 * std::max(1.0, std::abs(c[i - 1]))) out.monotone = false;
  }
  if (c.size() < 3 || !out.monotone) return out;
  const double c1 = c[c.size() - 3];
  const double c2 = c[c.size() - 2];
  const double c3 = c[c.size() - 1];
  const double d1 = c2 - c1;
  const double d2 = c3 - c2;
  if (d2 == 0.0) {
    out.value = c3;
    out.exponent = 2.0;
    return out;
  }
  double p = 2.0;
  if (d1 > 0 && d2 > 0) p = -std::log2(d2 / d1);
  else if (d1 == 0.0) p = 0.5;
  p = std::clamp(p, 0.5, 2.0);
  out.exponent = p;
  out.value = c3 + d2 / (std::pow(2.0, p) - 1.0);
  return out;
}

SweepResult refine_sweep(const Mesh& base, const Domain& domain, double delta, int levels,
                         const Protocol& protocol) {
  if (levels < 1) throw ValidationError("levels must be >= 1");
  SweepResult out;
  Mesh mesh = base;
  std::vector<double> constants;
  for (int k = 0; k < levels; ++k) {
    if (k > 0) mesh = refine(mesh);
    out.estimates.push_back(estimate_on_mesh(mesh, domain, delta, protocol));
    constants.push_back(out.estimates.back().constant);
  }
  out.extrapolation = extrapolate(constants);
  return out;
}

SweepResult refine_sweep(const Domain& domain, double delta, double r, double h0, int levels,
                         const Protocol& protocol) {
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  const Mesh base = r > 0 ? build_layer_mesh(domain, r, h0, protocol.mesh)
                          : build_domain_mesh(domain, h0, protocol.mesh);
  return refine_sweep(base, domain, delta, levels, protocol);
}

HardyEstimate full_domain_constant(const Domain& domain, double delta, double h,
                                   const Protocol& protocol) {
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  if (!domain.bounded()) throw UnsupportedKindError("whole-domain constant needs a bounded domain");
  const Mesh mesh = build_domain_mesh(domain, h, protocol.mesh);
  return estimate_on_mesh(mesh, domain, delta, protocol);
}

std::vector<HardyEstimate> local_constant(const Domain& domain, const Point& x, double delta,
                                          const std::vector<double>& radii, double r, double h,
                                          const Protocol& protocol, int levels) {
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  if (levels < 1) throw ValidationError("levels must be >= 1");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1])) throw ValidationError("radii must be decreasing");
  }
  if (std::abs(signed_distance(domain, x)) > 1e-12) {
    throw DomainMembershipError("local constant needs a boundary point");
  }
  const bool apex = domain.kind == DomainKind::WedgeComplement && x.norm() <= 1e-14;
  std::vector<HardyEstimate> out;
  for (double s : radii) {
    if (!(s > 0)) throw ValidationError("radii must be positive");
    if (s <= 2 * h) throw ResolutionError("ball radius too small for the mesh size");
    Mesh mesh;
    if (apex) {
      mesh = build_sector_mesh(domain, std::min(s, r), h, protocol.mesh);
    } else {
      mesh = restrict_to_ball(build_layer_mesh(domain, r, h, protocol.mesh), x, s);
    }
    for (int k = 1; k < levels; ++k) mesh = refine(mesh);
    out.push_back(estimate_on_mesh(mesh, domain, delta, protocol));
  }
  return out;
}

std::vector<WeakCurvePoint> weak_constant_curve(const Domain& domain, double delta,
                                                const std::vector<double>& c_list, double h,
                                                const Protocol& protocol, int levels) {
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  if (!domain.bounded()) throw UnsupportedKindError("weak constant needs a bounded domain");
  for (std::size_t i = 0; i < c_list.size(); ++i) {
    if (!(c_list[i] >= 0)) throw ValidationError("penalties must be >= 0");
    if (i > 0 && !(c_list[i] > c_list[i - 1])) throw ValidationError("penalties must increase");
  }
  Mesh mesh = build_domain_mesh(domain, h, protocol.mesh);
  for (int k = 1; k < levels; ++k) mesh = refine(mesh);
  const SparseSystem sys = assemble_system(mesh, domain, delta, protocol.assembly);
  std::vector<WeakCurvePoint> out;
  for (double c : c_list) {
    const SpMat K = sys.A + (c * c) * sys.B0;
    const EigenResult eig = smallest_eigenpair(K, sys.B, protocol.tol, protocol.seed, protocol.eigen);
    out.push_back({c, constant_from_lambda(eig.lambda_min), eig.lambda_min, eig.residual});
  }
  return out;
}

CriticalAngleResult bisect_critical_angle(
    const std::function<std::pair<bool, double>(double)>& classify, double lo, double hi,
    double tol_angle) {
  if (!(lo < hi) || !(tol_angle > 0)) throw ValidationError("bisection needs lo < hi and tol > 0");
  CriticalAngleResult out;
  const auto [lo_anom, lo_c] = classify(lo);
  out.trace.push_back({lo, hi, lo, lo_anom, lo_c});
  const auto [hi_anom, hi_c] = classify(hi);
  out.trace.push_back({lo, hi, hi, hi_anom, hi_c});
  if (!lo_anom || hi_anom) {
    throw ProtocolError("classification inverted: lower angle must be anomalous, upper standard");
  }
  while (hi - lo > tol_angle) {
    const double mid = 0.5 * (lo + hi);
    const auto [anom, c] = classify(mid);
    out.trace.push_back({lo, hi, mid, anom, c});
    if (anom) lo = mid;
    else hi = mid;
  }
  out.angle = 0.5 * (lo + hi);
  return out;
}

HardyEstimate apex_constant(double alpha, const CriticalAngleProtocol& protocol) {
  const Domain wedge = make_wedge_complement(alpha);
  Mesh mesh = build_sector_mesh(wedge, protocol.radius, protocol.h, protocol.numerics.mesh);
  for (int k = 1; k < protocol.levels; ++k) mesh = refine(mesh);
  return estimate_on_mesh(mesh, wedge, 0.0, protocol.numerics);
}

CriticalAngleResult critical_angle(const CriticalAngleProtocol& protocol) {
  const double lo = protocol.lo > 0 ? protocol.lo : kPi / 8;
  const double hi = protocol.hi > 0 ? protocol.hi : kPi / 2;
  auto classify = [&](double alpha) {
    const HardyEstimate est = apex_constant(alpha, protocol);
    return std::make_pair(est.constant > 2.0 + protocol.margin, est.constant);
  };
  return bisect_critical_angle(classify, lo, hi, protocol.tol_angle);
}

WitnessIntegrals witness_integrals(const Domain& domain, const WitnessPatch& patch, double delta,
                                   double r, long n, const WitnessQuadrature& quad) {
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  WitnessParams params{n, r, patch};
  params.validate();
  const double t_floor = r / double(n);
  if (quad.min_distance > t_floor) {
    throw ResolutionError("witness quadrature does not reach the support near r/n");
  }
  if (quad.points_per_panel < 2 || !(quad.panel_ratio > 1) || quad.tangential_panels < 1) {
    throw ValidationError("invalid witness quadrature");
  }
  const double alpha = (domain.dim - domain.hausdorff_dim) + delta - 2.0;
  const double s = patch.radius;
  const QuadRule1D g = gauss_legendre(quad.points_per_panel);
  WitnessAccumulator acc{params, delta, alpha};
  const std::vector<double> kinks{t_floor, r, s / 2};

  auto integrate_distance = [&](double top, const std::function<void(double, double)>& at) {
    const auto cuts = distance_breakpoints(t_floor, top, kinks, quad.panel_ratio);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      for (std::size_t q = 0; q < g.nodes.size(); ++q) at(a + g.nodes[q] * (b - a), g.weights[q] * (b - a));
    }
  };

  if (domain.kind == DomainKind::Interval) {
    const bool left = patch.center.x() == domain.lo;
    const double top = std::min(s, (domain.hi - domain.lo) / 2);
    const Point grad(left ? 1.0 : -1.0, 0.0);
    integrate_distance(top, [&](double t, double w) {
      const Point x(left ? domain.lo + t : domain.hi - t, 0.0);
      acc.add(x, t, grad, w);
    });
  } else if (domain.kind == DomainKind::ConvexPolygon && is_tangential(domain)) {
    const auto& v = domain.vertices;
    const auto angles = dihedral_angles(domain);
    const double rin = inradius(domain);
    const std::size_t nf = v.size();
    for (std::size_t j = 0; j < nf; ++j) {
      const Point a = v[j];
      const Point b = v[(j + 1) % nf];
      const double L = (b - a).norm();
      const Point e = (b - a) / L;
      const Point nrm(-e.y(), e.x());
      const double ca = 1.0 / std::tan(angles[j] / 2);
      const double cb = 1.0 / std::tan(angles[(j + 1) % nf] / 2);
      // skip faces far from the patch
      const double face_gap = std::max(0.0, std::min((patch.center - a).norm(), (patch.center - b).norm()));
      const double along = (patch.center - a).dot(e);
      const double perp = std::abs((patch.center - a).dot(nrm));
      const double seg_dist = (along >= 0 && along <= L) ? perp : face_gap;
      if (seg_dist >= 2 * s) continue;
      integrate_distance(std::min(s, rin), [&](double t, double wt) {
        const double s0 = t * ca;
        const double s1 = L - t * cb;
        if (!(s1 > s0)) return;
        const double hp = (s1 - s0) / quad.tangential_panels;
        for (int k = 0; k < quad.tangential_panels; ++k) {
          for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double sig = s0 + (k + g.nodes[q]) * hp;
            const Point x = a + sig * e + t * nrm;
            if ((x - patch.center).norm() >= 2 * s) continue;
            acc.add(x, t, nrm, wt * g.weights[q] * hp);
          }
        }
      });
    }
  } else if (domain.kind == DomainKind::HalfPlane) {
    const Point nrm(0.0, 1.0);
    integrate_distance(s, [&](double t, double wt) {
      const double s0 = patch.center.x() - 2 * s;
      const double hp = 4 * s / quad.tangential_panels;
      for (int k = 0; k < quad.tangential_panels; ++k) {
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
          const Point x(s0 + (k + g.nodes[q]) * hp, t);
          acc.add(x, t, nrm, wt * g.weights[q] * hp);
        }
      }
    });
  } else {
    throw UnsupportedKindError("witness ratios need an interval, a half-plane or a polygon with an incircle");
  }
  WitnessIntegrals out;
  out.numerator = acc.num;
  out.denominator = acc.den;
  if (!(acc.den > 0)) throw ResolutionError("witness gradient integral vanished");
  out.ratio = std::sqrt(acc.num / acc.den);
  return out;
}

double witness_ratio(const Domain& domain, const WitnessPatch& patch, double delta, double r,
                     long n, const WitnessQuadrature& quad) {
  return witness_integrals(domain, patch, delta, r, n, quad).ratio;
}

void HermiteSpline::validate() const {
  if (knots.size() < 2 || values.size() != knots.size() || slopes.size() != knots.size()) {
    throw ValidationError("spline needs matching knots, values and slopes");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1])) throw ValidationError("spline knots must increase");
  }
  if (knots.front() != 0.0) throw ValidationError("spline must start at 0");
  if (values.front() != 0.0) throw ValidationError("spline must vanish at 0");
}

namespace {

std::size_t piece_of(const std::vector<double>& knots, double t) {
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  std::size_t i = it == knots.begin() ? 0 : std::size_t(it - knots.begin()) - 1;
  return std::min(i, knots.size() - 2);
}

}  // namespace

double HermiteSpline::value(double t) const {
  const std::size_t i = piece_of(knots, t);
  const double h = knots[i + 1] - knots[i];
  const double s = (t - knots[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * values[i] + h10 * h * slopes[i] + h01 * values[i + 1] + h11 * h * slopes[i + 1];
}

double HermiteSpline::derivative(double t) const {
  const std::size_t i = piece_of(knots, t);
  const double h = knots[i + 1] - knots[i];
  const double s = (t - knots[i]) / h;
  const double d00 = 6 * s * s - 6 * s;
  const double d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s;
  const double d11 = 3 * s * s - 2 * s;
  return (d00 * values[i] + d01 * values[i + 1]) / h + d10 * slopes[i] + d11 * slopes[i + 1];
}

InequalityCheck verify_1d_inequality(const HermiteSpline& f, double delta, double r) {
  f.validate();
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  if (std::abs(f.knots.back() - r) > 1e-15 * std::max(1.0, r)) {
    throw ValidationError("spline must end at r");
  }
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  boost::math::quadrature::tanh_sinh<double> endpoint;
  double lhs = 0.0, mass = 0.0, err_total = 0.0, l1_total = 0.0;
  auto integrate = [&](const auto& g, double a, double b) {
    double err = 0.0, l1 = 0.0;
    // the first piece carries the power singularity at the origin
    const double cut = 1e-100 * b;
    const double v =
        a == 0.0 ? endpoint.integrate([&](double t) { return t < cut ? 0.0 : g(t); }, a, b, 1e-12,
                                      &err, &l1)
                 : GK::integrate(g, a, b, 20, 1e-12, &err, &l1);
    err_total += err;
    l1_total += l1;
    return v;
  };
  for (std::size_t i = 0; i + 1 < f.knots.size(); ++i) {
    const double a = f.knots[i], b = f.knots[i + 1];
    lhs += integrate(
        [&](double t) {
          const double d = f.derivative(t);
          return std::pow(t, delta) * d * d;
        },
        a, b);
    mass += integrate(
        [&](double t) {
          const double v = f.value(t);
          return std::pow(t, delta - 2) * v * v;
        },
        a, b);
  }
  const double k = (delta - 1) / 2;
  const double fr = f.values.back();
  const double boundary = k * std::pow(r, delta - 1) * fr * fr;
  InequalityCheck out;
  out.lhs = lhs;
  out.rhs = k * k * mass - boundary;
  out.slack = out.lhs - out.rhs;
  out.scale = std::abs(lhs) + k * k * std::abs(mass) + std::abs(boundary);
  if (!(err_total <= 1e-9 * std::max(out.scale, 1e-300)) || !std::isfinite(l1_total)) {
    throw ResolutionError("adaptive quadrature did not converge near the origin");
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Semibounded: return "semibounded";
    case Verdict::Unbounded: return "unbounded";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

SemiboundedScan semibounded_scan(const Domain& domain, double delta,
                                 const std::vector<double>& betas, int levels, double h0,
                                 const Protocol& protocol) {
  if (domain.kind != DomainKind::Interval) throw UnsupportedKindError("scan needs an interval");
  if (!(delta >= 0 && delta < 2)) throw ValidationError("scan needs delta in [0, 2)");
  if (levels < 2) throw ValidationError("scan needs at least two levels");
  SemiboundedScan scan;
  for (double b : betas) scan.rows.push_back({b, {}, Verdict::Inconclusive});
  EigenOptions scan_eigen = protocol.eigen;
  scan_eigen.relative_residual = true;
  for (int k = 0; k < levels; ++k) {
    // each level halves h and doubles the grading depth, ending at the protocol depth
    MeshOptions opts = protocol.mesh;
    opts.depth = protocol.mesh.depth * std::pow(0.5, levels - 1 - k);
    const Mesh mesh = build_domain_mesh(domain, h0 * std::pow(0.5, k), opts);
    const SparseSystem sys = assemble_system(mesh, domain, delta, protocol.assembly);
    if (k == 0) {
      scan.scale = smallest_eigenpair(sys.A, sys.B0, protocol.tol, protocol.seed, scan_eigen).lambda_min;
    }
    for (auto& row : scan.rows) {
      const SpMat K = sys.A - row.beta * sys.B;
      try {
        row.lambdas.push_back(
            smallest_eigenpair(K, sys.B0, protocol.tol, protocol.seed, scan_eigen).lambda_min);
      } catch (const IterativeFailure&) {
        row.lambdas.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }
  for (auto& row : scan.rows) {
    const auto& l = row.lambdas;
    if (std::any_of(l.begin(), l.end(), [](double v) { return std::isnan(v); })) continue;
    bool decreasing = true;
    for (std::size_t i = 1; i < l.size(); ++i) decreasing = decreasing && l[i] < l[i - 1];
    const double initial = std::abs(l.front());
    const double last = l.back();
    const double prev = l[l.size() - 2];
    const double variation = std::abs(last - prev) / std::max(std::abs(last), 1e-300);
    const bool nonnegative = *std::min_element(l.begin(), l.end()) >= -protocol.tol * std::max(1.0, initial);
    if (decreasing && last < -1e3 * initial) {
      row.verdict = Verdict::Unbounded;
    } else if (nonnegative || variation < 0.05) {
      row.verdict = Verdict::Semibounded;
    } else {
      row.verdict = Verdict::Inconclusive;
    }
  }
  return scan;
}

}  // namespace hardy
