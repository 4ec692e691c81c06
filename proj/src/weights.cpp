#include "hardy/weights.hpp"

#include "hardy/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hardy {

void WeightSpec::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be >= 0");
  if (power_offset != 0.0 && power_offset != -2.0) {
    throw ValidationError("power offset must be 0 or -2");
  }
}

double weight_at_distance(const WeightSpec& spec, double d) {
  const double e = spec.exponent();
  if (d <= 0.0) {
    if (e < 0.0) throw SingularityError("singular weight evaluated on the boundary");
    return e == 0.0 ? 1.0 : 0.0;
  }
  if (e == 0.0) return 1.0;
  return std::pow(d, e);
}

double weight_eval(const Domain& domain, const WeightSpec& spec, const Point& p) {
  spec.validate();
  return weight_at_distance(spec, signed_distance(domain, p));
}

double xi_n(double t, double n) {
  if (t < 1.0 / n) return 0.0;
  if (t > 1.0) return 1.0;
  return std::log(n * t) / std::log(n);
}

double xi_n_derivative(double t, double n) {
  if (t < 1.0 / n || t > 1.0) return 0.0;
  return 1.0 / (t * std::log(n));
}

double chi(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double y = 2.0 * t - 1.0;
  return 1.0 - y * y * (3.0 - 2.0 * y);
}

double chi_derivative(double t) {
  if (t <= 0.5 || t >= 1.0) return 0.0;
  const double y = 2.0 * t - 1.0;
  return -12.0 * y * (1.0 - y);
}

double WitnessPatch::distance(const Point& p, Point* gradient) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = (p - samples[i]).squaredNorm();
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  best = std::sqrt(best);
  if (gradient != nullptr) {
    *gradient = best > 0.0 ? Point((p - samples[arg]) / best) : Point(Point::Zero());
  }
  return best;
}

namespace {

// Pieces of the boundary of a polygonal domain as segments.
std::vector<std::pair<Point, Point>> boundary_segments(const Domain& domain, double reach) {
  std::vector<std::pair<Point, Point>> out;
  switch (domain.kind) {
    case DomainKind::ConvexPolygon:
    case DomainKind::PolygonComplement: {
      const auto& v = domain.vertices;
      for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], v[(i + 1) % v.size()]);
      break;
    }
    case DomainKind::WedgeComplement: {
      const double half = domain.alpha / 2;
      out.emplace_back(Point::Zero(), reach * Point(std::cos(half), std::sin(half)));
      out.emplace_back(Point::Zero(), reach * Point(std::cos(half), -std::sin(half)));
      break;
    }
    case DomainKind::HalfPlane:
      out.emplace_back(Point(-reach, 0.0), Point(reach, 0.0));
      break;
    default:
      break;
  }
  return out;
}

// Parameter interval of a segment inside a closed ball.
bool clip_segment(const Point& a, const Point& b, const Point& c, double rad, double& s0,
                  double& s1) {
  const Point e = b - a;
  const Point f = a - c;
  const double qa = e.squaredNorm();
  const double qb = 2 * f.dot(e);
  const double qc = f.squaredNorm() - rad * rad;
  const double disc = qb * qb - 4 * qa * qc;
  if (disc < 0) return false;
  const double sq = std::sqrt(disc);
  s0 = std::max(0.0, (-qb - sq) / (2 * qa));
  s1 = std::min(1.0, (-qb + sq) / (2 * qa));
  return s1 > s0;
}

}  // namespace

WitnessPatch make_witness_patch(const Domain& domain, const Point& center, double radius,
                                int sample_count) {
  if (!(radius > 0)) throw ValidationError("patch radius must be positive");
  if (sample_count < 2) throw ValidationError("patch needs at least two samples");
  WitnessPatch patch;
  patch.center = center;
  patch.radius = radius;
  if (domain.kind == DomainKind::Interval) {
    if (center.x() != domain.lo && center.x() != domain.hi) {
      throw DomainMembershipError("patch center must be a boundary point");
    }
    patch.samples.push_back(center);
    return patch;
  }
  if (std::abs(signed_distance(domain, center)) > 1e-12) {
    throw DomainMembershipError("patch center must be a boundary point");
  }
  if (domain.kind == DomainKind::Disk) {
    // arc of the circle inside the ball
    const Point v = center - domain.center;
    const double R = domain.radius;
    const double phi0 = std::atan2(v.y(), v.x());
    const double ratio = std::min(1.0, radius / (2 * R));
    const double half = 2 * std::asin(ratio);
    for (int i = 0; i < sample_count; ++i) {
      const double phi = phi0 - half + 2 * half * i / (sample_count - 1);
      patch.samples.push_back(domain.center + R * Point(std::cos(phi), std::sin(phi)));
    }
    return patch;
  }
  const auto segs = boundary_segments(domain, center.norm() + 2 * radius);
  if (segs.empty()) throw UnsupportedKindError("no witness patch for " + to_string(domain.kind));
  std::vector<std::pair<Point, Point>> pieces;
  double total = 0.0;
  for (const auto& [a, b] : segs) {
    double s0 = 0, s1 = 0;
    if (!clip_segment(a, b, center, radius, s0, s1)) continue;
    const Point p = a + s0 * (b - a);
    const Point q = a + s1 * (b - a);
    pieces.emplace_back(p, q);
    total += (q - p).norm();
  }
  if (total <= 0.0) throw GeometryError("patch does not meet the boundary");
  // distribute samples by length, endpoints included
  int used = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& [p, q] = pieces[i];
    int m = (i + 1 == pieces.size())
                ? sample_count - used
                : std::max(2, static_cast<int>(std::lround(sample_count * (q - p).norm() / total)));
    m = std::max(m, 2);
    for (int k = 0; k < m; ++k) patch.samples.push_back(p + (q - p) * (double(k) / (m - 1)));
    used += m;
  }
  return patch;
}

void WitnessParams::validate() const {
  if (n < 2) throw ValidationError("witness index n must be >= 2");
  if (!(r > 0)) throw ValidationError("witness depth r must be positive");
  if (!(patch.radius > 0)) throw ValidationError("patch radius must be positive");
  if (patch.samples.empty()) throw ValidationError("patch has no samples");
}

WitnessValue witness_with_gradient(const WitnessParams& params, const Point& p, double d,
                                   const Point& grad_d) {
  const double n = static_cast<double>(params.n);
  const double s = params.patch.radius;
  Point grad_a;
  const double da = params.patch.distance(p, &grad_a);
  const double x = xi_n(d / params.r, n);
  const double c = chi(da / s);
  WitnessValue out;
  out.value = x * c;
  out.gradient = xi_n_derivative(d / params.r, n) / params.r * c * grad_d +
                 x * chi_derivative(da / s) / s * grad_a;
  return out;
}

double witness_function(const Domain& domain, const WitnessParams& params, const Point& p) {
  params.validate();
  const double d = signed_distance(domain, p);
  const double n = static_cast<double>(params.n);
  const double da = params.patch.distance(p);
  return xi_n(d / params.r, n) * chi(da / params.patch.radius);
}

}  // namespace hardy
