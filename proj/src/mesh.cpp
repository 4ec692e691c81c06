#include "hardy/mesh.hpp"

#include "hardy/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>

namespace hardy {

namespace {

constexpr double kPi = std::numbers::pi;

using Key = std::array<double, 4>;

Key to_key(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

// Canonical identity of the chart point (p, t, u).
Eigen::Vector4d canonical(const std::vector<Patch>& patches, int p, double t, double u) {
  for (int guard = 0; guard < 16; ++guard) {
    const Patch& P = patches[p];
    if (t == 0.0) {
      if (P.collapse_t0 >= 0) return {1.0, double(P.collapse_t0), 0.0, 0.0};
      if (u == 0.0 && P.corner_u0 >= 0) return {1.0, double(P.corner_u0), 0.0, 0.0};
      if (u == 1.0 && P.corner_u1 >= 0) return {1.0, double(P.corner_u1), 0.0, 0.0};
    }
    if (t == P.t_top) {
      if (P.collapse_top >= 0) return {1.0, double(P.collapse_top), 0.0, 0.0};
      if (P.link_top >= 0 && P.link_top < p) {
        p = P.link_top;
        continue;
      }
    }
    if (u == 1.0 && P.link_u1 >= 0) {
      u = P.link_u1_to;
      p = P.link_u1;
      continue;
    }
    if (u == 0.0 && P.link_u0 >= 0) {
      u = P.link_u0_to;
      p = P.link_u0;
      continue;
    }
    return {0.0, double(p), t, u};
  }
  throw GeometryError("cyclic chart identification");
}

bool fixed_occurrence(const Patch& P, double t, double u) {
  if (t == 0.0) return true;
  if (t == P.t_top && P.fixed_top && P.collapse_top < 0) return true;
  if (u == 0.0 && P.fixed_u0) return true;
  if (u == 1.0 && P.fixed_u1) return true;
  return false;
}

class Builder {
 public:
  explicit Builder(Mesh& mesh) : mesh_(mesh) {
    for (std::size_t i = 0; i < mesh_.keys.size(); ++i) index_[to_key(mesh_.keys[i])] = int(i);
    fixed_.assign(mesh_.vertices.size(), 0);
  }

  int node(int p, double t, double u) {
    const Eigen::Vector4d key = canonical(mesh_.patches, p, t, u);
    const Key k = to_key(key);
    auto it = index_.find(k);
    int id;
    if (it == index_.end()) {
      id = int(mesh_.vertices.size());
      index_.emplace(k, id);
      mesh_.keys.push_back(key);
      const Patch& P = mesh_.patches[p];
      mesh_.vertices.push_back(P.map(t, u));
      mesh_.vertex_distance.push_back(P.distance(t, u));
      fixed_.push_back(0);
    } else {
      id = it->second;
    }
    if (fixed_occurrence(mesh_.patches[p], t, u)) fixed_[id] = 1;
    return id;
  }

  void segment(int p, double t0, double t1) {
    Element e;
    e.patch = p;
    e.v = {node(p, t0, 0.0), node(p, t1, 0.0), -1};
    e.param = {Eigen::Vector2d(t0, 0.0), Eigen::Vector2d(t1, 0.0), Eigen::Vector2d::Zero()};
    mesh_.elements.push_back(e);
  }

  void triangle(int p, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                const Eigen::Vector2d& c) {
    const Eigen::Vector2d m = (a + b + c) / 3.0;
    const double chart = mesh_.patches[p].jacobian(m[0], m[1]).determinant();
    const double param = (b - a)[0] * (c - a)[1] - (b - a)[1] * (c - a)[0];
    if (chart * param < 0) {
      triangle_ccw(p, a, c, b);
    } else {
      triangle_ccw(p, a, b, c);
    }
  }

  void triangle_ccw(int p, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                    const Eigen::Vector2d& c) {
    Element e;
    e.patch = p;
    e.v = {node(p, a[0], a[1]), node(p, b[0], b[1]), node(p, c[0], c[1])};
    e.param = {a, b, c};
    mesh_.elements.push_back(e);
  }

  void grid(int p, const std::vector<double>& ts, const std::vector<double>& us) {
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      for (std::size_t j = 0; j + 1 < us.size(); ++j) {
        const Eigen::Vector2d a(ts[i], us[j]);
        const Eigen::Vector2d b(ts[i + 1], us[j]);
        const Eigen::Vector2d c(ts[i + 1], us[j + 1]);
        const Eigen::Vector2d d(ts[i], us[j + 1]);
        triangle(p, a, b, c);
        triangle(p, a, c, d);
      }
    }
  }

  void finish() {
    mesh_.free.assign(mesh_.vertices.size(), 0);
    for (std::size_t i = 0; i < fixed_.size(); ++i) mesh_.free[i] = fixed_[i] ? 0 : 1;
    if (mesh_.ball) apply_ball(mesh_, mesh_.ball->center, mesh_.ball->radius);
    mesh_.renumber_free();
  }

  static void apply_ball(Mesh& mesh, const Point& c, double radius) {
    const double lim = radius * (1 + 1e-12);
    std::vector<char> outside(mesh.vertices.size(), 0);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      outside[i] = (mesh.vertices[i] - c).norm() > lim ? 1 : 0;
    }
    const int nv = mesh.nodes_per_element();
    for (const auto& e : mesh.elements) {
      bool any = false;
      for (int k = 0; k < nv; ++k) any = any || outside[e.v[k]];
      if (!any) continue;
      for (int k = 0; k < nv; ++k) mesh.free[e.v[k]] = 0;
    }
  }

 private:
  Mesh& mesh_;
  std::map<Key, int> index_;
  std::vector<char> fixed_;
};

std::vector<double> uniform_grid(int cells) {
  std::vector<double> u(cells + 1);
  for (int i = 0; i <= cells; ++i) u[i] = double(i) / cells;
  u[cells] = 1.0;
  return u;
}

int cells_for(double length, double h, int at_least) {
  return std::max(at_least, int(std::ceil(length / h - 1e-9)));
}

void check_h(double r, double h) {
  if (!(h > 0) || !std::isfinite(h)) throw ValidationError("mesh size must be positive");
  if (!(r > 0)) throw ValidationError("layer depth must be positive");
  if (h >= r / 4) throw ResolutionError("mesh size must be below a quarter of the layer depth");
}

Patch trapezoid(const Point& p0, const Point& p1, double cot_a, double cot_b, double t_top) {
  Patch P;
  P.kind = PatchKind::Trapezoid;
  P.origin = p0;
  P.length = (p1 - p0).norm();
  P.e = (p1 - p0) / P.length;
  P.n = Point(-P.e.y(), P.e.x());
  P.cot_a = cot_a;
  P.cot_b = cot_b;
  P.t_top = t_top;
  return P;
}

Patch strip(const Point& p0, const Point& dir, const Point& normal, double length, double t_top) {
  Patch P;
  P.kind = PatchKind::Trapezoid;
  P.origin = p0;
  P.e = dir;
  P.n = normal;
  P.length = length;
  P.t_top = t_top;
  return P;
}

Patch fan(const Point& v, double phi0, double span, double t_top) {
  Patch P;
  P.kind = PatchKind::Fan;
  P.origin = v;
  P.phi0 = phi0;
  P.span = span;
  P.t_top = t_top;
  return P;
}

void polygon_trapezoids(Mesh& mesh, const Domain& domain, double t_top, bool full,
                        const std::vector<double>& ts, double ht) {
  const auto& v = domain.vertices;
  const int n = int(v.size());
  const auto angles = dihedral_angles(domain);
  for (int j = 0; j < n; ++j) {
    const int k = (j + 1) % n;
    Patch P = trapezoid(v[j], v[k], 1.0 / std::tan(angles[j] / 2), 1.0 / std::tan(angles[k] / 2),
                        t_top);
    P.link_u1 = k;
    P.link_u1_to = 0.0;
    if (full) {
      P.collapse_top = 0;
      P.fixed_top = false;
    }
    mesh.patches.push_back(P);
  }
  Builder b(mesh);
  for (int j = 0; j < n; ++j) {
    const int cells = cells_for(mesh.patches[j].length, ht, 1);
    b.grid(j, ts, uniform_grid(cells));
  }
  b.finish();
}

void check_nonempty(const Mesh& mesh) {
  if (mesh.n_free == 0) throw ResolutionError("mesh has no free nodes");
}

}  // namespace

Point Patch::map(double t, double u) const {
  switch (kind) {
    case PatchKind::Segment:
      return Point(origin.x() + e.x() * t, 0.0);
    case PatchKind::Trapezoid: {
      const double a = t * cot_a;
      const double b = length - t * cot_b;
      return origin + (a + u * (b - a)) * e + t * n;
    }
    case PatchKind::Fan: {
      const double phi = phi0 + u * span;
      return origin + t * Point(std::cos(phi), std::sin(phi));
    }
    case PatchKind::Ring: {
      const double phi = 2 * kPi * u;
      return origin + (length - t) * Point(std::cos(phi), std::sin(phi));
    }
    case PatchKind::Sector: {
      const double phi = phi0 + u * span;
      return origin + t * Point(std::cos(phi), std::sin(phi));
    }
  }
  return origin;
}

Eigen::Matrix2d Patch::jacobian(double t, double u) const {
  Eigen::Matrix2d J;
  switch (kind) {
    case PatchKind::Segment:
      J << e.x(), 0.0, 0.0, 1.0;
      break;
    case PatchKind::Trapezoid: {
      const double a = t * cot_a;
      const double b = length - t * cot_b;
      const Point dt = (cot_a + u * (-cot_b - cot_a)) * e + n;
      const Point du = (b - a) * e;
      J.col(0) = dt;
      J.col(1) = du;
      break;
    }
    case PatchKind::Fan:
    case PatchKind::Sector: {
      const double phi = phi0 + u * span;
      J.col(0) = Point(std::cos(phi), std::sin(phi));
      J.col(1) = t * span * Point(-std::sin(phi), std::cos(phi));
      break;
    }
    case PatchKind::Ring: {
      const double phi = 2 * kPi * u;
      J.col(0) = -Point(std::cos(phi), std::sin(phi));
      J.col(1) = 2 * kPi * (length - t) * Point(-std::sin(phi), std::cos(phi));
      break;
    }
  }
  return J;
}

double Patch::distance(double t, double u) const {
  if (kind == PatchKind::Sector) {
    const double theta = u * std::abs(span);
    return theta < kPi / 2 ? t * std::sin(theta) : t;
  }
  return t;
}

void Mesh::renumber_free() {
  free_index.assign(vertices.size(), -1);
  n_free = 0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (free[i]) free_index[i] = n_free++;
  }
}

std::vector<double> graded_grid(double top, double h, double q, double depth) {
  if (!(top > 0) || !(h > 0)) throw ValidationError("grid needs positive extent and step");
  std::vector<double> out{top};
  double t = top;
  if (q <= 1.0) {
    const int cells = std::max(1, int(std::lround(top / h)));
    for (int i = cells - 1; i > 0; --i) out.push_back(top * i / cells);
  } else {
    const double floor = top * std::exp(-depth);
    const double shrink = 1.0 - 1.0 / q;
    for (;;) {
      t -= std::min(h, t * shrink);
      if (t <= floor) break;
      out.push_back(t);
    }
  }
  out.push_back(0.0);
  std::reverse(out.begin(), out.end());
  return out;
}

Mesh build_layer_mesh(const Domain& domain, double r, double h, const MeshOptions& options) {
  check_h(r, h);
  const double ht = options.tangential_h > 0 ? options.tangential_h : h;
  Mesh mesh;
  mesh.h = h;
  mesh.r = r;
  mesh.dim = domain.dim;
  const auto ts = graded_grid(r, h, options.grading, options.depth);
  switch (domain.kind) {
    case DomainKind::Interval: {
      if (r > (domain.hi - domain.lo) / 2) throw LayerOverlapError("layer depth exceeds half the interval");
      Patch P;
      P.kind = PatchKind::Segment;
      P.origin = Point(domain.lo, 0.0);
      P.e = Point(1.0, 0.0);
      P.t_top = r;
      mesh.patches.push_back(P);
      Builder b(mesh);
      for (std::size_t i = 0; i + 1 < ts.size(); ++i) b.segment(0, ts[i], ts[i + 1]);
      b.finish();
      break;
    }
    case DomainKind::Disk: {
      if (r >= domain.radius) throw LayerOverlapError("layer depth reaches the disk center");
      Patch P;
      P.kind = PatchKind::Ring;
      P.origin = domain.center;
      P.length = domain.radius;
      P.t_top = r;
      P.link_u1 = 0;
      P.link_u1_to = 0.0;
      mesh.patches.push_back(P);
      Builder b(mesh);
      b.grid(0, ts, uniform_grid(cells_for(2 * kPi * domain.radius, ht, 8)));
      b.finish();
      break;
    }
    case DomainKind::ConvexPolygon: {
      if (r >= inradius(domain)) throw LayerOverlapError("layer depth reaches the inradius");
      polygon_trapezoids(mesh, domain, r, false, ts, ht);
      break;
    }
    case DomainKind::PolygonComplement: {
      if (!options.box) throw ValidationError("unbounded domain needs a bounding box");
      const auto& v = domain.vertices;
      const int n = int(v.size());
      for (const auto& p : v) {
        if (!options.box->contains(p + Point(r, r)) || !options.box->contains(p - Point(r, r))) {
          throw ValidationError("bounding box must contain the layer");
        }
      }
      // strips 0..n-1 along edges, fans n..2n-1 at vertices
      for (int k = 0; k < n; ++k) {
        const Point a = v[k];
        const Point b = v[(k + 1) % n];
        const Point e = (b - a).normalized();
        Patch S = strip(a, e, Point(e.y(), -e.x()), (b - a).norm(), r);
        S.corner_u0 = k;
        S.corner_u1 = (k + 1) % n;
        S.link_u1 = n + (k + 1) % n;
        S.link_u1_to = 0.0;
        mesh.patches.push_back(S);
      }
      for (int k = 0; k < n; ++k) {
        const int prev = (k + n - 1) % n;
        const Point ep = (v[k] - v[prev]).normalized();
        const Point en = (v[(k + 1) % n] - v[k]).normalized();
        const double phi0 = std::atan2(-ep.x(), ep.y());
        double phi1 = std::atan2(-en.x(), en.y());
        while (phi1 <= phi0) phi1 += 2 * kPi;
        Patch F = fan(v[k], phi0, phi1 - phi0, r);
        F.collapse_t0 = k;
        F.link_u1 = k;
        F.link_u1_to = 0.0;
        mesh.patches.push_back(F);
      }
      Builder b(mesh);
      for (int k = 0; k < n; ++k) {
        b.grid(k, ts, uniform_grid(cells_for(mesh.patches[k].length, ht, 1)));
      }
      for (int k = 0; k < n; ++k) {
        const Patch& F = mesh.patches[n + k];
        b.grid(n + k, ts, uniform_grid(cells_for(std::abs(F.span) * r, ht, 2)));
      }
      b.finish();
      break;
    }
    case DomainKind::WedgeComplement: {
      if (!options.box) throw ValidationError("unbounded domain needs a bounding box");
      const Box& box = *options.box;
      const double half = domain.alpha / 2;
      const Point eu(std::cos(half), std::sin(half));
      const Point el(std::cos(half), -std::sin(half));
      const Point nu(-std::sin(half), std::cos(half));
      const Point nl(-std::sin(half), -std::cos(half));
      // longest strip that stays in the box
      auto strip_length = [&](const Point& e, const Point& nrm) {
        double lo = 0.0, hi = 1e6;
        if (!box.contains(r * nrm) || !box.contains(Point::Zero())) return 0.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (box.contains(mid * e) && box.contains(mid * e + r * nrm)) lo = mid;
          else hi = mid;
        }
        return lo;
      };
      const double Lu = strip_length(eu, nu);
      const double Ll = strip_length(el, nl);
      if (!(Lu > 0 && Ll > 0)) throw ValidationError("bounding box must contain the apex layer");
      for (int i = 0; i < 64; ++i) {
        const double phi = half + kPi / 2 + (kPi - domain.alpha) * i / 63.0;
        if (!box.contains(r * Point(std::cos(phi), std::sin(phi)))) {
          throw ValidationError("bounding box must contain the apex layer");
        }
      }
      // 0: upper strip, 1: lower strip, 2: apex fan
      Patch U = strip(Point::Zero(), eu, nu, Lu, r);
      U.fixed_u1 = true;
      U.corner_u0 = 0;
      U.link_u0 = 2;
      U.link_u0_to = 0.0;
      Patch L = strip(Point::Zero(), el, nl, Ll, r);
      L.fixed_u1 = true;
      L.corner_u0 = 0;
      Patch F = fan(Point::Zero(), half + kPi / 2, kPi - domain.alpha, r);
      F.collapse_t0 = 0;
      F.link_u1 = 1;
      F.link_u1_to = 0.0;
      mesh.patches = {U, L, F};
      Builder b(mesh);
      b.grid(0, ts, uniform_grid(cells_for(Lu, ht, 2)));
      b.grid(1, ts, uniform_grid(cells_for(Ll, ht, 2)));
      b.grid(2, ts, uniform_grid(cells_for(F.span * r, ht, 2)));
      b.finish();
      break;
    }
    case DomainKind::HalfPlane: {
      if (!options.box) throw ValidationError("unbounded domain needs a bounding box");
      const Box& box = *options.box;
      if (box.ymin > 0 || box.ymax < r) throw ValidationError("bounding box must contain the layer");
      Patch S = strip(Point(box.xmin, 0.0), Point(1.0, 0.0), Point(0.0, 1.0), box.xmax - box.xmin, r);
      S.fixed_u0 = true;
      S.fixed_u1 = true;
      mesh.patches.push_back(S);
      Builder b(mesh);
      b.grid(0, ts, uniform_grid(cells_for(S.length, ht, 2)));
      b.finish();
      break;
    }
    case DomainKind::Koch:
      throw UnsupportedKindError("the Koch domain is not meshable");
  }
  check_nonempty(mesh);
  return mesh;
}

Mesh build_domain_mesh(const Domain& domain, double h, const MeshOptions& options) {
  const double ht = options.tangential_h > 0 ? options.tangential_h : h;
  Mesh mesh;
  mesh.h = h;
  mesh.r = 0.0;
  mesh.dim = domain.dim;
  switch (domain.kind) {
    case DomainKind::Interval: {
      const double top = (domain.hi - domain.lo) / 2;
      check_h(top, h);
      const auto ts = graded_grid(top, h, options.grading, options.depth);
      Patch A;
      A.kind = PatchKind::Segment;
      A.origin = Point(domain.lo, 0.0);
      A.e = Point(1.0, 0.0);
      A.t_top = top;
      A.fixed_top = false;
      Patch B = A;
      B.origin = Point(domain.hi, 0.0);
      B.e = Point(-1.0, 0.0);
      B.link_top = 0;
      mesh.patches = {A, B};
      Builder b(mesh);
      for (int p = 0; p < 2; ++p) {
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) b.segment(p, ts[i], ts[i + 1]);
      }
      b.finish();
      break;
    }
    case DomainKind::Disk: {
      check_h(domain.radius, h);
      const auto ts = graded_grid(domain.radius, h, options.grading, options.depth);
      Patch P;
      P.kind = PatchKind::Ring;
      P.origin = domain.center;
      P.length = domain.radius;
      P.t_top = domain.radius;
      P.link_u1 = 0;
      P.link_u1_to = 0.0;
      P.collapse_top = 0;
      P.fixed_top = false;
      mesh.patches.push_back(P);
      Builder b(mesh);
      b.grid(0, ts, uniform_grid(cells_for(2 * kPi * domain.radius, ht, 8)));
      b.finish();
      break;
    }
    case DomainKind::ConvexPolygon: {
      if (!is_tangential(domain)) {
        throw UnsupportedKindError("whole-domain meshes need a polygon with an incircle");
      }
      const double top = inradius(domain);
      check_h(top, h);
      const auto ts = graded_grid(top, h, options.grading, options.depth);
      polygon_trapezoids(mesh, domain, top, true, ts, ht);
      break;
    }
    default:
      throw UnsupportedKindError("whole-domain meshes need a bounded domain");
  }
  check_nonempty(mesh);
  return mesh;
}

Mesh build_sector_mesh(const Domain& domain, double radius, double h, const MeshOptions& options) {
  if (domain.kind != DomainKind::WedgeComplement) {
    throw UnsupportedKindError("sector meshes need a wedge complement");
  }
  check_h(radius, h);
  const double ht = options.tangential_h > 0 ? options.tangential_h : h;
  const double half_open = kPi - domain.alpha / 2;  // half of the opening 2 pi - alpha
  const auto ts = graded_grid(radius, h, options.grading, options.depth);
  auto us = graded_grid(half_open, ht, options.grading, options.angular_depth);
  for (auto& u : us) u /= half_open;
  us.back() = 1.0;
  Mesh mesh;
  mesh.dim = 2;
  mesh.h = h;
  mesh.r = radius;
  Patch A;
  A.kind = PatchKind::Sector;
  A.phi0 = domain.alpha / 2;
  A.span = half_open;
  A.t_top = radius;
  A.collapse_t0 = 0;
  A.fixed_u0 = true;
  A.link_u1 = 1;
  A.link_u1_to = 1.0;
  Patch B = A;
  B.phi0 = -domain.alpha / 2;
  B.span = -half_open;
  B.link_u1 = -1;
  mesh.patches = {A, B};
  Builder b(mesh);
  b.grid(0, ts, us);
  b.grid(1, ts, us);
  b.finish();
  check_nonempty(mesh);
  return mesh;
}

Mesh make_uniform_interval_mesh(const Domain& domain, int cells) {
  if (domain.kind != DomainKind::Interval) throw UnsupportedKindError("uniform meshes are 1D only");
  if (cells < 2 || cells % 2) throw ResolutionError("need an even number of cells");
  Mesh mesh;
  mesh.dim = 1;
  mesh.h = (domain.hi - domain.lo) / cells;
  const double top = (domain.hi - domain.lo) / 2;
  Patch A;
  A.kind = PatchKind::Segment;
  A.origin = Point(domain.lo, 0.0);
  A.e = Point(1.0, 0.0);
  A.t_top = top;
  A.fixed_top = false;
  Patch B = A;
  B.origin = Point(domain.hi, 0.0);
  B.e = Point(-1.0, 0.0);
  B.link_top = 0;
  mesh.patches = {A, B};
  Builder b(mesh);
  const int half = cells / 2;
  for (int p = 0; p < 2; ++p) {
    for (int i = 0; i < half; ++i) {
      const double t0 = top * i / half;
      const double t1 = (i + 1 == half) ? top : top * (i + 1) / half;
      b.segment(p, t0, t1);
    }
  }
  b.finish();
  return mesh;
}

Mesh refine(const Mesh& mesh) {
  Mesh out;
  out.dim = mesh.dim;
  out.patches = mesh.patches;
  out.vertices = mesh.vertices;
  out.vertex_distance = mesh.vertex_distance;
  out.keys = mesh.keys;
  out.h = mesh.h / 2;
  out.level = mesh.level + 1;
  out.r = mesh.r;
  out.ball = mesh.ball;
  out.parent_vertex_count = int(mesh.vertices.size());
  Builder b(out);
  auto mid = [](const Eigen::Vector2d& a, const Eigen::Vector2d& c) -> Eigen::Vector2d {
    return 0.5 * (a + c);
  };
  auto record_parent = [&](int id, int a, int c) {
    const int offset = out.parent_vertex_count;
    if (id < offset) return;
    if (int(out.parents.size()) <= id - offset) out.parents.resize(id - offset + 1, {-1, -1});
    if (out.parents[id - offset][0] < 0) out.parents[id - offset] = {a, c};
  };
  for (const auto& e : mesh.elements) {
    if (mesh.dim == 1) {
      const double t0 = e.param[0][0];
      const double t1 = e.param[1][0];
      const double tm = 0.5 * (t0 + t1);
      b.segment(e.patch, t0, tm);
      b.segment(e.patch, tm, t1);
      record_parent(out.elements[out.elements.size() - 2].v[1], e.v[0], e.v[1]);
      continue;
    }
    const auto& p = e.param;
    const Eigen::Vector2d m01 = mid(p[0], p[1]);
    const Eigen::Vector2d m12 = mid(p[1], p[2]);
    const Eigen::Vector2d m20 = mid(p[2], p[0]);
    b.triangle(e.patch, p[0], m01, m20);
    b.triangle(e.patch, m01, p[1], m12);
    b.triangle(e.patch, m20, m12, p[2]);
    b.triangle(e.patch, m01, m12, m20);
    const auto& last = out.elements[out.elements.size() - 1];
    record_parent(last.v[0], e.v[0], e.v[1]);
    record_parent(last.v[1], e.v[1], e.v[2]);
    record_parent(last.v[2], e.v[2], e.v[0]);
  }
  b.finish();
  return out;
}

Mesh restrict_to_ball(const Mesh& mesh, const Point& center, double radius) {
  if (!(radius > 0)) throw ValidationError("ball radius must be positive");
  Mesh out = mesh;
  out.ball = Ball{center, radius};
  Builder::apply_ball(out, center, radius);
  out.renumber_free();
  if (out.n_free == 0) throw ResolutionError("ball too small for the mesh");
  return out;
}

Eigen::VectorXd prolongate(const Mesh& fine, const Eigen::VectorXd& coarse_nodal) {
  const int nc = fine.parent_vertex_count;
  if (coarse_nodal.size() != nc) throw ValidationError("coarse vector size mismatch");
  Eigen::VectorXd out(fine.vertices.size());
  out.head(nc) = coarse_nodal;
  for (std::size_t i = nc; i < fine.vertices.size(); ++i) {
    const auto& par = fine.parents[i - nc];
    // a new node always sits at the chart midpoint of a coarse edge
    out[i] = 0.5 * (out[par[0]] + out[par[1]]);
  }
  return out;
}

Eigen::VectorXd expand_free(const Mesh& mesh, const Eigen::VectorXd& free_values) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (mesh.free_index[i] >= 0) out[i] = free_values[mesh.free_index[i]];
  }
  return out;
}

void dump_mesh(const Mesh& mesh, std::ostream& out) {
  const auto old = out.precision();
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << '\n';
  for (const auto& e : mesh.elements) {
    out << "e " << e.v[0] << ' ' << e.v[1];
    if (mesh.dim == 2) out << ' ' << e.v[2];
    out << '\n';
  }
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!mesh.free[i]) out << "fix " << i << '\n';
  }
  out.precision(old);
}

}  // namespace hardy
