#include "hardy/geometry.hpp"

#include "hardy/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>

namespace hardy {

namespace {

constexpr double kTieTol = 1e-12;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

void check_convex_ccw(const std::vector<Point>& v) {
  const auto n = v.size();
  if (n < 3) throw GeometryError("polygon needs at least three vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    const Point& c = v[(i + 2) % n];
    if ((b - a).norm() == 0.0) throw GeometryError("consecutive polygon vertices coincide");
    const double turn = cross(b - a, c - b);
    const double scale = (b - a).norm() * (c - b).norm();
    if (turn <= 1e-14 * scale) {
      throw GeometryError("polygon vertices must be strictly convex and counter-clockwise");
    }
  }
}

FaceLine edge_line(const Point& a, const Point& b) {
  const Point e = (b - a).normalized();
  FaceLine line;
  line.normal = Point(-e.y(), e.x());
  line.offset = -line.normal.dot(a);
  return line;
}

std::vector<FaceLine> polygon_lines(const std::vector<Point>& v) {
  std::vector<FaceLine> lines;
  lines.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) lines.push_back(edge_line(v[i], v[(i + 1) % v.size()]));
  return lines;
}

// Distance from an exterior point to a convex polygon.
NearestFace complement_nearest(const std::vector<Point>& v, const Point& p) {
  const auto n = static_cast<int>(v.size());
  NearestFace best;
  best.distance = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  int best_edge = -1;
  for (int i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    const Point e = b - a;
    double s = (p - a).dot(e) / e.squaredNorm();
    s = std::clamp(s, 0.0, 1.0);
    double dist;
    if (s == 0.0) {
      dist = (p - a).norm();
    } else if (s == 1.0) {
      dist = (p - b).norm();
    } else {
      dist = std::abs(edge_line(a, b).eval(p));
    }
    if (dist < best.distance) {
      best.distance = dist;
      best_s = s;
      best_edge = i;
    }
  }
  if (best_s <= 0.0) {
    best.type = NearestFace::Type::Vertex;
    best.index = best_edge;
  } else if (best_s >= 1.0) {
    best.type = NearestFace::Type::Vertex;
    best.index = (best_edge + 1) % n;
  } else {
    best.type = NearestFace::Type::Face;
    best.index = best_edge;
  }
  return best;
}

// Inside the closed wedge {|arg p| <= alpha/2}?
bool in_wedge(double alpha, const Point& p, double tol) {
  const double half = alpha / 2;
  const Point up(std::cos(half), std::sin(half));
  const Point lo(std::cos(half), -std::sin(half));
  // inside iff to the right of the upper ray and to the left of the lower ray
  return cross(up, p) < -tol && cross(lo, p) > tol;
}

NearestFace wedge_nearest(double alpha, const Point& p) {
  const double half = alpha / 2;
  const Point eu(std::cos(half), std::sin(half));
  const Point el(std::cos(half), -std::sin(half));
  NearestFace best;
  best.distance = std::numeric_limits<double>::infinity();
  // face 0: upper ray, face 1: lower ray; vertex 0: apex
  const Point rays[2] = {eu, el};
  int best_face = -1;
  bool at_apex = false;
  for (int i = 0; i < 2; ++i) {
    const double s = p.dot(rays[i]);
    double dist;
    bool apex;
    if (s <= 0.0) {
      dist = p.norm();
      apex = true;
    } else {
      dist = std::abs(cross(rays[i], p));
      apex = false;
    }
    if (dist < best.distance) {
      best.distance = dist;
      best_face = i;
      at_apex = apex;
    }
  }
  if (at_apex) {
    best.type = NearestFace::Type::Vertex;
    best.index = 0;
  } else {
    best.type = NearestFace::Type::Face;
    best.index = best_face;
  }
  return best;
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Interval: return "interval";
    case DomainKind::Disk: return "disk";
    case DomainKind::ConvexPolygon: return "convex-polygon";
    case DomainKind::PolygonComplement: return "polygon-complement";
    case DomainKind::WedgeComplement: return "wedge-complement";
    case DomainKind::HalfPlane: return "half-plane";
    case DomainKind::Koch: return "koch";
  }
  return "unknown";
}

std::string to_string(ConvexityClass cls) {
  switch (cls) {
    case ConvexityClass::C11: return "C11";
    case ConvexityClass::Convex: return "convex";
    case ConvexityClass::ConvexComplement: return "convex-complement";
    case ConvexityClass::Other: return "other";
  }
  return "other";
}

ConvexityClass convexity_from_string(const std::string& name) {
  if (name == "C11") return ConvexityClass::C11;
  if (name == "convex") return ConvexityClass::Convex;
  if (name == "convex-complement") return ConvexityClass::ConvexComplement;
  if (name == "other") return ConvexityClass::Other;
  throw ValidationError("unknown domain class '" + name + "'");
}

bool Domain::bounded() const {
  return kind == DomainKind::Interval || kind == DomainKind::Disk ||
         kind == DomainKind::ConvexPolygon || kind == DomainKind::Koch;
}

Domain make_interval(double lo, double hi) {
  if (!(lo < hi)) throw GeometryError("interval needs lo < hi");
  Domain d;
  d.kind = DomainKind::Interval;
  d.key = "interval";
  d.lo = lo;
  d.hi = hi;
  d.dim = 1;
  d.hausdorff_dim = 0.0;
  d.convexity = ConvexityClass::C11;
  return d;
}

Domain make_disk(const Point& center, double radius) {
  if (!(radius > 0)) throw GeometryError("disk radius must be positive");
  Domain d;
  d.kind = DomainKind::Disk;
  d.key = "disk";
  d.center = center;
  d.radius = radius;
  d.dim = 2;
  d.hausdorff_dim = 1.0;
  d.convexity = ConvexityClass::C11;
  return d;
}

Domain make_convex_polygon(std::vector<Point> vertices, std::string key) {
  check_convex_ccw(vertices);
  Domain d;
  d.kind = DomainKind::ConvexPolygon;
  d.key = std::move(key);
  d.vertices = std::move(vertices);
  d.dim = 2;
  d.hausdorff_dim = 1.0;
  d.convexity = ConvexityClass::Convex;
  return d;
}

Domain make_polygon_complement(std::vector<Point> vertices, std::string key) {
  check_convex_ccw(vertices);
  Domain d;
  d.kind = DomainKind::PolygonComplement;
  d.key = std::move(key);
  d.vertices = std::move(vertices);
  d.dim = 2;
  d.hausdorff_dim = 1.0;
  d.convexity = ConvexityClass::ConvexComplement;
  return d;
}

Domain make_wedge_complement(double alpha) {
  if (!(alpha > 0 && alpha < std::numbers::pi)) {
    throw GeometryError("wedge angle must lie in (0, pi)");
  }
  Domain d;
  d.kind = DomainKind::WedgeComplement;
  std::ostringstream key;
  key.precision(17);
  key << "wedge-complement(alpha=" << alpha << ")";
  d.key = key.str();
  d.alpha = alpha;
  d.dim = 2;
  d.hausdorff_dim = 1.0;
  d.convexity = ConvexityClass::ConvexComplement;
  return d;
}

Domain make_half_plane() {
  Domain d;
  d.kind = DomainKind::HalfPlane;
  d.key = "half-plane";
  d.dim = 2;
  d.hausdorff_dim = 1.0;
  d.convexity = ConvexityClass::C11;
  return d;
}

Domain make_koch() {
  Domain d;
  d.kind = DomainKind::Koch;
  d.key = "koch";
  d.dim = 2;
  d.hausdorff_dim = std::log(4.0) / std::log(3.0);
  d.convexity = ConvexityClass::Other;
  d.uniformity_note = "interior of the von Koch snowflake is a uniform domain; sigma not computed";
  return d;
}

Domain domain_from_key(const std::string& key) {
  if (key == "interval") return make_interval(0.0, 1.0);
  if (key == "disk") return make_disk(Point::Zero(), 1.0);
  if (key == "square") {
    return make_convex_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "square");
  }
  if (key == "triangle") {
    return make_convex_polygon({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}}, "triangle");
  }
  if (key == "hexagon") {
    std::vector<Point> v;
    for (int i = 0; i < 6; ++i) {
      const double a = std::numbers::pi / 3 * i;
      v.emplace_back(std::cos(a), std::sin(a));
    }
    return make_convex_polygon(std::move(v), "hexagon");
  }
  if (key == "square-complement") {
    return make_polygon_complement({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, "square-complement");
  }
  if (key == "half-plane") return make_half_plane();
  if (key == "koch") return make_koch();
  static const std::regex wedge(R"(wedge-complement\(\s*alpha\s*=\s*([^)\s]+)\s*\))");
  std::smatch m;
  if (std::regex_match(key, m, wedge)) {
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(m[1].str(), &used);
    } catch (const std::exception&) {
      throw ValidationError("bad wedge angle in '" + key + "'");
    }
    if (used != m[1].str().size()) throw ValidationError("bad wedge angle in '" + key + "'");
    Domain d = make_wedge_complement(alpha);
    d.key = key;
    return d;
  }
  throw ValidationError("unknown domain key '" + key + "'");
}

std::vector<std::string> catalogue_keys() {
  return {"interval",  "disk",       "square",          "triangle",
          "hexagon",   "square-complement", "wedge-complement(alpha=...)",
          "half-plane", "koch"};
}

bool contains_closure(const Domain& domain, const Point& p, double tol) {
  switch (domain.kind) {
    case DomainKind::Interval:
      return p.x() >= domain.lo - tol && p.x() <= domain.hi + tol;
    case DomainKind::Disk:
      return (p - domain.center).norm() <= domain.radius + tol;
    case DomainKind::ConvexPolygon: {
      for (const auto& line : polygon_lines(domain.vertices)) {
        if (line.eval(p) < -tol) return false;
      }
      return true;
    }
    case DomainKind::PolygonComplement: {
      for (const auto& line : polygon_lines(domain.vertices)) {
        if (line.eval(p) <= tol) return true;
      }
      return false;
    }
    case DomainKind::WedgeComplement:
      return !in_wedge(domain.alpha, p, tol);
    case DomainKind::HalfPlane:
      return p.y() >= -tol;
    case DomainKind::Koch:
      throw UnsupportedKindError("the Koch domain carries metadata only");
  }
  return false;
}

NearestFace nearest_face(const Domain& domain, const Point& p) {
  switch (domain.kind) {
    case DomainKind::ConvexPolygon: {
      const auto lines = polygon_lines(domain.vertices);
      NearestFace best;
      best.distance = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < lines.size(); ++i) {
        const double dist = lines[i].eval(p);
        if (dist < -kTieTol) throw DomainMembershipError("point outside the polygon");
        if (dist < best.distance) {
          best.distance = dist;
          best.index = static_cast<int>(i);
        }
      }
      best.distance = std::max(best.distance, 0.0);
      return best;
    }
    case DomainKind::PolygonComplement: {
      if (!contains_closure(domain, p, kTieTol)) {
        throw DomainMembershipError("point inside the removed polygon");
      }
      NearestFace best = complement_nearest(domain.vertices, p);
      best.distance = std::max(best.distance, 0.0);
      return best;
    }
    case DomainKind::WedgeComplement: {
      if (!contains_closure(domain, p, kTieTol)) {
        throw DomainMembershipError("point inside the removed wedge");
      }
      return wedge_nearest(domain.alpha, p);
    }
    case DomainKind::HalfPlane: {
      if (p.y() < -kTieTol) throw DomainMembershipError("point below the half-plane");
      return {NearestFace::Type::Face, 0, std::max(p.y(), 0.0)};
    }
    default:
      throw UnsupportedKindError("nearest_face needs a polygonal domain, got " +
                                 to_string(domain.kind));
  }
}

double signed_distance(const Domain& domain, const Point& p) {
  switch (domain.kind) {
    case DomainKind::Interval: {
      const double x = p.x();
      if (x < domain.lo - kTieTol || x > domain.hi + kTieTol) {
        throw DomainMembershipError("point outside the interval");
      }
      return std::max(0.0, std::min(x - domain.lo, domain.hi - x));
    }
    case DomainKind::Disk: {
      const double d = domain.radius - (p - domain.center).norm();
      if (d < -kTieTol) throw DomainMembershipError("point outside the disk");
      return std::max(d, 0.0);
    }
    case DomainKind::Koch:
      throw UnsupportedKindError("the Koch domain carries metadata only");
    default:
      return nearest_face(domain, p).distance;
  }
}

double signed_distance(const Domain& domain, double x) {
  return signed_distance(domain, Point(x, 0.0));
}

Point distance_gradient(const Domain& domain, const Point& p) {
  switch (domain.kind) {
    case DomainKind::Interval:
      return Point(p.x() - domain.lo <= domain.hi - p.x() ? 1.0 : -1.0, 0.0);
    case DomainKind::Disk: {
      const Point v = p - domain.center;
      const double n = v.norm();
      if (n == 0.0) return Point::Zero();
      return -v / n;
    }
    case DomainKind::ConvexPolygon: {
      const auto nf = nearest_face(domain, p);
      return polygon_lines(domain.vertices)[nf.index].normal;
    }
    case DomainKind::PolygonComplement: {
      const auto nf = nearest_face(domain, p);
      const auto& v = domain.vertices;
      if (nf.type == NearestFace::Type::Vertex) {
        const Point w = p - v[nf.index];
        return w.norm() > 0 ? Point(w / w.norm()) : Point(Point::Zero());
      }
      return Point(-polygon_lines(v)[nf.index].normal);
    }
    case DomainKind::WedgeComplement: {
      const auto nf = wedge_nearest(domain.alpha, p);
      if (nf.type == NearestFace::Type::Vertex) {
        return p.norm() > 0 ? Point(p / p.norm()) : Point(Point::Zero());
      }
      const double half = domain.alpha / 2;
      if (nf.index == 0) return Point(-std::sin(half), std::cos(half));
      return Point(-std::sin(half), -std::cos(half));
    }
    case DomainKind::HalfPlane:
      return Point(0.0, 1.0);
    case DomainKind::Koch:
      break;
  }
  throw UnsupportedKindError("distance gradient unavailable for " + to_string(domain.kind));
}

double inradius(const Domain& domain) {
  if (domain.kind == DomainKind::Disk) return domain.radius;
  if (domain.kind == DomainKind::Interval) return (domain.hi - domain.lo) / 2;
  if (domain.kind != DomainKind::ConvexPolygon) {
    throw UnsupportedKindError("inradius needs a bounded convex domain");
  }
  const auto lines = polygon_lines(domain.vertices);
  const auto n = lines.size();
  double best = 0.0;
  // the maximal inscribed disk touches at least three lines (or two parallel ones)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        Eigen::Matrix3d m;
        Eigen::Vector3d rhs;
        const std::size_t idx[3] = {i, j, k};
        for (int row = 0; row < 3; ++row) {
          const auto& l = lines[idx[row]];
          m(row, 0) = l.normal.x();
          m(row, 1) = l.normal.y();
          m(row, 2) = -1.0;
          rhs(row) = -l.offset;
        }
        if (std::abs(m.determinant()) < 1e-14) continue;
        const Eigen::Vector3d sol = m.partialPivLu().solve(rhs);
        const Point c(sol(0), sol(1));
        double rad = std::numeric_limits<double>::infinity();
        for (const auto& l : lines) rad = std::min(rad, l.eval(c));
        best = std::max(best, rad);
      }
    }
  }
  return best;
}

bool is_tangential(const Domain& domain) {
  if (domain.kind != DomainKind::ConvexPolygon) return false;
  const double rin = inradius(domain);
  const auto lines = polygon_lines(domain.vertices);
  const auto n = lines.size();
  Eigen::MatrixXd m(n, 2);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, 0) = lines[i].normal.x();
    m(i, 1) = lines[i].normal.y();
    rhs(i) = rin - lines[i].offset;
  }
  const Eigen::Vector2d center = m.colPivHouseholderQr().solve(rhs);
  for (const auto& l : lines) {
    if (std::abs(l.eval(center) - rin) > 1e-12 * std::max(1.0, rin)) return false;
  }
  return true;
}

FacialMembership facial_membership(const Domain& domain, const Point& p, double r) {
  if (domain.kind != DomainKind::ConvexPolygon) {
    throw UnsupportedKindError("facial_membership needs a bounded convex polygon");
  }
  if (!(r > 0)) throw ValidationError("layer depth must be positive");
  if (r >= inradius(domain)) throw LayerOverlapError("layer depth reaches the inradius");
  const auto lines = polygon_lines(domain.vertices);
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = std::numeric_limits<double>::infinity();
  int face = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double d = lines[i].eval(p);
    if (d < -kTieTol) throw DomainMembershipError("point outside the polygon");
    if (d < d1) {
      d2 = d1;
      d1 = d;
      face = static_cast<int>(i);
    } else if (d < d2) {
      d2 = d;
    }
  }
  FacialMembership out;
  out.in_layer = d1 > 0.0 && d1 < r;
  out.face = out.in_layer ? face : -1;
  out.interface = out.in_layer && (d2 - d1) < kTieTol;
  return out;
}

std::vector<double> dihedral_angles(const Domain& domain) {
  if (domain.kind == DomainKind::WedgeComplement) return {domain.alpha};
  if (domain.kind != DomainKind::ConvexPolygon && domain.kind != DomainKind::PolygonComplement) {
    throw UnsupportedKindError("dihedral angles need a polygon or polygon complement");
  }
  const auto& v = domain.vertices;
  const auto n = v.size();
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = v[(i + n - 1) % n];
    const Point& cur = v[i];
    const Point& next = v[(i + 1) % n];
    const Point a = prev - cur;
    const Point b = next - cur;
    const double s = cross(b, a);
    if (std::abs(s) <= 1e-14 * a.norm() * b.norm()) {
      throw GeometryError("collinear vertices");
    }
    out.push_back(std::atan2(std::abs(s), a.dot(b)));
  }
  return out;
}

int FacialDecomposition::face_of(const Point& p) const {
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double d = lines[i].eval(p);
    if (d < dist) {
      dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

bool FacialDecomposition::contains(const Point& p, double tol) const {
  for (const auto& l : lines) {
    if (l.eval(p) < -tol) return false;
  }
  return true;
}

FacialDecomposition facial_decomposition(const Domain& domain) {
  if (domain.kind != DomainKind::ConvexPolygon) {
    throw UnsupportedKindError("facial decomposition needs a bounded convex polygon");
  }
  FacialDecomposition fd;
  fd.lines = polygon_lines(domain.vertices);
  const auto n = fd.lines.size();
  for (std::size_t j = 0; j < n; ++j) {
    // faces j and j+1 meet at vertex j+1
    const std::size_t k = (j + 1) % n;
    Interface itf;
    itf.j = static_cast<int>(j);
    itf.k = static_cast<int>(k);
    itf.origin = domain.vertices[k];
    itf.direction = (fd.lines[j].normal + fd.lines[k].normal).normalized();
    itf.normal = (fd.lines[j].normal - fd.lines[k].normal).normalized();
    // the bisector ends where a third face becomes nearer
    const double rate = fd.lines[j].normal.dot(itf.direction);
    double len = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < n; ++l) {
      if (l == j || l == k) continue;
      const double denom = rate - fd.lines[l].normal.dot(itf.direction);
      if (denom > 0) len = std::min(len, fd.lines[l].eval(itf.origin) / denom);
    }
    itf.length = len;
    fd.interfaces.push_back(itf);
  }
  return fd;
}

}  // namespace hardy
