#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace hardy {

using Point = Eigen::Vector2d;

enum class DomainKind {
  Interval,
  Disk,
  ConvexPolygon,
  PolygonComplement,
  WedgeComplement,
  HalfPlane,
  Koch,
};

enum class ConvexityClass { C11, Convex, ConvexComplement, Other };

std::string to_string(DomainKind kind);
std::string to_string(ConvexityClass cls);
ConvexityClass convexity_from_string(const std::string& name);

/// Exactly representable domain in one or two dimensions.
///
/// Polygon vertices are stored counter-clockwise. For a polygon complement
/// they describe the removed convex polygon. A wedge complement is the plane
/// minus the closed wedge of interior angle `alpha` with apex at the origin
/// and bisector along +x.
struct Domain {
  DomainKind kind = DomainKind::Interval;
  std::string key;

  double lo = 0.0;  // interval
  double hi = 1.0;

  Point center = Point::Zero();  // disk
  double radius = 1.0;

  std::vector<Point> vertices;  // polygons

  double alpha = 0.0;  // wedge complement

  int dim = 1;
  double hausdorff_dim = 0.0;
  ConvexityClass convexity = ConvexityClass::C11;
  std::optional<std::string> uniformity_note;

  bool bounded() const;
  bool meshable() const { return kind != DomainKind::Koch; }
};

Domain make_interval(double lo, double hi);
Domain make_disk(const Point& center, double radius);
Domain make_convex_polygon(std::vector<Point> vertices, std::string key = "polygon");
Domain make_polygon_complement(std::vector<Point> vertices, std::string key = "polygon-complement");
Domain make_wedge_complement(double alpha);
Domain make_half_plane();
Domain make_koch();

/// Catalogue lookup: "interval", "disk", "square", "triangle", "hexagon",
/// "square-complement", "wedge-complement(alpha=...)", "half-plane", "koch".
Domain domain_from_key(const std::string& key);
std::vector<std::string> catalogue_keys();

/// Distance to the boundary; positive inside. Throws DomainMembershipError
/// for points outside the closure.
double signed_distance(const Domain& domain, const Point& p);
double signed_distance(const Domain& domain, double x);

/// Gradient of the distance field at a point with a unique nearest boundary
/// point (unit length there).
Point distance_gradient(const Domain& domain, const Point& p);

bool contains_closure(const Domain& domain, const Point& p, double tol = 1e-12);

struct NearestFace {
  enum class Type { Face, Vertex };
  Type type = Type::Face;
  int index = 0;
  double distance = 0.0;
};

/// Minimizing face (or vertex, for reflex regions of complements).
/// Ties go to the lowest index.
NearestFace nearest_face(const Domain& domain, const Point& p);

struct FacialMembership {
  bool in_layer = false;
  int face = -1;
  bool interface = false;
};

FacialMembership facial_membership(const Domain& domain, const Point& p, double r);

/// Interior angle at each vertex, in (0, pi).
std::vector<double> dihedral_angles(const Domain& domain);

/// Line n.x + c = 0 with unit normal n pointing into the polygon.
struct FaceLine {
  Point normal;
  double offset = 0.0;
  double eval(const Point& p) const { return normal.dot(p) + offset; }
};

struct Interface {
  int j = 0;
  int k = 0;
  Point origin;     // shared vertex
  Point direction;  // unit bisector direction into the polygon
  Point normal;     // unit normal of the interface, proportional to n_j - n_k
  double length = 0.0;
};

struct FacialDecomposition {
  std::vector<FaceLine> lines;
  std::vector<Interface> interfaces;
  int face_of(const Point& p) const;
  bool contains(const Point& p, double tol = 0.0) const;
};

FacialDecomposition facial_decomposition(const Domain& domain);

/// Radius of the largest inscribed disk of a convex polygon.
double inradius(const Domain& domain);

/// True when every face touches the inscribed circle of radius inradius.
bool is_tangential(const Domain& domain);

}  // namespace hardy
