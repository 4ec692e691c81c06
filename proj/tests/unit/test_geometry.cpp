#include "hardy/error.hpp"
#include "hardy/geometry.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace hardy;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Face distances sorted ascending, for polygons and their complements.
std::vector<double> face_distances(const Domain& d, const Point& p) {
  std::vector<double> out;
  const auto& v = d.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(segment_distance(p, v[i], v[(i + 1) % v.size()]));
  std::sort(out.begin(), out.end());
  return out;
}

// Dense sampling of the boundary.
std::vector<Point> boundary_samples(const Domain& d, int count) {
  std::vector<Point> s;
  switch (d.kind) {
    case DomainKind::Disk:
      for (int i = 0; i < count; ++i) {
        const double th = 2 * pi * i / count;
        s.push_back(d.center + d.radius * Point(std::cos(th), std::sin(th)));
      }
      break;
    case DomainKind::ConvexPolygon:
    case DomainKind::PolygonComplement: {
      const auto& v = d.vertices;
      const int per = count / int(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        for (int k = 0; k < per; ++k) s.push_back(v[i] + (v[(i + 1) % v.size()] - v[i]) * (double(k) / per));
      }
      break;
    }
    case DomainKind::WedgeComplement: {
      const double half = d.alpha / 2;
      const int per = count / 2;
      for (int k = 0; k < per; ++k) {
        const double t = 10.0 * k / per;
        s.push_back(t * Point(std::cos(half), std::sin(half)));
        s.push_back(t * Point(std::cos(half), -std::sin(half)));
      }
      break;
    }
    case DomainKind::HalfPlane:
      for (int k = 0; k < count; ++k) s.emplace_back(-20.0 + 40.0 * k / count, 0.0);
      break;
    default:
      break;
  }
  return s;
}

Point random_inside(const Domain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (;;) {
    Point p(u(rng), u(rng));
    if (contains_closure(d, p) && signed_distance(d, p) > 1e-3) return p;
  }
}

}  // namespace

TEST_CASE("signed distance examples", "[geometry]") {
  CHECK(signed_distance(domain_from_key("disk"), Point(0, 0)) == Approx(1.0));
  CHECK(signed_distance(domain_from_key("interval"), 0.3) == Approx(0.3));
  CHECK(signed_distance(domain_from_key("square-complement"), Point(2, 0)) == Approx(1.0));
  CHECK(signed_distance(domain_from_key("half-plane"), Point(7, 0.25)) == Approx(0.25));
  CHECK(signed_distance(domain_from_key("wedge-complement(alpha=1.0471975511965976)"), Point(-1, 0)) ==
        Approx(1.0));
}

TEST_CASE("signed distance rejects points outside the closure", "[geometry]") {
  CHECK_THROWS_AS(signed_distance(domain_from_key("disk"), Point(2, 0)), DomainMembershipError);
  CHECK_THROWS_AS(signed_distance(domain_from_key("interval"), 1.5), DomainMembershipError);
  CHECK_THROWS_AS(signed_distance(domain_from_key("square-complement"), Point(0, 0)),
                  DomainMembershipError);
  CHECK_THROWS_AS(signed_distance(domain_from_key("koch"), Point(0, 0)), UnsupportedKindError);
}

TEST_CASE("nearest face", "[geometry]") {
  const Domain sq = domain_from_key("square");
  auto nf = nearest_face(sq, Point(0.5, 0.1));
  CHECK(nf.type == NearestFace::Type::Face);
  CHECK(nf.index == 0);
  CHECK(nf.distance == Approx(0.1));

  nf = nearest_face(sq, Point(0.5, 0.5));
  CHECK(nf.index == 0);
  CHECK(nf.distance == Approx(0.5));

  const Domain sc = domain_from_key("square-complement");
  nf = nearest_face(sc, Point(2, 2));
  CHECK(nf.type == NearestFace::Type::Vertex);
  CHECK(sc.vertices[nf.index].isApprox(Point(1, 1)));
  double brute = 1e300;
  for (const auto& b : boundary_samples(sc, 100000)) brute = std::min(brute, (b - Point(2, 2)).norm());
  CHECK(nf.distance == Approx(brute).margin(1e-4));
  CHECK(nf.distance == Approx(std::sqrt(2.0)));
}

TEST_CASE("nearest face distance equals signed distance", "[geometry]") {
  std::mt19937_64 rng(7);
  for (const char* key : {"square", "triangle", "hexagon", "square-complement", "half-plane"}) {
    const Domain d = domain_from_key(key);
    for (int i = 0; i < 200; ++i) {
      const Point p = random_inside(d, rng);
      CHECK(std::abs(nearest_face(d, p).distance - signed_distance(d, p)) <= 1e-14);
    }
  }
}

TEST_CASE("facial membership", "[geometry]") {
  const Domain sq = domain_from_key("square");
  auto m = facial_membership(sq, Point(0.5, 0.05), 0.2);
  CHECK(m.in_layer);
  CHECK(m.face == 0);
  CHECK_FALSE(m.interface);

  m = facial_membership(sq, Point(0.1, 0.1), 0.2);
  CHECK(m.in_layer);
  CHECK(m.interface);

  const Domain tri = domain_from_key("triangle");
  const Point centroid = (tri.vertices[0] + tri.vertices[1] + tri.vertices[2]) / 3.0;
  CHECK_FALSE(facial_membership(tri, centroid, 0.01).in_layer);

  CHECK_THROWS_AS(facial_membership(sq, Point(0.5, 0.1), 0.5), LayerOverlapError);
}

TEST_CASE("dihedral angles", "[geometry]") {
  for (double a : dihedral_angles(domain_from_key("square"))) CHECK(a == Approx(pi / 2));
  const auto tri = dihedral_angles(domain_from_key("triangle"));
  REQUIRE(tri.size() == 3);
  for (double a : tri) CHECK(a == Approx(pi / 3));
  const auto hex = dihedral_angles(domain_from_key("hexagon"));
  REQUIRE(hex.size() == 6);
  for (double a : hex) CHECK(a == Approx(2 * pi / 3));
  const auto wedge = dihedral_angles(make_wedge_complement(pi / 5));
  REQUIRE(wedge.size() == 1);
  CHECK(wedge[0] == Approx(pi / 5));
}

TEST_CASE("invalid polygons are rejected", "[geometry]") {
  CHECK_THROWS_AS(make_convex_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), GeometryError);
  CHECK_THROWS_AS(make_convex_polygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), GeometryError);
  CHECK_THROWS_AS(make_convex_polygon({{0, 0}, {1, 0}}), GeometryError);
  CHECK_THROWS_AS(make_wedge_complement(0.0), GeometryError);
  CHECK_THROWS_AS(make_wedge_complement(pi), GeometryError);
  CHECK_THROWS_AS(domain_from_key("no-such-domain"), ValidationError);
}

TEST_CASE("catalogue metadata", "[geometry]") {
  const Domain k = domain_from_key("koch");
  CHECK(k.hausdorff_dim == Approx(std::log(4.0) / std::log(3.0)));
  CHECK(k.uniformity_note.has_value());
  CHECK_FALSE(k.meshable());
  CHECK(domain_from_key("square").convexity == ConvexityClass::Convex);
  CHECK(domain_from_key("disk").convexity == ConvexityClass::C11);
  CHECK(domain_from_key("square-complement").convexity == ConvexityClass::ConvexComplement);
  for (const auto& key : catalogue_keys()) {
    if (key.find("...") != std::string::npos) continue;
    CHECK(domain_from_key(key).key == key);
  }
  const Domain w = make_wedge_complement(pi / 7);
  CHECK(domain_from_key(w.key).alpha == w.alpha);
}

TEST_CASE("distance field has unit gradient away from the ridge", "[geometry][property]") {
  std::mt19937_64 rng(11);
  const double step = 1e-6;
  for (const char* key : {"disk", "square", "triangle", "hexagon", "square-complement", "half-plane"}) {
    const Domain d = domain_from_key(key);
    int tested = 0;
    for (int i = 0; i < 400 && tested < 100; ++i) {
      const Point p = random_inside(d, rng);
      if (d.kind == DomainKind::ConvexPolygon || d.kind == DomainKind::PolygonComplement) {
        const auto f = face_distances(d, p);
        if (f[1] - f[0] <= 1e-3) continue;
      }
      if (d.kind == DomainKind::Disk && p.norm() < 1e-3) continue;
      if (signed_distance(d, p) < 2 * step) continue;
      const Point gx(step, 0), gy(0, step);
      const Point fd((signed_distance(d, Point(p + gx)) - signed_distance(d, Point(p - gx))) / (2 * step),
                     (signed_distance(d, Point(p + gy)) - signed_distance(d, Point(p - gy))) / (2 * step));
      CHECK(std::abs(fd.norm() - 1.0) < 1e-5);
      CHECK((distance_gradient(d, p) - fd).norm() < 1e-5);
      ++tested;
    }
    CHECK(tested > 50);
  }
}

TEST_CASE("signed distance matches a brute-force boundary minimum", "[geometry][property]") {
  std::mt19937_64 rng(3);
  const double alpha = pi / 3;
  std::vector<Domain> domains;
  for (const char* key : {"disk", "square", "triangle", "hexagon", "square-complement", "half-plane"}) {
    domains.push_back(domain_from_key(key));
  }
  domains.push_back(make_wedge_complement(alpha));
  for (const auto& d : domains) {
    const auto samples = boundary_samples(d, 100000);
    for (int i = 0; i < 25; ++i) {
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      Point p(u(rng), u(rng));
      if (!contains_closure(d, p)) continue;
      double brute = 1e300;
      for (const auto& b : samples) brute = std::min(brute, (b - p).norm());
      CHECK(signed_distance(d, p) == Approx(brute).margin(1e-4));
    }
  }
  // interval: the boundary is the two endpoints
  for (double x : {0.01, 0.3, 0.5, 0.77, 0.999}) {
    CHECK(signed_distance(domain_from_key("interval"), x) == Approx(std::min(x, 1 - x)));
  }
}

TEST_CASE("interfaces: equal face distances and matched normal derivatives", "[geometry][property]") {
  for (const char* key : {"square", "triangle", "hexagon"}) {
    const Domain d = domain_from_key(key);
    const FacialDecomposition fd = facial_decomposition(d);
    REQUIRE(fd.interfaces.size() == d.vertices.size());
    for (const auto& I : fd.interfaces) {
      const Point nj = fd.lines[I.j].normal;
      const Point nk = fd.lines[I.k].normal;
      CHECK(std::abs(I.normal.norm() - 1.0) < 1e-14);
      CHECK(std::abs(I.normal.dot(nj - nk) - (nj - nk).norm()) < 1e-12);
      for (int q = 1; q < 16; ++q) {
        const Point x = I.origin + (I.length * q / 16.0) * I.direction;
        // d_j = d_k on the interface
        CHECK(std::abs(fd.lines[I.j].eval(x) - fd.lines[I.k].eval(x)) < 1e-12);
        CHECK(std::abs(fd.lines[I.j].eval(x) - signed_distance(d, x)) < 1e-12);
        // common-normal flux identity
        CHECK(std::abs(nj.dot(I.normal) + nk.dot(I.normal)) < 1e-12);
        // derivatives along the outward normals of S_j and S_k agree and are positive
        const double out_j = nj.dot(I.normal);
        const double out_k = nk.dot(-I.normal);
        CHECK(std::abs(out_j - out_k) < 1e-12);
        CHECK(out_j > 0);
      }
    }
  }
}

TEST_CASE("inradius and tangential polygons", "[geometry]") {
  CHECK(inradius(domain_from_key("square")) == Approx(0.5));
  CHECK(inradius(domain_from_key("triangle")) == Approx(std::sqrt(3.0) / 6));
  CHECK(is_tangential(domain_from_key("square")));
  CHECK(is_tangential(domain_from_key("hexagon")));
  CHECK_FALSE(is_tangential(make_convex_polygon({{0, 0}, {2, 0}, {2, 1}, {0, 1}})));
}
