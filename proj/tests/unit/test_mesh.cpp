#include "hardy/assembly.hpp"
#include "hardy/error.hpp"
#include "hardy/mesh.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace hardy;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

MeshOptions graded() {
  MeshOptions o;
  o.grading = 1.3;
  o.tangential_h = 0.25;
  return o;
}

double signed_area(const Mesh& m, const Element& e) {
  const Point a = m.vertices[e.v[0]], b = m.vertices[e.v[1]], c = m.vertices[e.v[2]];
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

}  // namespace

TEST_CASE("graded grid", "[mesh]") {
  const auto g = graded_grid(0.25, 1.0 / 64, 1.05, 80);
  REQUIRE(g.front() == 0.0);
  REQUIRE(g.back() == Approx(0.25));
  CHECK(g[1] == Approx(0.25 * std::exp(-80.0)).epsilon(0.1));
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] > g[i - 1]);
    CHECK(g[i] - g[i - 1] <= 1.0 / 64 * (1 + 1e-12));
  }
  const auto u = graded_grid(1.0, 0.25, 1.0, 80);
  CHECK(u.size() == 5);
}

TEST_CASE("interval layer mesh", "[mesh]") {
  const Domain I = domain_from_key("interval");
  const Mesh m = build_layer_mesh(I, 0.25, 1.0 / 64);
  CHECK(m.dim == 1);
  CHECK(m.n_free >= 16);
  double lo = 1e300, hi = -1e300;
  int lo_v = -1, hi_v = -1;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const double x = m.vertices[i].x();
    if (x < lo) lo = x, lo_v = int(i);
    if (x > hi) hi = x, hi_v = int(i);
  }
  CHECK(lo == 0.0);
  CHECK(hi == Approx(0.25));
  CHECK_FALSE(m.free[lo_v]);
  CHECK_FALSE(m.free[hi_v]);
}

TEST_CASE("disk layer mesh", "[mesh]") {
  const Domain D = domain_from_key("disk");
  const Mesh m = build_layer_mesh(D, 0.2, 0.04);
  CHECK(m.dim == 2);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const double d = signed_distance(D, m.vertices[i]);
    CHECK(d >= 0.0);
    CHECK(d <= 0.2 + 1e-12);
    CHECK(std::abs(d - m.vertex_distance[i]) < 1e-12);
    const double t = m.vertex_distance[i];
    if (t == 0.0 || std::abs(t - 0.2) < 1e-12) CHECK_FALSE(m.free[i]);
  }
}

TEST_CASE("wedge complement layer mesh is clipped to the box", "[mesh]") {
  const Domain W = make_wedge_complement(pi / 3);
  MeshOptions o;
  o.box = Box{-2, 2, -2, 2};
  const Mesh m = build_layer_mesh(W, 0.3, 0.05, o);
  bool touches = false;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const Point& p = m.vertices[i];
    CHECK(o.box->contains(p, 1e-12));
    CHECK(signed_distance(W, p) <= 0.3 + 1e-12);
    const double edge = std::min({p.x() + 2, 2 - p.x(), p.y() + 2, 2 - p.y()});
    if (edge < 0.06) {
      touches = true;
    }
  }
  CHECK(touches);
  // nodes on the far ends of the strips are fixed
  int on_box = 0;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const Point& p = m.vertices[i];
    const double edge = std::min({p.x() + 2, 2 - p.x(), p.y() + 2, 2 - p.y()});
    if (edge < 1e-12) {
      ++on_box;
      CHECK_FALSE(m.free[i]);
    }
  }
  CHECK(on_box > 0);
  MeshOptions no_box;
  CHECK_THROWS(build_layer_mesh(W, 0.3, 0.05, no_box));
}

TEST_CASE("resolution and kind errors", "[mesh]") {
  CHECK_THROWS_AS(build_layer_mesh(domain_from_key("interval"), 0.1, 0.05), ResolutionError);
  CHECK_THROWS_AS(build_layer_mesh(domain_from_key("koch"), 0.1, 0.01), UnsupportedKindError);
}

TEST_CASE("refinement counts", "[mesh]") {
  const Domain I = domain_from_key("interval");
  const Mesh m = make_uniform_interval_mesh(I, 16);
  REQUIRE(m.elements.size() == 16);
  const Mesh f = refine(m);
  CHECK(f.elements.size() == 32);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(f.vertices[i] == m.vertices[i]);

  const Mesh t = build_layer_mesh(domain_from_key("square"), 0.15, 0.03, graded());
  const Mesh t1 = refine(t);
  CHECK(t1.elements.size() == 4 * t.elements.size());
  for (std::size_t i = 0; i < t.vertices.size(); ++i) CHECK(t1.vertices[i] == t.vertices[i]);
  const Mesh t2 = refine(t1);
  CHECK(t2.h == Approx(t.h / 4));
  CHECK(t2.level == t.level + 2);
}

TEST_CASE("meshes are inner approximations of the layer", "[mesh][property]") {
  MeshOptions box = graded();
  box.box = Box{-3, 3, -3, 3};
  const std::vector<std::pair<Domain, double>> cases = {
      {domain_from_key("interval"), 0.25},
      {domain_from_key("disk"), 0.1},
      {domain_from_key("square"), 0.15},
      {domain_from_key("hexagon"), 0.1},
      {domain_from_key("square-complement"), 0.2},
      {make_wedge_complement(pi / 3), 0.2},
  };
  for (const auto& [d, r] : cases) {
    const Mesh m = refine(build_layer_mesh(d, r, r / 5, box));
    AssemblyOptions ao;
    double worst_top = -1e300, worst_bottom = 1e300;
    for_each_quadrature_point(m, ao, [&](const QuadPoint& q) {
      const double exact = signed_distance(d, q.x);
      CHECK(std::abs(exact - q.distance) <= 1e-12 * std::max(1.0, exact));
      worst_top = std::max(worst_top, exact - r);
      CHECK(exact >= 0.0);
      worst_bottom = std::min(worst_bottom, q.distance);
    });
    CHECK(worst_top < 0.0);
    CHECK(worst_bottom > 0.0);
  }
}

TEST_CASE("2D elements have positive orientation", "[mesh][property]") {
  MeshOptions box = graded();
  box.box = Box{-3, 3, -3, 3};
  std::vector<Mesh> meshes = {
      build_layer_mesh(domain_from_key("disk"), 0.1, 0.02, box),
      build_layer_mesh(domain_from_key("triangle"), 0.1, 0.02, box),
      build_layer_mesh(domain_from_key("square-complement"), 0.2, 0.04, box),
      build_domain_mesh(domain_from_key("disk"), 0.2, box),
      build_domain_mesh(domain_from_key("square"), 0.1, box),
      build_sector_mesh(make_wedge_complement(pi / 6), 0.25, 0.05, box),
  };
  for (const auto& m : meshes) {
    const Mesh f = refine(m);
    // the innermost graded cells underflow in physical coordinates
    for (const auto& e : f.elements) CHECK(signed_area(f, e) >= -1e-12 * f.h * f.h);
    double smallest = 1e300;
    for_each_quadrature_point(f, AssemblyOptions{}, [&](const QuadPoint& q) { smallest = std::min(smallest, q.weight); });
    CHECK(smallest > 0.0);
  }
}

TEST_CASE("prolongation reproduces coarse functions", "[mesh][property]") {
  const Mesh coarse = build_layer_mesh(domain_from_key("square"), 0.15, 0.03, graded());
  const Mesh fine = refine(coarse);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  Eigen::VectorXd free_values(coarse.n_free);
  for (auto& v : free_values) v = n01(rng);
  const Eigen::VectorXd nodal = expand_free(coarse, free_values);
  const Eigen::VectorXd fine_nodal = prolongate(fine, nodal);
  for (Eigen::Index i = 0; i < nodal.size(); ++i) CHECK(fine_nodal[i] == nodal[i]);
  // new nodes are edge midpoints in the chart: the P1 interpolant is reproduced
  for (std::size_t i = coarse.vertices.size(); i < fine.vertices.size(); ++i) {
    const auto& p = fine.parents[i - fine.parent_vertex_count];
    CHECK(fine_nodal[Eigen::Index(i)] == Approx(0.5 * (nodal[p[0]] + nodal[p[1]])));
  }
  // fixed nodes stay zero, so the coarse space is a subspace of the fine one
  for (std::size_t i = 0; i < fine.vertices.size(); ++i) {
    if (!fine.free[i]) CHECK(fine_nodal[Eigen::Index(i)] == 0.0);
  }
}

TEST_CASE("ball restriction fixes nodes near the sphere", "[mesh]") {
  const Domain sq = domain_from_key("square");
  MeshOptions o;
  o.grading = 1.3;
  const Mesh m = build_layer_mesh(sq, 0.15, 0.03, o);
  const Point x(0.5, 0.0);
  const Mesh b = restrict_to_ball(m, x, 0.1);
  CHECK(b.n_free > 0);
  CHECK(b.n_free < m.n_free);
  for (std::size_t i = 0; i < b.vertices.size(); ++i) {
    if (b.free[i]) CHECK((b.vertices[i] - x).norm() <= 0.1);
  }
  CHECK_THROWS_AS(restrict_to_ball(m, x, 1e-4), ResolutionError);
}

TEST_CASE("sector mesh", "[mesh]") {
  const Domain W = make_wedge_complement(pi / 6);
  const Mesh m = build_sector_mesh(W, 0.25, 0.05);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    CHECK(m.vertices[i].norm() <= 0.25 + 1e-12);
    CHECK(std::abs(signed_distance(W, m.vertices[i]) - m.vertex_distance[i]) < 1e-12);
    if (std::abs(m.vertices[i].norm() - 0.25) < 1e-12) CHECK_FALSE(m.free[i]);
  }
  CHECK_THROWS_AS(build_sector_mesh(domain_from_key("square"), 0.25, 0.05), UnsupportedKindError);
}

TEST_CASE("mesh dump format", "[mesh]") {
  const Mesh m = make_uniform_interval_mesh(domain_from_key("interval"), 4);
  std::ostringstream out;
  dump_mesh(m, out);
  const std::string s = out.str();
  CHECK(s.find("v 0 0") != std::string::npos);
  CHECK(s.find("e ") != std::string::npos);
  CHECK(s.find("fix ") != std::string::npos);
}
