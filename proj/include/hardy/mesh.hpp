#pragma once

#include "hardy/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace hardy {

/// Axis-aligned truncation box for unbounded domains.
struct Box {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;

  bool contains(const Point& p, double tol = 0.0) const {
    return p.x() >= xmin - tol && p.x() <= xmax + tol && p.y() >= ymin - tol &&
           p.y() <= ymax + tol;
  }
};

enum class PatchKind { Segment, Trapezoid, Fan, Ring, Sector };

/// Boundary-fitted chart. Parameter t is the distance to the boundary (the
/// radius for sectors) and u in [0, 1] runs along the boundary.
struct Patch {
  PatchKind kind = PatchKind::Segment;

  Point origin = Point::Zero();
  Point e = Point(1.0, 0.0);  // tangent (trapezoid), sign in x (segment)
  Point n = Point(0.0, 1.0);  // inward normal (trapezoid)
  double length = 1.0;        // face length, ring radius
  double cot_a = 0.0;
  double cot_b = 0.0;
  double phi0 = 0.0;  // fan and sector start angle
  double span = 0.0;  // signed angular span

  double t_top = 1.0;

  int link_u0 = -1;
  double link_u0_to = 0.0;
  int link_u1 = -1;
  double link_u1_to = 0.0;
  int link_top = -1;
  int collapse_t0 = -1;
  int collapse_top = -1;
  int corner_u0 = -1;
  int corner_u1 = -1;

  bool fixed_u0 = false;
  bool fixed_u1 = false;
  bool fixed_top = true;

  Point map(double t, double u) const;
  /// Columns d x / d t and d x / d u.
  Eigen::Matrix2d jacobian(double t, double u) const;
  double distance(double t, double u) const;
};

struct Element {
  int patch = 0;
  std::array<int, 3> v{-1, -1, -1};
  std::array<Eigen::Vector2d, 3> param;  // (t, u) of each corner in the patch chart
};

struct MeshOptions {
  double grading = 1.05;       // geometric ratio toward the boundary; <= 1 means uniform
  double depth = 80.0;         // grade down to t_top * exp(-depth)
  double tangential_h = 0.0;   // 0: use h
  double angular_depth = 40.0; // sector meshes, grading toward the rays
  std::optional<Box> box;
};

struct Ball {
  Point center = Point::Zero();
  double radius = 0.0;
};

struct Mesh {
  int dim = 1;
  std::vector<Point> vertices;
  std::vector<double> vertex_distance;
  std::vector<Element> elements;
  std::vector<Patch> patches;
  std::vector<char> free;       // 1 = unknown, 0 = Dirichlet-fixed
  std::vector<int> free_index;  // vertex -> unknown index or -1
  int n_free = 0;
  double h = 0.0;
  int level = 0;
  int parent_vertex_count = 0;                // vertices inherited from the parent level
  std::vector<std::array<int, 2>> parents;    // for vertices >= parent_vertex_count
  double r = 0.0;                             // layer depth, 0 for whole-domain meshes
  std::optional<Ball> ball;
  std::vector<Eigen::Vector4d> keys;          // canonical node keys (kind, id, t, u)

  int nodes_per_element() const { return dim == 1 ? 2 : 3; }
  void renumber_free();
};

/// Geometric node grid on [0, top], ascending, starting at 0: steps of at
/// most h, shrinking by the ratio q toward 0 until top * exp(-depth).
std::vector<double> graded_grid(double top, double h, double q, double depth);

Mesh build_layer_mesh(const Domain& domain, double r, double h, const MeshOptions& options = {});
Mesh build_domain_mesh(const Domain& domain, double h, const MeshOptions& options = {});
/// Intersection of a wedge complement with the ball of the given radius
/// around its apex.
Mesh build_sector_mesh(const Domain& domain, double radius, double h,
                       const MeshOptions& options = {});
/// Uniform partition of the whole interval into an even number of cells.
Mesh make_uniform_interval_mesh(const Domain& domain, int cells);

Mesh refine(const Mesh& mesh);
/// Additional Dirichlet fixing: a node stays free only if all vertices of
/// its incident elements lie in the closed ball.
Mesh restrict_to_ball(const Mesh& mesh, const Point& center, double radius);

/// Values on the refined mesh of the continuous function given by nodal
/// values on the parent mesh.
Eigen::VectorXd prolongate(const Mesh& fine, const Eigen::VectorXd& coarse_nodal);
Eigen::VectorXd expand_free(const Mesh& mesh, const Eigen::VectorXd& free_values);

void dump_mesh(const Mesh& mesh, std::ostream& out);

}  // namespace hardy
