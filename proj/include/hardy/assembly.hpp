#pragma once

#include "hardy/geometry.hpp"
#include "hardy/mesh.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>

namespace hardy {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Weighted stiffness A, singular mass B and plain mass B0 over the free nodes.
struct SparseSystem {
  SpMat A;
  SpMat B;
  SpMat B0;
  double delta = 0.0;
  int quadrature_order = 0;  // points per element
};

struct AssemblyOptions {
  int gauss_points_1d = 4;
  int triangle_splits = 0;  // 6 * 4^splits points per triangle
  /// Replaces the exact distance at quadrature points when set; arguments
  /// are the physical point and the exact distance.
  std::function<double(const Point&, double)> distance_override;
};

/// Quadrature point on an element with everything assembly needs.
struct QuadPoint {
  int element = 0;
  double weight = 0.0;      // includes the Jacobian
  double distance = 0.0;
  Point x = Point::Zero();
  Eigen::Vector2d t_u = Eigen::Vector2d::Zero();
  std::array<double, 3> shape{0, 0, 0};
  std::array<Point, 3> grad{Point::Zero(), Point::Zero(), Point::Zero()};
};

void for_each_quadrature_point(const Mesh& mesh, const AssemblyOptions& options,
                               const std::function<void(const QuadPoint&)>& visit);

SparseSystem assemble_system(const Mesh& mesh, const Domain& domain, double delta,
                             const AssemblyOptions& options = {});

/// Coordinate dump "i j value" with 17 significant digits.
void dump_matrix(const SpMat& m, std::ostream& out);

}  // namespace hardy
