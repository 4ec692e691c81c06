#include "hardy/assembly.hpp"

#include "hardy/error.hpp"
#include "hardy/quadrature.hpp"
#include "hardy/weights.hpp"

#include <Eigen/LU>

#include <cmath>
#include <iomanip>
#include <ostream>
#include <vector>

namespace hardy {

void for_each_quadrature_point(const Mesh& mesh, const AssemblyOptions& options,
                               const std::function<void(const QuadPoint&)>& visit) {
  QuadPoint qp;
  if (mesh.dim == 1) {
    const QuadRule1D rule = gauss_legendre(options.gauss_points_1d);
    for (std::size_t ei = 0; ei < mesh.elements.size(); ++ei) {
      const Element& e = mesh.elements[ei];
      const Patch& P = mesh.patches[e.patch];
      const double t0 = e.param[0][0];
      const double t1 = e.param[1][0];
      const double len = t1 - t0;
      const double sign = P.e.x();
      qp.element = int(ei);
      qp.grad[0] = Point(-sign / len, 0.0);
      qp.grad[1] = Point(sign / len, 0.0);
      qp.grad[2] = Point::Zero();
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = rule.nodes[q];
        const double t = t0 + s * len;
        qp.t_u = Eigen::Vector2d(t, 0.0);
        qp.x = P.map(t, 0.0);
        qp.distance = P.distance(t, 0.0);
        if (options.distance_override) qp.distance = options.distance_override(qp.x, qp.distance);
        qp.weight = rule.weights[q] * std::abs(len);
        qp.shape = {1.0 - s, s, 0.0};
        visit(qp);
      }
    }
    return;
  }
  const QuadRuleTri rule = triangle_rule(options.triangle_splits);
  for (std::size_t ei = 0; ei < mesh.elements.size(); ++ei) {
    const Element& e = mesh.elements[ei];
    const Patch& P = mesh.patches[e.patch];
    Eigen::Matrix2d M;
    M.col(0) = e.param[1] - e.param[0];
    M.col(1) = e.param[2] - e.param[0];
    const double detM = M.determinant();
    const Eigen::Matrix2d Minv = M.inverse();
    // parameter gradients of the barycentric coordinates
    const Eigen::Vector2d g1 = Minv.row(0).transpose();
    const Eigen::Vector2d g2 = Minv.row(1).transpose();
    const Eigen::Vector2d g0 = -g1 - g2;
    qp.element = int(ei);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double l1 = rule.points[q][0];
      const double l2 = rule.points[q][1];
      const Eigen::Vector2d tu = e.param[0] + l1 * M.col(0) + l2 * M.col(1);
      const Eigen::Matrix2d J = P.jacobian(tu[0], tu[1]);
      const double detJ = J.determinant();
      const Eigen::Matrix2d JinvT = J.inverse().transpose();
      qp.t_u = tu;
      qp.x = P.map(tu[0], tu[1]);
      qp.distance = P.distance(tu[0], tu[1]);
      if (options.distance_override) qp.distance = options.distance_override(qp.x, qp.distance);
      qp.weight = rule.weights[q] * 0.5 * std::abs(detM) * std::abs(detJ);
      qp.shape = {1.0 - l1 - l2, l1, l2};
      qp.grad = {Point(JinvT * g0), Point(JinvT * g1), Point(JinvT * g2)};
      visit(qp);
    }
  }
}

SparseSystem assemble_system(const Mesh& mesh, const Domain& domain, double delta,
                             const AssemblyOptions& options) {
  if (mesh.dim != domain.dim) throw ValidationError("mesh and domain dimensions differ");
  const WeightSpec grad_w{delta, 0.0};
  const WeightSpec mass_w{delta, -2.0};
  grad_w.validate();
  const int nv = mesh.nodes_per_element();
  const int n = mesh.n_free;

  // sparsity pattern over free nodes
  std::vector<Eigen::Triplet<double>> pattern;
  pattern.reserve(mesh.elements.size() * nv * nv);
  for (const auto& e : mesh.elements) {
    for (int a = 0; a < nv; ++a) {
      const int ia = mesh.free_index[e.v[a]];
      if (ia < 0) continue;
      for (int b = 0; b < nv; ++b) {
        const int ib = mesh.free_index[e.v[b]];
        if (ib >= 0) pattern.emplace_back(ia, ib, 0.0);
      }
    }
  }
  SparseSystem sys;
  sys.delta = delta;
  sys.A.resize(n, n);
  sys.A.setFromTriplets(pattern.begin(), pattern.end());
  pattern.clear();
  pattern.shrink_to_fit();
  sys.A.makeCompressed();
  sys.B = sys.A;
  sys.B0 = sys.A;

  std::vector<char> active(mesh.elements.size(), 0);
  for (std::size_t ei = 0; ei < mesh.elements.size(); ++ei) {
    for (int a = 0; a < nv; ++a) active[ei] = active[ei] || mesh.free_index[mesh.elements[ei].v[a]] >= 0;
  }

  for_each_quadrature_point(mesh, options, [&](const QuadPoint& qp) {
    if (!active[qp.element]) return;
    const Element& e = mesh.elements[qp.element];
    const double wa = qp.weight * weight_at_distance(grad_w, qp.distance);
    const double wb = qp.weight * weight_at_distance(mass_w, qp.distance);
    for (int a = 0; a < nv; ++a) {
      const int ia = mesh.free_index[e.v[a]];
      if (ia < 0) continue;
      for (int b = 0; b < nv; ++b) {
        const int ib = mesh.free_index[e.v[b]];
        if (ib < 0) continue;
        const double mm = qp.shape[a] * qp.shape[b];
        sys.A.coeffRef(ia, ib) += wa * qp.grad[a].dot(qp.grad[b]);
        sys.B.coeffRef(ia, ib) += wb * mm;
        sys.B0.coeffRef(ia, ib) += qp.weight * mm;
      }
    }
  });
  sys.quadrature_order =
      mesh.dim == 1 ? options.gauss_points_1d : 6 * (1 << (2 * options.triangle_splits));
  return sys;
}

void dump_matrix(const SpMat& m, std::ostream& out) {
  const auto old = out.precision();
  out << std::setprecision(17);
  for (int i = 0; i < m.outerSize(); ++i) {
    for (SpMat::InnerIterator it(m, i); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  out.precision(old);
}

}  // namespace hardy
