#pragma once

#include <Eigen/Core>

#include <vector>

namespace hardy {

struct QuadRule1D {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule with n points mapped to [0, 1]. Supported n: 1..10,
/// 12, 16, 20, 24, 32.
QuadRule1D gauss_legendre(int n);

struct QuadRuleTri {
  std::vector<Eigen::Vector2d> points;  // barycentric (l1, l2) on the unit triangle
  std::vector<double> weights;          // sum to 1
};

/// Symmetric 6-point degree-4 rule, optionally applied on `splits` levels of
/// uniform subdivision (6 * 4^splits points).
QuadRuleTri triangle_rule(int splits = 0);

}  // namespace hardy
