#include "hardy/quadrature.hpp"

#include "hardy/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <numeric>
#include <string>

namespace hardy {

namespace {

template <unsigned N>
QuadRule1D from_boost() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      pts.emplace_back(0.5, w[i] / 2);
    } else {
      pts.emplace_back(0.5 * (1 - x[i]), w[i] / 2);
      pts.emplace_back(0.5 * (1 + x[i]), w[i] / 2);
    }
  }
  std::sort(pts.begin(), pts.end());
  QuadRule1D rule;
  for (const auto& [node, weight] : pts) {
    rule.nodes.push_back(node);
    rule.weights.push_back(weight);
  }
  return rule;
}

}  // namespace

QuadRule1D gauss_legendre(int n) {
  switch (n) {
    case 1: return {{0.5}, {1.0}};
    case 2: return from_boost<2>();
    case 3: return from_boost<3>();
    case 4: return from_boost<4>();
    case 5: return from_boost<5>();
    case 6: return from_boost<6>();
    case 7: return from_boost<7>();
    case 8: return from_boost<8>();
    case 9: return from_boost<9>();
    case 10: return from_boost<10>();
    case 12: return from_boost<12>();
    case 16: return from_boost<16>();
    case 20: return from_boost<20>();
    case 24: return from_boost<24>();
    case 32: return from_boost<32>();
    default: break;
  }
  throw ValidationError("unsupported Gauss-Legendre order " + std::to_string(n));
}

QuadRuleTri triangle_rule(int splits) {
  if (splits < 0 || splits > 4) throw ValidationError("triangle rule subdivision out of range");
  QuadRuleTri base;
  const double a1 = 0.445948490915965, w1 = 0.223381589678011;
  const double a2 = 0.091576213509771, w2 = 0.109951743655322;
  base.points = {{a1, a1}, {1 - 2 * a1, a1}, {a1, 1 - 2 * a1},
                 {a2, a2}, {1 - 2 * a2, a2}, {a2, 1 - 2 * a2}};
  base.weights = {w1, w1, w1, w2, w2, w2};
  const double total = std::accumulate(base.weights.begin(), base.weights.end(), 0.0);
  for (auto& w : base.weights) w /= total;
  if (splits == 0) return base;
  // composite rule over m*m congruent sub-triangles
  const int m = 1 << splits;
  QuadRuleTri out;
  const double scale = 1.0 / (double(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; i + j < m; ++j) {
      // upright sub-triangle with corner (i, j)
      const Eigen::Vector2d o(double(i) / m, double(j) / m);
      for (std::size_t q = 0; q < base.points.size(); ++q) {
        out.points.push_back(o + base.points[q] / m);
        out.weights.push_back(base.weights[q] * scale);
      }
      if (i + j + 1 < m) {
        // inverted sub-triangle
        const Eigen::Vector2d c(double(i + 1) / m, double(j + 1) / m);
        for (std::size_t q = 0; q < base.points.size(); ++q) {
          out.points.push_back(c - base.points[q] / m);
          out.weights.push_back(base.weights[q] * scale);
        }
      }
    }
  }
  return out;
}

}  // namespace hardy
