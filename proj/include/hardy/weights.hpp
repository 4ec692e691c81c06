#pragma once

#include "hardy/geometry.hpp"

#include <vector>

namespace hardy {

/// Weight d^(delta + power_offset); offset 0 for the gradient weight and -2
/// for the singular mass weight.
struct WeightSpec {
  double delta = 0.0;
  double power_offset = 0.0;

  double exponent() const { return delta + power_offset; }
  void validate() const;
};

double weight_at_distance(const WeightSpec& spec, double d);
double weight_eval(const Domain& domain, const WeightSpec& spec, const Point& p);

/// Logarithmic cutoff: 0 below 1/n, log(n t)/log(n) on [1/n, 1], 1 above.
double xi_n(double t, double n);
double xi_n_derivative(double t, double n);

/// Cubic smoothstep profile: 1 on [0, 1/2], decreasing to 0 at 1.
double chi(double t);
double chi_derivative(double t);

/// Boundary patch A = boundary intersected with the ball B(center, radius),
/// represented by samples.
struct WitnessPatch {
  Point center = Point::Zero();
  double radius = 0.25;
  std::vector<Point> samples;

  /// Distance from p to A; optionally the gradient of that distance.
  double distance(const Point& p, Point* gradient = nullptr) const;
};

WitnessPatch make_witness_patch(const Domain& domain, const Point& center, double radius,
                                int sample_count = 2048);

struct WitnessParams {
  long n = 2;
  double r = 1.0;
  WitnessPatch patch;

  void validate() const;
};

struct WitnessValue {
  double value = 0.0;
  Point gradient = Point::Zero();
};

/// psi_n(p) = xi_n(d/r) * chi(d_A/s).
double witness_function(const Domain& domain, const WitnessParams& params, const Point& p);

/// psi_n and its gradient given the boundary distance d and its gradient at p.
WitnessValue witness_with_gradient(const WitnessParams& params, const Point& p, double d,
                                   const Point& grad_d);

}  // namespace hardy
