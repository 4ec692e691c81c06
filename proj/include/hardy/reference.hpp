#pragma once

#include "hardy/geometry.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardy {

/// 2 / |delta - 1|.
double smooth_constant(double delta);

/// 2 / |(d - d_H) + delta - 2|.
double ahlfors_lower_bound(double d, double d_H, double delta);

/// Gamma function by the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula below 1/2. Requires x > 0.
template <class T>
T gamma(T x);

struct CriticalAngles {
  double beta_c = 0.0;
  double alpha_c = 0.0;
};

/// beta_c = pi + 4 atan((2 Gamma(3/4) / Gamma(1/4))^2), alpha_c = 2 pi - beta_c.
CriticalAngles critical_angles();

/// Dihedral angle arccos(1/d) of the regular d-simplex.
double simplex_dihedral(int d);

struct ThresholdReport {
  double delta = 0.0;
  ConvexityClass domain_class = ConvexityClass::C11;
  bool self_adjoint_sufficient = false;  // delta > 3/2
  bool necessary_met = false;            // delta >= 3/2
  std::optional<double> beta_star;       // (|delta - 1| / 2)^2 for delta in [0, 2)
};

ThresholdReport threshold_report(ConvexityClass domain_class, double delta);

struct ClosedForm {
  std::string name;
  std::map<std::string, double> inputs;
  double value = 0.0;
  std::string provenance;
};

/// Closed-form value of the constant estimated by an experiment, when one
/// is known for the domain and weight.
std::optional<ClosedForm> catalogue_reference(const std::string& experiment, const Domain& domain,
                                              double delta);

struct KochComparison {
  double hausdorff_dim = 0.0;
  double formula_value = 0.0;  // 2 / |2 - d_H - 2|
  double stated_value = 0.0;   // log 4 / log 3
};

KochComparison koch_comparison();

struct SimplexRow {
  int d = 0;
  double dihedral = 0.0;
  double alpha_c = 0.0;
  bool below_critical = false;      // anomalous by the dihedral criterion
  bool anomalous_as_stated = false; // the d >= 7 reading
};

std::vector<SimplexRow> simplex_comparison(int d_max);

// ---------------------------------------------------------------------------

template <class T>
T gamma(T x) {
  using std::sin;
  using std::pow;
  using std::exp;
  using std::sqrt;
  if (!(x > T(0))) throw std::domain_error("gamma: argument must be positive");
  const T pi = T(std::numbers::pi);
  if (x < T(0.5)) return pi / (sin(pi * x) * gamma(T(1) - x));
  static const double c[9] = {0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
                              771.32342877765313,   -176.61502916214059,  12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const T y = x - T(1);
  T a = T(c[0]);
  const T g = T(7);
  for (int i = 1; i < 9; ++i) a += T(c[i]) / (y + T(i));
  const T t = y + g + T(0.5);
  return sqrt(T(2) * pi) * pow(t, y + T(0.5)) * exp(-t) * a;
}

}  // namespace hardy
