#include "hardy/reference.hpp"

#include "hardy/error.hpp"

#include <cmath>

namespace hardy {

double smooth_constant(double delta) {
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  if (delta == 1.0) throw ExceptionalValueError("delta = 1 is exceptional: no finite constant");
  return 2.0 / std::abs(delta - 1.0);
}

double ahlfors_lower_bound(double d, double d_H, double delta) {
  if (!(d_H >= 0 && d_H <= d)) throw ValidationError("need 0 <= d_H <= d");
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  const double denom = (d - d_H) + delta - 2.0;
  if (denom == 0.0) throw ExceptionalValueError("delta = 2 - (d - d_H) is excluded");
  return 2.0 / std::abs(denom);
}

CriticalAngles critical_angles() {
  const double q = 2.0 * gamma(0.75) / gamma(0.25);
  CriticalAngles out;
  out.beta_c = std::numbers::pi + 4.0 * std::atan(q * q);
  out.alpha_c = 2.0 * std::numbers::pi - out.beta_c;
  return out;
}

double simplex_dihedral(int d) {
  if (d < 2) throw ValidationError("simplex dimension must be >= 2");
  return std::acos(1.0 / d);
}

ThresholdReport threshold_report(ConvexityClass domain_class, double delta) {
  if (domain_class == ConvexityClass::Other) {
    throw ValidationError("threshold report needs a C11, convex or convex-complement class");
  }
  if (!(delta >= 0)) throw ValidationError("delta must be >= 0");
  if (delta == 1.0) throw ExceptionalValueError("delta = 1 is exceptional");
  ThresholdReport rep;
  rep.delta = delta;
  rep.domain_class = domain_class;
  rep.self_adjoint_sufficient = delta > 1.5;
  rep.necessary_met = delta >= 1.5;
  if (delta < 2.0) {
    const double h = std::abs(delta - 1.0) / 2.0;
    rep.beta_star = h * h;
  }
  return rep;
}

std::optional<ClosedForm> catalogue_reference(const std::string& experiment, const Domain& domain,
                                              double delta) {
  ClosedForm cf;
  cf.inputs = {{"d", double(domain.dim)}, {"d_H", domain.hausdorff_dim}, {"delta", delta}};
  const bool smooth_or_convex =
      domain.kind == DomainKind::Interval || domain.kind == DomainKind::Disk ||
      domain.kind == DomainKind::ConvexPolygon || domain.kind == DomainKind::HalfPlane;
  if (delta == 1.0 && experiment != "critical-angle") return std::nullopt;
  if (experiment == "boundary-constant" || experiment == "local" || experiment == "weak-curve") {
    if (smooth_or_convex) {
      if (experiment == "weak-curve" && delta >= 2.0) return std::nullopt;
      cf.name = "boundary constant";
      cf.value = smooth_constant(delta);
      cf.provenance = "2/|delta-1| for C11 or convex boundaries";
      return cf;
    }
    if (domain.kind == DomainKind::PolygonComplement) {
      if (delta == 0.0 || delta > 1.0) {
        cf.name = "boundary constant";
        cf.value = smooth_constant(delta);
        cf.provenance = delta == 0.0 ? "2 for complements of convex polygons at delta=0"
                                     : "2/(delta-1) for complements of convex sets, delta>1";
        return cf;
      }
      return std::nullopt;
    }
    if (domain.kind == DomainKind::WedgeComplement) {
      if (delta > 1.0) {
        cf.name = "boundary constant";
        cf.value = smooth_constant(delta);
        cf.provenance = "2/(delta-1) for complements of convex sets, delta>1";
        return cf;
      }
      if (delta == 0.0 && domain.alpha >= critical_angles().alpha_c) {
        cf.name = "apex constant";
        cf.value = 2.0;
        cf.provenance = "standard value 2 for wedge angles at or above the critical angle";
        return cf;
      }
      return std::nullopt;
    }
    return std::nullopt;
  }
  if (experiment == "full-domain") {
    if ((domain.kind == DomainKind::Disk || domain.kind == DomainKind::ConvexPolygon ||
         domain.kind == DomainKind::Interval) &&
        delta < 1.0) {
      cf.name = "whole-domain constant";
      cf.value = 2.0 / (1.0 - delta);
      cf.provenance = "2/(1-delta) for convex domains, delta<1";
      return cf;
    }
    return std::nullopt;
  }
  if (experiment == "witness") {
    const double denom = (domain.dim - domain.hausdorff_dim) + delta - 2.0;
    if (denom == 0.0) return std::nullopt;
    cf.name = "Ahlfors lower bound";
    cf.value = 2.0 / std::abs(denom);
    cf.provenance = "2/|(d-d_H)+delta-2| at Ahlfors regular boundary points";
    return cf;
  }
  if (experiment == "critical-angle") {
    cf.name = "critical wedge angle";
    cf.value = critical_angles().alpha_c;
    cf.provenance = "alpha_c = pi - 4 atan((2 Gamma(3/4)/Gamma(1/4))^2)";
    return cf;
  }
  if (experiment == "semibounded") {
    if (delta < 2.0) {
      cf.name = "semiboundedness threshold";
      const double h = std::abs(delta - 1.0) / 2.0;
      cf.value = h * h;
      cf.provenance = "beta* = a(Gamma)^-2 = ((delta-1)/2)^2";
      return cf;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

KochComparison koch_comparison() {
  KochComparison k;
  k.hausdorff_dim = std::log(4.0) / std::log(3.0);
  k.formula_value = ahlfors_lower_bound(2.0, k.hausdorff_dim, 0.0);
  k.stated_value = std::log(4.0) / std::log(3.0);
  return k;
}

std::vector<SimplexRow> simplex_comparison(int d_max) {
  if (d_max < 2) throw ValidationError("d_max must be >= 2");
  const double ac = critical_angles().alpha_c;
  std::vector<SimplexRow> rows;
  for (int d = 2; d <= d_max; ++d) {
    SimplexRow row;
    row.d = d;
    row.dihedral = simplex_dihedral(d);
    row.alpha_c = ac;
    row.below_critical = row.dihedral < ac;
    row.anomalous_as_stated = d >= 7;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hardy
