#include "hardy/error.hpp"
#include "hardy/weights.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace hardy;
using Catch::Approx;

TEST_CASE("weight evaluation", "[weights]") {
  CHECK(weight_eval(domain_from_key("disk"), {2.0, 0.0}, Point(0, 0)) == Approx(1.0));
  CHECK(weight_eval(domain_from_key("interval"), {0.0, -2.0}, Point(0.5, 0)) == Approx(4.0));
  for (const char* key : {"disk", "square", "square-complement"}) {
    const Domain d = domain_from_key(key);
    const Point p = d.kind == DomainKind::PolygonComplement ? Point(1.7, 0.2) : Point(0.4, 0.3);
    CHECK(weight_eval(d, {0.0, 0.0}, p) == 1.0);
  }
  CHECK(weight_at_distance({1.5, -2.0}, 0.25) == Approx(2.0));
}

TEST_CASE("singular weights reject the boundary", "[weights]") {
  CHECK_THROWS_AS(weight_at_distance({0.0, -2.0}, 0.0), SingularityError);
  CHECK_THROWS_AS(weight_eval(domain_from_key("interval"), {0.5, -2.0}, Point(0, 0)), SingularityError);
  CHECK(weight_at_distance({2.0, 0.0}, 0.0) == 0.0);
  CHECK_THROWS_AS(WeightSpec({-1.0, 0.0}).validate(), ValidationError);
}

TEST_CASE("cutoff profiles", "[weights]") {
  CHECK(xi_n(0.5 / 100, 100) == 0.0);
  CHECK(xi_n(2.0, 100) == 1.0);
  CHECK(xi_n(1.0 / std::sqrt(100.0), 100) == Approx(0.5));
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(0.5) == 1.0);
  CHECK(chi(0.75) == Approx(0.5));
  CHECK(chi(1.0) == 0.0);
  for (double t = 0.51; t < 1.0; t += 0.01) {
    const double fd = (chi(t + 1e-7) - chi(t - 1e-7)) / 2e-7;
    CHECK(chi_derivative(t) == Approx(fd).margin(1e-6));
  }
  for (double t = 0.011; t < 1.0; t += 0.05) {
    const double fd = (xi_n(t + 1e-8, 100) - xi_n(t - 1e-8, 100)) / 2e-8;
    CHECK(xi_n_derivative(t, 100) == Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("witness function examples", "[weights]") {
  const Domain sq = domain_from_key("square");
  const double r = 0.1;
  const long n = 100;
  const WitnessPatch patch = make_witness_patch(sq, Point(0.5, 0.0), 1.0);
  const WitnessParams params{n, r, patch};

  // inside the dead zone of xi_n
  CHECK(witness_function(sq, params, Point(0.5, r / (2 * n))) == 0.0);
  // d >= r and d_A <= 1/2
  CHECK(witness_function(sq, params, Point(0.5, 0.2)) == Approx(1.0));
  // d = r / sqrt(n)
  CHECK(witness_function(sq, params, Point(0.5, r / std::sqrt(double(n)))) == Approx(0.5));
}

TEST_CASE("witness parameters are validated", "[weights]") {
  const WitnessPatch patch = make_witness_patch(domain_from_key("square"), Point(0.5, 0.0), 0.25);
  CHECK_THROWS_AS(WitnessParams({1, 0.1, patch}).validate(), ValidationError);
  CHECK_THROWS_AS(WitnessParams({10, 0.0, patch}).validate(), ValidationError);
}

TEST_CASE("witness function properties", "[weights][property]") {
  const Domain sq = domain_from_key("square");
  const double r = 0.05;
  const double s = 0.25;
  const WitnessPatch patch = make_witness_patch(sq, Point(0.5, 0.0), s);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(0.0, 0.5);
  for (int i = 0; i < 2000; ++i) {
    const Point p(ux(rng), uy(rng));
    const double d = signed_distance(sq, p);
    double prev = -1.0;
    for (long n : {10L, 100L, 1000L, 10000L}) {
      const double v = witness_function(sq, {n, r, patch}, p);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v >= prev);
      prev = v;
      if (v != 0.0) {
        CHECK(d >= r / double(n));
        CHECK(patch.distance(p) <= s);
      }
    }
  }
}

TEST_CASE("witness gradient is bounded on the smooth pieces", "[weights][property]") {
  const Domain sq = domain_from_key("square");
  const double r = 0.05;
  const double s = 0.25;
  const long n = 1000;
  const WitnessPatch patch = make_witness_patch(sq, Point(0.5, 0.0), s);
  const WitnessParams params{n, r, patch};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(0.3, 0.7), uy(0.0, 0.2);
  const double step = 1e-8;
  int tested = 0;
  for (int i = 0; i < 2000; ++i) {
    const Point p(ux(rng), uy(rng));
    const double d = signed_distance(sq, p);
    if (d < 2 * r / n || std::abs(d - r) < 1e-6) continue;
    const Point gx(step, 0), gy(0, step);
    const Point g((witness_function(sq, params, p + gx) - witness_function(sq, params, p - gx)) / (2 * step),
                  (witness_function(sq, params, p + gy) - witness_function(sq, params, p - gy)) / (2 * step));
    const double bound = 1.0 / (std::min(d, r) * std::log(double(n))) + 3.0 / s;
    CHECK(g.norm() <= bound * (1 + 1e-3));
    const WitnessValue w = witness_with_gradient(params, p, d, distance_gradient(sq, p));
    CHECK((w.gradient - g).norm() <= 1e-4 * std::max(1.0, g.norm()));
    ++tested;
  }
  CHECK(tested > 1000);
}

TEST_CASE("witness patch distance", "[weights]") {
  const Domain sq = domain_from_key("square");
  const WitnessPatch patch = make_witness_patch(sq, Point(0.5, 0.0), 0.25);
  CHECK(patch.distance(Point(0.5, 0.1)) == Approx(0.1).margin(1e-6));
  CHECK(patch.distance(Point(0.9, 0.0)) == Approx(0.15).margin(1e-3));
  const Domain disk = domain_from_key("disk");
  const WitnessPatch arc = make_witness_patch(disk, Point(1.0, 0.0), 0.25);
  CHECK(arc.distance(Point(0.8, 0.0)) == Approx(0.2).margin(1e-6));
  const Domain I = domain_from_key("interval");
  const WitnessPatch end = make_witness_patch(I, Point(0.0, 0.0), 0.25);
  CHECK(end.distance(Point(0.3, 0.0)) == Approx(0.3));
}
