#include "hardy/assembly.hpp"
#include "hardy/error.hpp"
#include "hardy/linalg.hpp"
#include "hardy/mesh.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace hardy;
using Catch::Approx;

namespace {

SpMat diagonal(const std::vector<double>& d) {
  SpMat M(Eigen::Index(d.size()), Eigen::Index(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) M.insert(Eigen::Index(i), Eigen::Index(i)) = d[i];
  M.makeCompressed();
  return M;
}

SpMat identity(int n) { return diagonal(std::vector<double>(n, 1.0)); }

SpMat poisson_1d(int n) {
  SpMat M(n, n);
  for (int i = 0; i < n; ++i) {
    M.insert(i, i) = 2.0;
    if (i > 0) M.insert(i, i - 1) = -1.0;
    if (i + 1 < n) M.insert(i, i + 1) = -1.0;
  }
  M.makeCompressed();
  return M;
}

SparseSystem laplacian(int cells) {
  const Domain I = domain_from_key("interval");
  AssemblyOptions o;
  o.distance_override = [](const Point&, double) { return 1.0; };
  return assemble_system(make_uniform_interval_mesh(I, cells), I, 2.0, o);
}

}  // namespace

TEST_CASE("conjugate gradients", "[linalg]") {
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(3, 1.0, 3.0);
  CHECK((cg_solve(identity(3), b, 1e-12) - b).norm() < 1e-12);
  const Eigen::VectorXd x = cg_solve(diagonal({1, 2, 4}), Eigen::VectorXd::Ones(3), 1e-12);
  CHECK(x[0] == Approx(1.0));
  CHECK(x[1] == Approx(0.5));
  CHECK(x[2] == Approx(0.25));
  const int n = 50;
  const SpMat P = poisson_1d(n);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd y = cg_solve(P, rhs, 1e-12);
  CHECK((P * y - rhs).norm() <= 1e-10 * rhs.norm());
  // exact solution of the discrete problem: y_i = (i + 1)(n - i) / 2
  for (int i = 0; i < n; ++i) CHECK(y[i] == Approx(0.5 * (i + 1) * (n - i)).epsilon(1e-9));
}

TEST_CASE("small pencils", "[linalg]") {
  const EigenResult r = smallest_eigenpair(diagonal({2, 5}), identity(2), 1e-10, 1);
  CHECK(r.converged);
  CHECK(r.lambda_min == Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(r.vector[1]) < 1e-8);

  const SpMat A = poisson_1d(20);
  const EigenResult same = smallest_eigenpair(A, A, 1e-10, 3);
  CHECK(same.lambda_min == Approx(1.0).epsilon(1e-10));

  SpMat zero(20, 20);
  const EigenResult z = smallest_eigenpair(zero, identity(20), 1e-10, 3);
  CHECK(z.lambda_min == Approx(0.0).margin(1e-10));
}

TEST_CASE("Dirichlet Laplacian on the unit interval", "[linalg]") {
  const SparseSystem s = laplacian(256);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (InnerSolver inner : {InnerSolver::Direct, InnerSolver::ConjugateGradient}) {
    EigenOptions o;
    o.inner = inner;
    const EigenResult r = smallest_eigenpair(s.A, s.B, 1e-8, 7, o);
    CHECK(r.converged);
    CHECK(r.residual < 1e-8);
    CHECK(r.lambda_min == Approx(pi2).epsilon(5e-3));
    CHECK(r.lambda_min >= pi2 * (1 - 1e-12));
    // B-normalized
    CHECK(r.vector.dot(s.B * r.vector) == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("Rayleigh quotients bound the minimum", "[linalg][property]") {
  const SparseSystem s = laplacian(64);
  const EigenResult r = smallest_eigenpair(s.A, s.B, 1e-10, 11);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n01;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x(s.A.rows());
    for (auto& v : x) v = n01(rng);
    CHECK(rayleigh_quotient(s.A, s.B, x) >= r.lambda_min * (1 - 1e-10));
  }
  CHECK(rayleigh_quotient(s.A, s.B, r.vector) == Approx(r.lambda_min).epsilon(1e-10));
}

TEST_CASE("eigen solves are deterministic", "[linalg][property]") {
  const SparseSystem s = laplacian(128);
  const EigenResult a = smallest_eigenpair(s.A, s.B, 1e-10, 42);
  const EigenResult b = smallest_eigenpair(s.A, s.B, 1e-10, 42);
  CHECK(a.lambda_min == b.lambda_min);
  CHECK(a.iterations == b.iterations);
  CHECK((a.vector - b.vector).norm() == 0.0);
}

TEST_CASE("inertia counts", "[linalg]") {
  const SpMat A = diagonal({1, 2, 3, 4});
  const SpMat B = identity(4);
  CHECK(count_below(A, B, 0.5) == 0);
  CHECK(count_below(A, B, 2.5) == 2);
  CHECK(count_below(A, B, 10.0) == 4);
  const SparseSystem s = laplacian(64);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  // discrete eigenvalues lie slightly above k^2 pi^2
  CHECK(count_below(s.A, s.B, 0.99 * pi2) == 0);
  CHECK(count_below(s.A, s.B, 1.1 * pi2) == 1);
  CHECK(count_below(s.A, s.B, 4.1 * pi2) == 2);
}
