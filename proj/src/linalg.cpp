#include "hardy/linalg.hpp"

#include "hardy/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace hardy {

namespace {

using ColMat = Eigen::SparseMatrix<double>;
using Dense = Eigen::MatrixXd;
using LDLT = Eigen::SimplicialLDLT<ColMat, Eigen::Lower, Eigen::AMDOrdering<int>>;

constexpr int kDenseLimit = 40;

// Factorization of Ah - sigma Bh with a fixed symbolic analysis.
class ShiftedSolver {
 public:
  ShiftedSolver(const ColMat& Ah, const ColMat& Bh) : Ah_(Ah), Bh_(Bh) {
    ColMat K = Ah_ - 0.0 * Bh_;
    solver_.analyzePattern(K);
  }

  bool factor(double sigma) {
    ColMat K = Ah_ - sigma * Bh_;
    solver_.factorize(K);
    sigma_ = sigma;
    return solver_.info() == Eigen::Success;
  }

  // Negative pivots, or nullopt when the factorization broke down.
  std::optional<int> count(double sigma) {
    if (!factor(sigma)) return std::nullopt;
    const auto& D = solver_.vectorD();
    int neg = 0;
    for (Eigen::Index i = 0; i < D.size(); ++i) {
      if (!std::isfinite(D[i]) || D[i] == 0.0) return std::nullopt;
      if (D[i] < 0) ++neg;
    }
    return neg;
  }

  Dense solve(const Dense& rhs) const { return solver_.solve(rhs); }
  double sigma() const { return sigma_; }

 private:
  const ColMat& Ah_;
  const ColMat& Bh_;
  LDLT solver_;
  double sigma_ = 0.0;
};

// B-orthonormal basis of span(X); rank-deficient directions are replaced.
Dense b_orthonormalize(const Dense& X, const ColMat& Bh, std::mt19937_64& rng) {
  Dense Y = X;
  int passes = 0;
  for (int attempt = 0; attempt < 8 && passes < 2; ++attempt) {
    Dense G = Y.transpose() * (Bh * Y);
    G = 0.5 * (G + G.transpose());
    Eigen::LLT<Dense> llt(G);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      const Dense L = llt.matrixL();
      const double guard = G.diagonal().maxCoeff() * 1e-14;
      for (Eigen::Index i = 0; i < L.rows(); ++i) ok = ok && L(i, i) * L(i, i) > guard;
      if (ok) {
        Y = llt.matrixL().solve(Y.transpose()).transpose();
        ++passes;
        continue;
      }
    }
    // fallback: eigen-decomposition of the Gram matrix, refill with random vectors
    Eigen::SelfAdjointEigenSolver<Dense> es(G);
    const auto& w = es.eigenvalues();
    const double top = std::max(w.maxCoeff(), 0.0);
    Dense Z(Y.rows(), Y.cols());
    int c = 0;
    for (Eigen::Index i = w.size() - 1; i >= 0; --i) {
      if (w[i] > 1e-12 * top) Z.col(c++) = Y * es.eigenvectors().col(i) / std::sqrt(w[i]);
    }
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (; c < Y.cols(); ++c) {
      for (Eigen::Index i = 0; i < Z.rows(); ++i) Z(i, c) = dist(rng);
    }
    Y = Z;
    passes = 0;
  }
  return Y;
}

struct Ritz {
  Eigen::VectorXd theta;
  Dense X;
};

Ritz rayleigh_ritz(const Dense& X, const ColMat& Ah, const ColMat& Bh) {
  Dense H = X.transpose() * (Ah * X);
  Dense G = X.transpose() * (Bh * X);
  H = 0.5 * (H + H.transpose());
  G = 0.5 * (G + G.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Dense> es(H, G);
  return {es.eigenvalues(), X * es.eigenvectors()};
}

double residual_of(const ColMat& Ah, const ColMat& Bh, const Eigen::VectorXd& x, double theta) {
  const Eigen::VectorXd bx = Bh * x;
  const double nb = bx.norm();
  if (nb == 0.0) return std::numeric_limits<double>::infinity();
  return (Ah * x - theta * bx).norm() / nb;
}

EigenResult finish(const Eigen::VectorXd& s, const Eigen::VectorXd& xh, double theta,
                   double residual, int iterations, double tol, double shift) {
  EigenResult out;
  out.lambda_min = theta;
  out.vector = s.cwiseProduct(xh);
  out.residual = residual;
  out.iterations = iterations;
  out.converged = residual < tol;
  out.shift = shift;
  return out;
}

}  // namespace

Eigen::VectorXd cg_solve(const SpMat& M, const Eigen::VectorXd& rhs, double tol) {
  if (M.rows() != M.cols() || M.rows() != rhs.size()) throw ValidationError("cg: size mismatch");
  const Eigen::Index n = rhs.size();
  if (rhs.norm() == 0.0) return Eigen::VectorXd::Zero(n);
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setMaxIterations(std::max<Eigen::Index>(1, 50 * n));
  cg.setTolerance(tol);
  cg.compute(M);
  if (cg.info() != Eigen::Success) throw IterativeFailure("cg: preconditioner setup failed", 1.0);
  Eigen::VectorXd x = cg.solve(rhs);
  const double res = (M * x - rhs).norm() / rhs.norm();
  // the true residual may sit at the roundoff floor above the recursive one
  const bool ok = cg.info() == Eigen::Success ? res <= 1e3 * tol : res <= tol * (1 + 1e-6);
  if (!x.allFinite() || !ok) {
    throw IterativeFailure("cg: no convergence", std::isfinite(res) ? res : cg.error());
  }
  return x;
}

double rayleigh_quotient(const SpMat& A, const SpMat& B, const Eigen::VectorXd& x) {
  if (x.size() == 0 || x.squaredNorm() == 0.0) throw ValidationError("Rayleigh quotient of zero vector");
  const double den = x.dot(B * x);
  if (!(den > 0)) throw ValidationError("B is not positive on the vector");
  return x.dot(A * x) / den;
}

int count_below(const SpMat& A, const SpMat& B, double sigma) {
  const ColMat Ac = A;
  const ColMat Bc = B;
  ShiftedSolver solver(Ac, Bc);
  auto c = solver.count(sigma);
  if (!c) throw SingularityError("shifted pencil is singular at the requested shift");
  return *c;
}

EigenResult smallest_eigenpair(const SpMat& A, const SpMat& B, double tol, std::uint64_t seed,
                               const EigenOptions& options) {
  const Eigen::Index n = A.rows();
  if (n == 0 || A.cols() != n || B.rows() != n || B.cols() != n) {
    throw ValidationError("eigenproblem: empty or mismatched matrices");
  }
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double b = B.coeff(i, i);
    if (!(b > 0)) throw ValidationError("B must have a positive diagonal");
    s[i] = 1.0 / std::sqrt(b);
  }
  const ColMat Ah = s.asDiagonal() * ColMat(A) * s.asDiagonal();
  const ColMat Bh = s.asDiagonal() * ColMat(B) * s.asDiagonal();
  auto measure = [&](const Eigen::VectorXd& x, double theta) {
    const double r = residual_of(Ah, Bh, x, theta);
    return options.relative_residual ? r / std::max(1.0, std::abs(theta)) : r;
  };

  if (n <= kDenseLimit) {
    const Dense Ad = Dense(Ah);
    const Dense Bd = Dense(Bh);
    Eigen::GeneralizedSelfAdjointEigenSolver<Dense> es(0.5 * (Ad + Ad.transpose()),
                                                       0.5 * (Bd + Bd.transpose()));
    if (es.info() != Eigen::Success) throw ValidationError("B is not positive definite");
    Eigen::VectorXd x = es.eigenvectors().col(0);
    x /= std::sqrt(x.dot(Bh * x));
    const double theta = es.eigenvalues()[0];
    const double res = measure(x, theta);
    EigenResult out = finish(s, x, theta, res, 0, tol, theta);
    if (!out.converged) throw IterativeFailure("dense eigensolver residual above tolerance", res);
    return out;
  }

  const int p = int(std::min<Eigen::Index>(options.block_size, n));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Dense X(n, p);
  X.col(0).setOnes();
  for (int j = 1; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = dist(rng);
  }
  X = b_orthonormalize(X, Bh, rng);

  double theta = 0.0;
  double res = std::numeric_limits<double>::infinity();
  int it = 0;

  if (options.inner == InnerSolver::ConjugateGradient) {
    double sigma = 0.0;
    const double shift_fallback = -1e-12 * Ah.diagonal().sum() / double(n);
    SpMat K = SpMat(Ah);
    bool fell_back = false;
    for (it = 1; it <= options.max_iterations; ++it) {
      const Dense BX = Bh * X;
      Dense Y(n, p);
      try {
        for (int j = 0; j < p; ++j) Y.col(j) = cg_solve(K, BX.col(j), options.inner_tol);
      } catch (const IterativeFailure&) {
        if (fell_back) throw;
        fell_back = true;
        sigma = shift_fallback;
        K = SpMat(Ah - sigma * Bh);
        for (int j = 0; j < p; ++j) Y.col(j) = cg_solve(K, BX.col(j), options.inner_tol);
      }
      X = b_orthonormalize(Y, Bh, rng);
      Ritz rr = rayleigh_ritz(X, Ah, Bh);
      X = rr.X;
      theta = rr.theta[0];
      res = measure(X.col(0), theta);
      if (res < tol) break;
    }
    if (!(res < tol)) throw IterativeFailure("eigensolver stagnated", res);
    Eigen::VectorXd x = X.col(0);
    x /= std::sqrt(x.dot(Bh * x));
    return finish(s, x, theta, res, it, tol, sigma);
  }

  ShiftedSolver solver(Ah, Bh);
  // lower bound: a shift with no eigenvalue below it
  double lo = 0.0;
  {
    auto c = solver.count(lo);
    if (!c || *c > 0) {
      const double scale = std::max(1.0, Ah.diagonal().cwiseAbs().maxCoeff());
      bool found = false;
      for (int k = 0; k < 80 && !found; ++k) {
        lo = -scale * std::pow(10.0, k - 12);
        auto ck = solver.count(lo);
        found = ck && *ck == 0;
      }
      if (!found) throw IterativeFailure("no shift below the spectrum found", res);
    }
  }
  if (!solver.factor(lo)) throw IterativeFailure("shifted factorization failed", res);

  int since_shift = 0;
  int phase_length = 6;
  for (it = 1; it <= options.max_iterations; ++it) {
    const Dense Y = solver.solve(Bh * X);
    if (!Y.allFinite()) throw IterativeFailure("inner solve produced non-finite values", res);
    X = b_orthonormalize(Y, Bh, rng);
    Ritz rr = rayleigh_ritz(X, Ah, Bh);
    X = rr.X;
    theta = rr.theta[0];
    res = measure(X.col(0), theta);
    if (res < tol) break;
    if (++since_shift >= phase_length) {
      // move the shift toward the leading Ritz value while the inertia
      // confirms it stays below the spectrum
      since_shift = 0;
      phase_length = 20;
      double best = lo;
      for (int k = 1; k <= 8; ++k) {
        const double cand = theta - (theta - lo) * std::pow(0.25, k);
        if (!(cand > best) || !(cand < theta)) break;
        auto c = solver.count(cand);
        if (!c || *c > 0) break;
        best = cand;
      }
      lo = best;
      if (!solver.factor(lo)) throw IterativeFailure("shifted factorization failed", res);
    }
  }
  if (!(res < tol)) throw IterativeFailure("eigensolver stagnated", res);
  Eigen::VectorXd x = X.col(0);
  x /= std::sqrt(x.dot(Bh * x));
  return finish(s, x, theta, res, it, tol, lo);
}

}  // namespace hardy
