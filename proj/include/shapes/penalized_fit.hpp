#pragma once

// Ridge-penalized least squares for B-spline coefficients at fixed knots.
//
// alpha solves (B B^T + lambda I) alpha = B y. The normal matrix is factored
// with Cholesky; when that fails (lambda = 0 with knots that leave some basis
// function unsupported by the grid) a jitter of 1e-12 * trace(G) / n is added
// to the diagonal and the result is flagged.

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "shapes/bspline.hpp"
#include "shapes/errors.hpp"

namespace shapes {

template <typename Scalar>
struct FitCoefficients {
  VectorX<Scalar> alpha;
  bool jittered = false;
};

/// fitness = rss + lambda * penalty, with penalty = sum of squared coefficients.
template <typename Scalar>
struct PenalizedFitResult {
  FitCoefficients<Scalar> coefficients;
  Scalar fitness{};
  Scalar rss{};
  Scalar penalty{};
};

struct FitOptions {
  bool drop_end_bsplines = false;
};

namespace detail {

template <typename Scalar>
Scalar cholesky_rcond_floor() {
  return Scalar(100) * std::numeric_limits<Scalar>::epsilon();
}

// Solves G alpha = rhs in place of a symmetric positive (semi)definite G.
template <typename Scalar>
FitCoefficients<Scalar> solve_normal_equations(MatrixX<Scalar> gram, const VectorX<Scalar>& rhs) {
  const Eigen::Index n = gram.rows();
  FitCoefficients<Scalar> out;
  {
    Eigen::LLT<MatrixX<Scalar>> llt(gram);
    if (llt.info() == Eigen::Success && llt.rcond() > cholesky_rcond_floor<Scalar>()) {
      out.alpha = llt.solve(rhs);
      return out;
    }
  }
  const Scalar trace = gram.trace();
  const Scalar jitter = Scalar(1e-12) * (trace > Scalar(0) ? trace : Scalar(1)) / Scalar(n);
  gram.diagonal().array() += jitter;
  Eigen::LLT<MatrixX<Scalar>> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw RankDeficientError("normal matrix is singular even after diagonal jitter");
  }
  out.alpha = llt.solve(rhs);
  out.jittered = true;
  if (!out.alpha.allFinite()) throw RankDeficientError("non-finite coefficients after jitter");
  return out;
}

}  // namespace detail

/// Penalized least-squares coefficients for data `y` sampled on the basis grid.
template <typename Scalar>
FitCoefficients<Scalar> solve_coefficients(const BasisMatrix<Scalar>& basis, const VectorX<Scalar>& y,
                                           Scalar lambda) {
  if (basis.cols() != y.size()) {
    std::ostringstream os;
    os << "data length " << y.size() << " does not match basis grid length " << basis.cols();
    throw IllPosedError(os.str());
  }
  if (!(lambda >= Scalar(0))) throw IllPosedError("regulator gain must be nonnegative");
  const auto& b = basis.entries;
  MatrixX<Scalar> gram = b * b.transpose();
  gram.diagonal().array() += lambda;
  return detail::solve_normal_equations<Scalar>(std::move(gram), b * y);
}

/// Minimum over coefficients of the penalized least-squares function at fixed
/// knots, together with the minimizing coefficients.
///
/// Uses the banded form of the basis: only k functions touch each sample, so
/// the normal matrix is accumulated in O(N k^2).
template <typename Scalar>
PenalizedFitResult<Scalar> fitness(const KnotVector<Scalar>& knots, const VectorX<Scalar>& grid,
                                   const VectorX<Scalar>& y, Scalar lambda, const FitOptions& options = {}) {
  if (grid.size() != y.size()) throw IllPosedError("data and grid lengths differ");
  if (!(lambda >= Scalar(0))) throw IllPosedError("regulator gain must be nonnegative");
  check_grid(grid);
  const BandedBasis<Scalar> banded = build_banded_basis(knots, grid);
  const int k = banded.order;
  const Eigen::Index offset = options.drop_end_bsplines ? 1 : 0;
  const Eigen::Index n = banded.num_basis - 2 * offset;
  if (n < 1) throw IllPosedError("knot sequence leaves no basis functions");
  if (grid.size() <= n) throw IllPosedError("need more grid points than basis functions");

  MatrixX<Scalar> gram = MatrixX<Scalar>::Zero(n, n);
  VectorX<Scalar> rhs = VectorX<Scalar>::Zero(n);
  Scalar* g = gram.data();
  const Scalar* vals = banded.values.data();
  for (Eigen::Index s = 0; s < grid.size(); ++s) {
    const Eigen::Index first = banded.first[static_cast<std::size_t>(s)];
    if (first == BandedBasis<Scalar>::outside) continue;
    const Scalar* v = vals + s * k;
    const Eigen::Index r0 = first - offset;
    if (r0 >= 0 && r0 + k <= n) {
      // Column-major: gram(ra, rb) lives at g[rb * n + ra]; fill the upper triangle.
      for (int b = 0; b < k; ++b) {
        Scalar* col = g + (r0 + b) * n + r0;
        const Scalar vb = v[b];
        for (int a = 0; a <= b; ++a) col[a] += v[a] * vb;
        rhs[r0 + b] += vb * y[s];
      }
      continue;
    }
    for (int a = 0; a < k; ++a) {
      const Eigen::Index ra = r0 + a;
      if (ra < 0 || ra >= n) continue;
      const Scalar va = v[a];
      rhs[ra] += va * y[s];
      for (int b = a; b < k; ++b) {
        const Eigen::Index rb = r0 + b;
        if (rb < 0 || rb >= n) continue;
        gram(ra, rb) += va * v[b];
      }
    }
  }
  gram.template triangularView<Eigen::StrictlyLower>() = gram.transpose();
  gram.diagonal().array() += lambda;

  PenalizedFitResult<Scalar> out;
  out.coefficients = detail::solve_normal_equations<Scalar>(std::move(gram), rhs);
  const VectorX<Scalar>& alpha = out.coefficients.alpha;

  Scalar rss(0);
  for (Eigen::Index s = 0; s < grid.size(); ++s) {
    Scalar model(0);
    const Eigen::Index first = banded.first[static_cast<std::size_t>(s)];
    if (first != BandedBasis<Scalar>::outside) {
      const Scalar* v = vals + s * k;
      for (int a = 0; a < k; ++a) {
        const Eigen::Index ra = first + a - offset;
        if (ra >= 0 && ra < n) model += alpha[ra] * v[a];
      }
    }
    const Scalar r = y[s] - model;
    rss += r * r;
  }
  out.rss = rss;
  out.penalty = alpha.squaredNorm();
  out.fitness = rss + lambda * out.penalty;
  return out;
}

/// Spline alpha . B evaluated on `grid` (zero outside the knot span).
template <typename Scalar>
VectorX<Scalar> evaluate_spline(const KnotVector<Scalar>& knots, const VectorX<Scalar>& alpha,
                                const VectorX<Scalar>& grid, const FitOptions& options = {}) {
  const Eigen::Index offset = options.drop_end_bsplines ? 1 : 0;
  if (alpha.size() != knots.num_basis() - 2 * offset) {
    throw IllPosedError("coefficient count does not match the knot sequence");
  }
  VectorX<Scalar> out = VectorX<Scalar>::Zero(grid.size());
  std::vector<Scalar> work(static_cast<std::size_t>(knots.order()) + 1);
  for (Eigen::Index s = 0; s < grid.size(); ++s) {
    const Scalar x = grid[s];
    if (!knots.contains(x)) continue;
    const Eigen::Index mu = knots.span(x);
    detail::local_cox_de_boor(knots, x, mu, work.data());
    const Eigen::Index first = mu - knots.order() + 1;
    for (int a = 0; a < knots.order(); ++a) {
      const Eigen::Index ra = first + a - offset;
      if (ra >= 0 && ra < alpha.size()) out[s] += alpha[ra] * work[static_cast<std::size_t>(a)];
    }
  }
  return out;
}

}  // namespace shapes
