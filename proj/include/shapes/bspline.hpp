#pragma once

// B-spline basis functions over knot sequences with repeated knots.
//
// Basis functions are evaluated with the Cox-de Boor recursion restricted to
// the k functions that can be nonzero at a point, so a single evaluation
// costs O(k^2). The right end of the knot span is treated as closed, which
// keeps the partition of unity intact at x = tau_{P-1}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shapes/errors.hpp"

namespace shapes {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Nondecreasing knot sequence of a spline of order k.
///
/// Construction validates ordering, multiplicity (at most k) and length
/// (at least k + 1). A sequence whose first and last k knots coincide is
/// "clamped"; splines built for fitting are always clamped and carry at
/// least 2k knots.
template <typename Scalar>
class KnotVector {
 public:
  KnotVector(VectorX<Scalar> values, int order) : values_(std::move(values)), order_(order) {
    if (auto why = problem(values_, order_); !why.empty()) throw KnotError(why);
  }

  /// Empty string when `values` is a valid knot sequence for `order`.
  static std::string problem(const VectorX<Scalar>& values, int order) {
    if (order < 1) return "spline order must be at least 1";
    const Eigen::Index p = values.size();
    if (p < order + 1) return "knot sequence needs at least order+1 knots";
    Eigen::Index run = 1;
    for (Eigen::Index i = 0; i < p; ++i) {
      using std::isfinite;
      if (!isfinite(values[i])) return "knot values must be finite";
      if (i == 0) continue;
      if (values[i] < values[i - 1]) {
        std::ostringstream os;
        os << "knots must be nondecreasing (index " << i << ")";
        return os.str();
      }
      run = values[i] == values[i - 1] ? run + 1 : 1;
      if (run > order) {
        std::ostringstream os;
        os << "knot multiplicity exceeds order " << order << " at index " << i;
        return os.str();
      }
    }
    return {};
  }

  [[nodiscard]] const VectorX<Scalar>& values() const noexcept { return values_; }
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return values_.size(); }
  [[nodiscard]] Eigen::Index num_basis() const noexcept { return values_.size() - order_; }
  [[nodiscard]] Scalar front() const { return values_[0]; }
  [[nodiscard]] Scalar back() const { return values_[values_.size() - 1]; }
  [[nodiscard]] Scalar operator[](Eigen::Index i) const { return values_[i]; }

  /// True when the first k and the last k knots are repeated end knots and P >= 2k.
  [[nodiscard]] bool is_clamped() const {
    const Eigen::Index p = size();
    if (p < 2 * order_) return false;
    for (int j = 1; j < order_; ++j) {
      if (values_[j] != values_[0] || values_[p - 1 - j] != values_[p - 1]) return false;
    }
    return true;
  }

  [[nodiscard]] bool contains(Scalar x) const { return x >= front() && x <= back(); }

  /// Index mu with tau_mu <= x < tau_{mu+1}; at x == back() the last
  /// nonempty interval is returned (closed on the right).
  [[nodiscard]] Eigen::Index span(Scalar x) const {
    const Scalar* first = values_.data();
    const Scalar* last = first + values_.size();
    Eigen::Index mu = std::upper_bound(first, last, x) - first - 1;
    if (mu >= size() - 1) {
      mu = size() - 2;
      while (mu > 0 && values_[mu] == values_[mu + 1]) --mu;
    }
    return mu;
  }

  friend bool operator==(const KnotVector& a, const KnotVector& b) {
    return a.order_ == b.order_ && a.values_ == b.values_;
  }

 private:
  VectorX<Scalar> values_;
  int order_;
};

using KnotVectord = KnotVector<double>;

/// The (at most k) basis functions that can be nonzero at one point.
/// values[i] holds B_{first+i,k}(x); entries past the last valid index are 0.
template <typename Scalar>
struct LocalBasis {
  Eigen::Index first = 0;
  VectorX<Scalar> values;
};

namespace detail {

inline constexpr int max_fast_order = 16;

// Cox-de Boor on the local triangle. `work` must hold at least k + 1 entries.
// On return work[0..k-1] holds B_{mu-k+1+i,k}(x) (indices < 0 or beyond the
// last basis function are left at zero).
template <typename Scalar>
void local_cox_de_boor(const KnotVector<Scalar>& knots, Scalar x, Eigen::Index mu, Scalar* work) {
  const int k = knots.order();
  const Eigen::Index p = knots.size();
  const auto& t = knots.values();
  if (mu >= k - 1 && mu + k <= p - 1 && k <= max_fast_order) {
    // Every index touched lies inside the sequence and all denominators span
    // the nonempty interval [t_mu, t_mu+1), so the triangle needs no guards.
    Scalar left[max_fast_order];
    Scalar right[max_fast_order];
    work[0] = Scalar(1);
    for (int j = 1; j < k; ++j) {
      left[j] = x - t[mu + 1 - j];
      right[j] = t[mu + j] - x;
      Scalar saved(0);
      for (int r = 0; r < j; ++r) {
        const Scalar temp = work[r] / (right[r + 1] + left[j - r]);
        work[r] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      work[j] = saved;
    }
    work[k] = Scalar(0);
    return;
  }
  // work[i] represents B_{mu-k+1+i, level}; only indices with a valid
  // definition at this level are ever nonzero.
  std::fill(work, work + k + 1, Scalar(0));
  work[k - 1] = Scalar(1);  // B_{mu,1}
  const Eigen::Index base = mu - k + 1;
  for (int level = 2; level <= k; ++level) {
    const Eigen::Index jlo = std::max<Eigen::Index>(0, mu - level + 1);
    const Eigen::Index jhi = std::min<Eigen::Index>(mu, p - level - 1);
    for (Eigen::Index j = jlo; j <= jhi; ++j) {
      const Eigen::Index slot = j - base;
      Scalar value(0);
      // omega_{j,level} B_{j,level-1}
      const Scalar left = work[slot];
      if (left != Scalar(0)) {
        const Scalar denom = t[j + level - 1] - t[j];
        if (denom != Scalar(0)) value += (x - t[j]) / denom * left;
      }
      // gamma_{j+1,level} B_{j+1,level-1}
      const Scalar right = work[slot + 1];
      if (right != Scalar(0)) {
        const Scalar denom = t[j + level] - t[j + 1];
        if (denom != Scalar(0)) value += (Scalar(1) - (x - t[j + 1]) / denom) * right;
      }
      work[slot] = value;
    }
    // Slots above jhi no longer describe a valid function at this level.
    for (Eigen::Index j = std::max(jhi + 1, base); j <= mu; ++j) work[j - base] = Scalar(0);
  }
}

}  // namespace detail

/// Nonzero basis functions of order k at x.
template <typename Scalar>
LocalBasis<Scalar> local_basis(const KnotVector<Scalar>& knots, Scalar x) {
  if (!knots.contains(x)) {
    std::ostringstream os;
    os << "evaluation point " << x << " outside knot span [" << knots.front() << ", " << knots.back()
       << "]";
    throw DomainError(os.str());
  }
  const int k = knots.order();
  const Eigen::Index mu = knots.span(x);
  std::vector<Scalar> work(static_cast<std::size_t>(k) + 1);
  detail::local_cox_de_boor(knots, x, mu, work.data());
  LocalBasis<Scalar> out;
  out.first = mu - k + 1;
  out.values = Eigen::Map<VectorX<Scalar>>(work.data(), k);
  return out;
}

/// All P-k basis values (B_{0,k}(x), ..., B_{P-k-1,k}(x)).
template <typename Scalar>
VectorX<Scalar> evaluate_basis(const KnotVector<Scalar>& knots, Scalar x) {
  const LocalBasis<Scalar> local = local_basis(knots, x);
  VectorX<Scalar> out = VectorX<Scalar>::Zero(knots.num_basis());
  for (Eigen::Index i = 0; i < local.values.size(); ++i) {
    const Eigen::Index j = local.first + i;
    if (j >= 0 && j < out.size()) out[j] = local.values[i];
  }
  return out;
}

/// Basis functions sampled on a predictor grid: entry (m, n) = B_{m,k}(x_n).
template <typename Scalar>
struct BasisMatrix {
  MatrixX<Scalar> entries;
  KnotVector<Scalar> knots;
  VectorX<Scalar> grid;
  bool end_bsplines_dropped = false;

  [[nodiscard]] Eigen::Index rows() const noexcept { return entries.rows(); }
  [[nodiscard]] Eigen::Index cols() const noexcept { return entries.cols(); }
};

template <typename Scalar>
void check_grid(const VectorX<Scalar>& grid) {
  if (grid.size() == 0) throw IllPosedError("predictor grid is empty");
  for (Eigen::Index n = 1; n < grid.size(); ++n) {
    if (!(grid[n] > grid[n - 1])) throw IllPosedError("predictor grid must be strictly increasing");
  }
}

/// Dense basis matrix on `grid`. Grid points outside the knot span give
/// zero columns. With `drop_end_bsplines` the first and last rows are removed.
template <typename Scalar>
BasisMatrix<Scalar> build_basis_matrix(const KnotVector<Scalar>& knots, const VectorX<Scalar>& grid,
                                       bool drop_end_bsplines = false) {
  check_grid(grid);
  const Eigen::Index full_rows = knots.num_basis();
  const Eigen::Index rows = drop_end_bsplines ? full_rows - 2 : full_rows;
  if (rows < 1) throw IllPosedError("knot sequence leaves no basis functions");
  if (grid.size() <= rows) {
    std::ostringstream os;
    os << "need more grid points (" << grid.size() << ") than basis functions (" << rows << ")";
    throw IllPosedError(os.str());
  }
  const Eigen::Index offset = drop_end_bsplines ? 1 : 0;
  MatrixX<Scalar> entries = MatrixX<Scalar>::Zero(rows, grid.size());
  std::vector<Scalar> work(static_cast<std::size_t>(knots.order()) + 1);
  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    const Scalar x = grid[n];
    if (!knots.contains(x)) continue;
    const Eigen::Index mu = knots.span(x);
    detail::local_cox_de_boor(knots, x, mu, work.data());
    const Eigen::Index first = mu - knots.order() + 1;
    for (int i = 0; i < knots.order(); ++i) {
      const Eigen::Index m = first + i - offset;
      if (m >= 0 && m < rows) entries(m, n) = work[i];
    }
  }
  return BasisMatrix<Scalar>{std::move(entries), knots, grid, drop_end_bsplines};
}

/// Column-compressed basis: for every grid point the index of the first
/// possibly nonzero function and the k values starting there. Points outside
/// the knot span are marked with `first = outside`.
template <typename Scalar>
struct BandedBasis {
  static constexpr Eigen::Index outside = -1'000'000;
  Eigen::Index num_basis = 0;
  int order = 0;
  std::vector<Eigen::Index> first;
  MatrixX<Scalar> values;  // order x N
};

template <typename Scalar>
BandedBasis<Scalar> build_banded_basis(const KnotVector<Scalar>& knots, const VectorX<Scalar>& grid) {
  const int k = knots.order();
  BandedBasis<Scalar> out;
  out.num_basis = knots.num_basis();
  out.order = k;
  out.first.assign(static_cast<std::size_t>(grid.size()), BandedBasis<Scalar>::outside);
  out.values = MatrixX<Scalar>::Zero(k, grid.size());
  std::vector<Scalar> work(static_cast<std::size_t>(k) + 1);
  Eigen::Index mu = 0;
  const auto& t = knots.values();
  const Eigen::Index p = knots.size();
  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    const Scalar x = grid[n];
    if (!knots.contains(x)) continue;
    // Grid is increasing: advance the span pointer instead of searching.
    if (x == knots.back()) {
      mu = knots.span(x);
    } else {
      while (mu + 1 < p && t[mu + 1] <= x) ++mu;
    }
    detail::local_cox_de_boor(knots, x, mu, work.data());
    out.first[static_cast<std::size_t>(n)] = mu - k + 1;
    for (int i = 0; i < k; ++i) out.values(i, n) = work[i];
  }
  return out;
}

}  // namespace shapes
