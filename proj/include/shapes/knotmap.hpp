#pragma once

// Maps from PSO search-space coordinates to knot sequences, and the
// merge/heal post-processing that controls how many interior knots share an
// interval between consecutive predictor values.

#include <Eigen/Dense>

#include "shapes/bspline.hpp"

namespace shapes {

enum class KnotMapKind { plain, centered_monotonic };
enum class EndKnots { fixed, variable };
enum class KnotAdjust { merge, heal };

struct KnotMapOptions {
  KnotMapKind map = KnotMapKind::plain;
  EndKnots end_knots = EndKnots::fixed;
  KnotAdjust adjust = KnotAdjust::merge;
  int order = 4;
};

/// Clamp applied to interior centered-monotonic coordinates.
inline constexpr double centered_map_epsilon = 1e-9;

/// PSO dimension for a model with M distinct knots: M, or M - 2 with fixed ends.
Eigen::Index search_dimension(int num_knots, const KnotMapOptions& options);

/// Sorted coordinates with k-1 extra copies of the smallest and largest value.
/// With fixed ends `z` holds the M - 2 interior knots and the ends are 0 and 1.
KnotVectord plain_map(const Eigen::Ref<const Eigen::VectorXd>& z, const KnotMapOptions& options);

/// Distinct knots from centered-monotonic coordinates (before end
/// replication): tau_0 = z_0, tau_{M-1} = tau_0 + z_{M-1} (1 - tau_0), and
/// interior knots from the ratios
///   z_i = (tau_i - tau_{i-1}) / (tau_{i+1} - tau_{i-1}),
/// solved as a tridiagonal system. With fixed ends z holds only the ratios.
Eigen::VectorXd centered_monotonic_knots(const Eigen::Ref<const Eigen::VectorXd>& z,
                                         const KnotMapOptions& options);

/// Inverse of centered_monotonic_knots for strictly increasing knots.
Eigen::VectorXd centered_monotonic_coordinates(const Eigen::Ref<const Eigen::VectorXd>& distinct_knots,
                                               const KnotMapOptions& options);

KnotVectord centered_monotonic_map(const Eigen::Ref<const Eigen::VectorXd>& z, const KnotMapOptions& options);

/// Dispatches on options.map.
KnotVectord map_to_knots(const Eigen::Ref<const Eigen::VectorXd>& z, const KnotMapOptions& options);

/// Repeats each end value k - 1 more times.
KnotVectord replicate_ends(const Eigen::Ref<const Eigen::VectorXd>& distinct_knots, int order);

/// Coalesces interior knots that share an open predictor interval into
/// repeated knots, anchored at the rightmost knot of each group; leftover
/// groups in one interval are dispersed by healing.
KnotVectord merge_knots(const KnotVectord& knots, const Eigen::VectorXd& grid);

/// Disperses interior knots so that every open predictor interval holds at
/// most one of them. Throws UnhealableError when that is impossible.
KnotVectord heal_knots(const KnotVectord& knots, const Eigen::VectorXd& grid);

/// Dispatches on options.adjust.
KnotVectord adjust_knots(const KnotVectord& knots, const Eigen::VectorXd& grid, const KnotMapOptions& options);

}  // namespace shapes
