#include "shapes/knotmap.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

#include "shapes/errors.hpp"

namespace shapes {

Eigen::Index search_dimension(int num_knots, const KnotMapOptions& options) {
  if (num_knots < 2) throw KnotError("a model needs at least 2 distinct knots");
  return options.end_knots == EndKnots::fixed ? num_knots - 2 : num_knots;
}

KnotVectord replicate_ends(const Eigen::Ref<const Eigen::VectorXd>& distinct_knots, int order) {
  const Eigen::Index m = distinct_knots.size();
  if (m < 2) throw KnotError("a model needs at least 2 distinct knots");
  const int extra = order - 1;
  Eigen::VectorXd values(m + 2 * extra);
  values.head(extra).setConstant(distinct_knots[0]);
  values.segment(extra, m) = distinct_knots;
  values.tail(extra).setConstant(distinct_knots[m - 1]);
  return KnotVectord(std::move(values), order);
}

KnotVectord plain_map(const Eigen::Ref<const Eigen::VectorXd>& z, const KnotMapOptions& options) {
  Eigen::VectorXd distinct;
  if (options.end_knots == EndKnots::fixed) {
    distinct.resize(z.size() + 2);
    distinct[0] = 0.0;
    distinct.segment(1, z.size()) = z;
    distinct[z.size() + 1] = 1.0;
    std::sort(distinct.data() + 1, distinct.data() + 1 + z.size());
  } else {
    if (z.size() < 2) throw KnotError("plain map needs at least 2 coordinates");
    distinct = z;
    std::sort(distinct.data(), distinct.data() + distinct.size());
  }
  return replicate_ends(distinct, options.order);
}

Eigen::VectorXd centered_monotonic_knots(const Eigen::Ref<const Eigen::VectorXd>& z,
                                         const KnotMapOptions& options) {
  const bool fixed = options.end_knots == EndKnots::fixed;
  const Eigen::Index m = fixed ? z.size() + 2 : z.size();
  if (m < 2) throw KnotError("centered-monotonic map needs at least 2 knots");
  Eigen::VectorXd tau(m);
  if (fixed) {
    tau[0] = 0.0;
    tau[m - 1] = 1.0;
  } else {
    tau[0] = z[0];
    tau[m - 1] = z[0] + z[m - 1] * (1.0 - z[0]);
  }
  const Eigen::Index n = m - 2;
  if (n == 0) return tau;

  // Row i (knot i+1): -(1 - r) tau_{i} + tau_{i+1} - r tau_{i+2} = 0.
  Eigen::VectorXd ratio(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = fixed ? z[i] : z[i + 1];
    ratio[i] = std::clamp(r, centered_map_epsilon, 1.0 - centered_map_epsilon);
  }
  Eigen::VectorXd c_prime(n);
  Eigen::VectorXd d_prime(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sub = -(1.0 - ratio[i]);
    const double sup = -ratio[i];
    double rhs = 0.0;
    if (i == 0) rhs += (1.0 - ratio[i]) * tau[0];
    if (i == n - 1) rhs += ratio[i] * tau[m - 1];
    const double denom = i == 0 ? 1.0 : 1.0 - sub * c_prime[i - 1];
    c_prime[i] = sup / denom;
    d_prime[i] = (i == 0 ? rhs : rhs - sub * d_prime[i - 1]) / denom;
  }
  tau[n] = d_prime[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) tau[i + 1] = d_prime[i] - c_prime[i] * tau[i + 2];
  return tau;
}

Eigen::VectorXd centered_monotonic_coordinates(const Eigen::Ref<const Eigen::VectorXd>& tau,
                                               const KnotMapOptions& options) {
  const Eigen::Index m = tau.size();
  if (m < 2) throw KnotError("need at least 2 distinct knots");
  const bool fixed = options.end_knots == EndKnots::fixed;
  Eigen::VectorXd z(fixed ? m - 2 : m);
  const Eigen::Index shift = fixed ? 1 : 0;
  if (!fixed) {
    z[0] = tau[0];
    z[m - 1] = (tau[m - 1] - tau[0]) / (1.0 - tau[0]);
  }
  for (Eigen::Index i = 1; i + 1 < m; ++i) {
    z[i - shift] = (tau[i] - tau[i - 1]) / (tau[i + 1] - tau[i - 1]);
  }
  return z;
}

KnotVectord centered_monotonic_map(const Eigen::Ref<const Eigen::VectorXd>& z, const KnotMapOptions& options) {
  return replicate_ends(centered_monotonic_knots(z, options), options.order);
}

KnotVectord map_to_knots(const Eigen::Ref<const Eigen::VectorXd>& z, const KnotMapOptions& options) {
  return options.map == KnotMapKind::plain ? plain_map(z, options) : centered_monotonic_map(z, options);
}

namespace {

struct Unit {
  double value;
  int multiplicity;
};

constexpr Eigen::Index no_interval = -1;

// Index j of the open interval (x_j, x_{j+1}) containing v, or no_interval.
Eigen::Index interval_of(double v, const Eigen::VectorXd& grid) {
  const double* first = grid.data();
  const double* last = first + grid.size();
  if (!(v > grid[0] && v < grid[grid.size() - 1])) return no_interval;
  const Eigen::Index j = std::upper_bound(first, last, v) - first - 1;
  if (grid[j] == v) return no_interval;
  return j;
}

struct InteriorView {
  double lo;
  double hi;
  int order;
  std::vector<double> interior;
};

InteriorView interior_of(const KnotVectord& knots) {
  if (!knots.is_clamped()) throw KnotError("merge/heal need a clamped knot sequence");
  const int k = knots.order();
  const Eigen::Index p = knots.size();
  InteriorView view{knots.front(), knots.back(), k, {}};
  for (Eigen::Index i = k; i < p - k; ++i) view.interior.push_back(knots[i]);
  return view;
}

KnotVectord assemble(const InteriorView& view, std::vector<Unit> units) {
  std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.value < b.value; });
  std::vector<double> values(static_cast<std::size_t>(view.order), view.lo);
  for (const Unit& u : units) values.insert(values.end(), static_cast<std::size_t>(u.multiplicity), u.value);
  values.insert(values.end(), static_cast<std::size_t>(view.order), view.hi);
  return KnotVectord(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())),
                     view.order);
}

bool overcrowded(const std::vector<Unit>& units, const Eigen::VectorXd& grid) {
  Eigen::Index previous = no_interval;
  for (const Unit& u : units) {
    const Eigen::Index j = interval_of(u.value, grid);
    if (j != no_interval && j == previous) return true;
    previous = j;
  }
  return false;
}

// Sorted units; moves boundary units of overcrowded intervals into the
// nearest empty interval until every interval holds at most one unit.
void heal_units(std::vector<Unit>& units, double lo, double hi, const Eigen::VectorXd& grid) {
  const auto by_value = [](const Unit& a, const Unit& b) { return a.value < b.value; };
  std::sort(units.begin(), units.end(), by_value);
  const Eigen::Index intervals = grid.size() - 1;
  std::vector<char> eligible(static_cast<std::size_t>(std::max<Eigen::Index>(intervals, 0)), 0);
  Eigen::Index eligible_count = 0;
  for (Eigen::Index j = 0; j < intervals; ++j) {
    const double mid = 0.5 * (grid[j] + grid[j + 1]);
    if (mid > lo && mid < hi) {
      eligible[static_cast<std::size_t>(j)] = 1;
      ++eligible_count;
    }
  }
  Eigen::Index placed = 0;
  for (const Unit& u : units) placed += interval_of(u.value, grid) != no_interval ? 1 : 0;
  if (placed > eligible_count) {
    std::ostringstream os;
    os << placed << " interior knots but only " << eligible_count << " predictor intervals";
    throw UnhealableError(os.str());
  }

  const std::size_t max_moves = 10 * (units.size() + 2);
  std::vector<int> occupancy(static_cast<std::size_t>(std::max<Eigen::Index>(intervals, 0)));
  std::vector<Eigen::Index> where(units.size());
  for (std::size_t move = 0;; ++move) {
    std::fill(occupancy.begin(), occupancy.end(), 0);
    for (std::size_t u = 0; u < units.size(); ++u) {
      where[u] = interval_of(units[u].value, grid);
      if (where[u] != no_interval) ++occupancy[static_cast<std::size_t>(where[u])];
    }
    std::size_t left = units.size();
    for (std::size_t u = 0; u < units.size(); ++u) {
      if (where[u] != no_interval && occupancy[static_cast<std::size_t>(where[u])] > 1) {
        left = u;
        break;
      }
    }
    if (left == units.size()) return;
    if (move >= max_moves) throw UnhealableError("knot healing did not converge");

    const Eigen::Index crowded = where[left];
    std::size_t right = left;
    while (right + 1 < units.size() && where[right + 1] == crowded) ++right;
    const double gap_left = units[left].value - (left > 0 ? units[left - 1].value : lo);
    const double gap_right = (right + 1 < units.size() ? units[right + 1].value : hi) - units[right].value;

    const auto find_empty = [&](int direction) -> Eigen::Index {
      for (Eigen::Index j = crowded + direction; j >= 0 && j < intervals; j += direction) {
        if (eligible[static_cast<std::size_t>(j)] && occupancy[static_cast<std::size_t>(j)] == 0) return j;
      }
      return no_interval;
    };
    // Lighter boundary unit moves (merged anchors stay put); equal weights
    // fall back to the larger outward gap.
    int first_direction = gap_right >= gap_left ? 1 : -1;
    if (units[left].multiplicity != units[right].multiplicity) {
      first_direction = units[right].multiplicity < units[left].multiplicity ? 1 : -1;
    }
    Eigen::Index target = find_empty(first_direction);
    int direction = first_direction;
    if (target == no_interval) {
      direction = -first_direction;
      target = find_empty(direction);
    }
    if (target == no_interval) throw UnhealableError("no empty predictor interval left for a crowded knot");
    std::size_t mover = direction > 0 ? right : left;
    if (units[left].multiplicity != units[right].multiplicity) mover = first_direction > 0 ? right : left;
    units[mover].value = 0.5 * (grid[target] + grid[target + 1]);
    std::sort(units.begin(), units.end(), by_value);
  }
}

}  // namespace

KnotVectord heal_knots(const KnotVectord& knots, const Eigen::VectorXd& grid) {
  check_grid(grid);
  const InteriorView view = interior_of(knots);
  std::vector<Unit> units;
  units.reserve(view.interior.size());
  for (const double v : view.interior) units.push_back({v, 1});
  if (!overcrowded(units, grid)) return knots;
  heal_units(units, view.lo, view.hi, grid);
  return assemble(view, std::move(units));
}

KnotVectord merge_knots(const KnotVectord& knots, const Eigen::VectorXd& grid) {
  check_grid(grid);
  const InteriorView view = interior_of(knots);
  const int k = view.order;
  std::vector<Unit> singles;
  for (const double v : view.interior) singles.push_back({v, 1});
  if (!overcrowded(singles, grid)) return knots;

  std::vector<Unit> units;
  bool groups_collide = false;
  const auto& values = view.interior;
  std::size_t start = 0;
  while (start < values.size()) {
    const Eigen::Index j = interval_of(values[start], grid);
    std::size_t end = start + 1;
    if (j != no_interval) {
      while (end < values.size() && interval_of(values[end], grid) == j) ++end;
    }
    const std::size_t m = end - start;
    if (m == 1) {
      units.push_back({values[start], 1});
    } else {
      // Saturate the rightmost remaining knot at multiplicity k, repeat.
      std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(end) - 1;
      int groups = 0;
      while (idx >= static_cast<std::ptrdiff_t>(start)) {
        const std::ptrdiff_t available = idx - static_cast<std::ptrdiff_t>(start) + 1;
        const int take = static_cast<int>(std::min<std::ptrdiff_t>(k, available));
        units.push_back({values[static_cast<std::size_t>(idx)], take});
        idx -= take;
        ++groups;
      }
      groups_collide = groups_collide || groups > 1;
    }
    start = end;
  }
  if (groups_collide) heal_units(units, view.lo, view.hi, grid);
  return assemble(view, std::move(units));
}

KnotVectord adjust_knots(const KnotVectord& knots, const Eigen::VectorXd& grid, const KnotMapOptions& options) {
  return options.adjust == KnotAdjust::merge ? merge_knots(knots, grid) : heal_knots(knots, grid);
}

}  // namespace shapes
