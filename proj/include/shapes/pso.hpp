#pragma once

// Local-best particle swarm optimization with a ring topology.
//
// Dynamics per iteration k (1-based):
//   1. evaluate every particle (positions outside the box get +inf and the
//      objective is not called),
//   2. update personal bests, then the global best,
//   3. compute local bests over {i-1, i, i+1} (ring),
//   4. v <- w[k] v + c1 r1 (p - x) + c2 r2 (l - x), clamp v to +-v_max,
//      x <- x + v.
// Inertia decreases linearly from w_max at k = 1 to w_min at k = N_iter.

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shapes/rng.hpp"

namespace shapes {

inline constexpr double infinite_fitness = std::numeric_limits<double>::infinity();

using Objective = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

struct SwarmConfig {
  int num_particles = 40;
  double c1 = 2.0;
  double c2 = 2.0;
  double w_max = 0.9;
  double w_min = 0.4;
  double v_max_fraction = 0.5;
  int num_iterations = 100;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::uint64_t seed = 1;
  std::uint64_t stream_tag = 0;

  /// Unit hypercube [0,1]^dimension with the remaining settings unchanged.
  [[nodiscard]] SwarmConfig with_unit_box(Eigen::Index dimension) const;
  [[nodiscard]] Eigen::Index dimension() const noexcept { return lower.size(); }
  [[nodiscard]] Eigen::VectorXd v_max() const { return v_max_fraction * (upper - lower); }
  /// Throws std::invalid_argument when the configuration is unusable.
  void validate() const;
};

/// Columns are particles.
struct SwarmState {
  Eigen::MatrixXd positions;
  Eigen::MatrixXd velocities;
  Eigen::VectorXd fitness;  // fitness of the current positions
  Eigen::MatrixXd personal_best;
  Eigen::VectorXd personal_best_fitness;
  Eigen::MatrixXd local_best;
  Eigen::VectorXd global_best;
  double global_best_fitness = infinite_fitness;
  int iteration = 0;  // number of completed iterations
  Rng rng;
};

/// Ring neighbors of particle i (1-based) in a swarm of np particles.
std::pair<int, int> ring_neighbors(int i, int np);

/// Inertia weight at iteration k (1-based).
double inertia_weight(const SwarmConfig& config, int k);

/// Elementwise clamp of v to [-v_max, v_max].
Eigen::VectorXd clamp_velocity(const Eigen::VectorXd& v, const Eigen::VectorXd& v_max);

bool inside_box(const Eigen::Ref<const Eigen::VectorXd>& x, const SwarmConfig& config);

/// Random initial positions and velocities; nothing evaluated yet.
SwarmState initialize_swarm(const SwarmConfig& config);

/// One full iteration k of the dynamics described above.
void step_swarm(SwarmState& state, const SwarmConfig& config, const Objective& objective, int k);

struct PsoResult {
  Eigen::VectorXd best_location;
  double best_fitness = infinite_fitness;
  std::vector<double> best_fitness_history;  // F(p_g[k]) for k = 1..N_iter
  long long evaluations = 0;
};

PsoResult run_pso(const Objective& objective, const SwarmConfig& config);

}  // namespace shapes
