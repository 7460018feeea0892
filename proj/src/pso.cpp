#include "shapes/pso.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shapes {

SwarmConfig SwarmConfig::with_unit_box(Eigen::Index dimension) const {
  SwarmConfig out = *this;
  out.lower = Eigen::VectorXd::Zero(dimension);
  out.upper = Eigen::VectorXd::Ones(dimension);
  return out;
}

void SwarmConfig::validate() const {
  if (num_particles < 2) throw std::invalid_argument("swarm needs at least 2 particles");
  if (num_iterations < 1) throw std::invalid_argument("swarm needs at least 1 iteration");
  if (w_max < w_min) throw std::invalid_argument("w_max must not be below w_min");
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("search box bounds must be nonempty and of equal length");
  }
  if (!((upper - lower).array() > 0.0).all()) {
    throw std::invalid_argument("search box needs upper > lower in every dimension");
  }
  if (!(v_max_fraction > 0.0)) throw std::invalid_argument("v_max_fraction must be positive");
}

std::pair<int, int> ring_neighbors(int i, int np) {
  if (np < 2 || i < 1 || i > np) {
    std::ostringstream os;
    os << "particle index " << i << " outside 1.." << np;
    throw std::out_of_range(os.str());
  }
  const int left = i == 1 ? np : i - 1;
  const int right = i == np ? 1 : i + 1;
  return {left, right};
}

double inertia_weight(const SwarmConfig& config, int k) {
  if (config.num_iterations <= 1) return config.w_max;
  const double t = static_cast<double>(k - 1) / static_cast<double>(config.num_iterations - 1);
  return config.w_max - (config.w_max - config.w_min) * t;
}

Eigen::VectorXd clamp_velocity(const Eigen::VectorXd& v, const Eigen::VectorXd& v_max) {
  return v.cwiseMax(-v_max).cwiseMin(v_max);
}

bool inside_box(const Eigen::Ref<const Eigen::VectorXd>& x, const SwarmConfig& config) {
  return (x.array() >= config.lower.array()).all() && (x.array() <= config.upper.array()).all();
}

SwarmState initialize_swarm(const SwarmConfig& config) {
  config.validate();
  const Eigen::Index d = config.dimension();
  const int np = config.num_particles;
  SwarmState state;
  state.rng = make_stream(StreamKind::pso, config.seed, config.stream_tag);
  state.positions.resize(d, np);
  state.velocities.resize(d, np);
  for (int i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      std::uniform_real_distribution<double> pos(config.lower[j], config.upper[j]);
      const double x = pos(state.rng);
      std::uniform_real_distribution<double> vel(config.lower[j] - x, config.upper[j] - x);
      state.positions(j, i) = x;
      state.velocities(j, i) = vel(state.rng);
    }
  }
  state.fitness = Eigen::VectorXd::Constant(np, infinite_fitness);
  state.personal_best = state.positions;
  state.personal_best_fitness = Eigen::VectorXd::Constant(np, infinite_fitness);
  state.local_best = state.positions;
  state.global_best = state.positions.col(0);
  state.global_best_fitness = infinite_fitness;
  return state;
}

namespace {

double evaluate(const Objective& objective, const Eigen::Ref<const Eigen::VectorXd>& x,
                const SwarmConfig& config) {
  if (!inside_box(x, config)) return infinite_fitness;
  const double f = objective(x);
  return std::isnan(f) ? infinite_fitness : f;
}

}  // namespace

void step_swarm(SwarmState& state, const SwarmConfig& config, const Objective& objective, int k) {
  const int np = config.num_particles;
  const Eigen::Index d = config.dimension();

  for (int i = 0; i < np; ++i) state.fitness[i] = evaluate(objective, state.positions.col(i), config);

  // Strict improvement only: the incumbent wins ties.
  for (int i = 0; i < np; ++i) {
    if (state.fitness[i] < state.personal_best_fitness[i]) {
      state.personal_best_fitness[i] = state.fitness[i];
      state.personal_best.col(i) = state.positions.col(i);
    }
  }
  for (int i = 0; i < np; ++i) {
    if (state.personal_best_fitness[i] < state.global_best_fitness) {
      state.global_best_fitness = state.personal_best_fitness[i];
      state.global_best = state.personal_best.col(i);
    }
  }
  // Before any particle has landed inside the box, p_g stays at a box point.
  if (state.global_best_fitness == infinite_fitness && !inside_box(state.global_best, config)) {
    state.global_best = state.global_best.cwiseMax(config.lower).cwiseMin(config.upper);
  }

  for (int i = 1; i <= np; ++i) {
    const auto [left, right] = ring_neighbors(i, np);
    int best = i - 1;
    for (const int j : {left - 1, right - 1}) {
      if (state.personal_best_fitness[j] < state.personal_best_fitness[best]) best = j;
    }
    state.local_best.col(i - 1) = state.personal_best.col(best);
  }

  const double w = inertia_weight(config, k);
  const Eigen::VectorXd v_max = config.v_max();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd r1(d);
  Eigen::VectorXd r2(d);
  for (int i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) r1[j] = unit(state.rng);
    for (Eigen::Index j = 0; j < d; ++j) r2[j] = unit(state.rng);
    const Eigen::VectorXd x = state.positions.col(i);
    Eigen::VectorXd v = w * state.velocities.col(i) +
                        config.c1 * r1.cwiseProduct(state.personal_best.col(i) - x) +
                        config.c2 * r2.cwiseProduct(state.local_best.col(i) - x);
    v = clamp_velocity(v, v_max);
    state.velocities.col(i) = v;
    state.positions.col(i) = x + v;
  }
  state.iteration = k;
}

PsoResult run_pso(const Objective& objective, const SwarmConfig& config) {
  long long evaluations = 0;
  const Objective counted = [&](const Eigen::Ref<const Eigen::VectorXd>& x) {
    ++evaluations;
    return objective(x);
  };
  SwarmState state = initialize_swarm(config);
  PsoResult result;
  result.best_fitness_history.reserve(static_cast<std::size_t>(config.num_iterations));
  for (int k = 1; k <= config.num_iterations; ++k) {
    step_swarm(state, config, counted, k);
    result.best_fitness_history.push_back(state.global_best_fitness);
  }
  result.best_location = state.global_best;
  result.best_fitness = state.global_best_fitness;
  result.evaluations = evaluations;
  return result;
}

}  // namespace shapes
