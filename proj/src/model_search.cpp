#include "shapes/model_search.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "shapes/errors.hpp"
#include "shapes/parallel.hpp"
#include "shapes/penalized_fit.hpp"

namespace shapes {

void ShapesConfig::validate() const {
  if (model_set.empty()) throw std::invalid_argument("model set is empty");
  for (std::size_t i = 0; i < model_set.size(); ++i) {
    if (model_set[i] < 2) throw std::invalid_argument("every model needs at least 2 knots");
    if (i > 0 && model_set[i] <= model_set[i - 1]) {
      throw std::invalid_argument("model set must be strictly increasing");
    }
  }
  if (knots.end_knots == EndKnots::fixed && model_set.front() < 3) {
    throw std::invalid_argument("fixed end knots need models with at least 3 knots");
  }
  if (num_runs < 1) throw std::invalid_argument("num_runs must be at least 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("regulator gain must be nonnegative");
  if (knots.order < 1) throw std::invalid_argument("spline order must be at least 1");
}

const ModelResult& ShapesEstimate::best_model() const {
  for (const auto& m : models) {
    if (m.num_knots == best_num_knots) return m;
  }
  throw std::logic_error("best model missing from the model table");
}

double aic(int num_knots, double fitness) { return 4.0 * num_knots + fitness; }

BiasCorrection bias_correct(const Eigen::VectorXd& estimate, const Eigen::VectorXd& y) {
  if (estimate.size() != y.size()) throw IllPosedError("estimate and data lengths differ");
  const double norm = estimate.norm();
  if (!(norm > 0.0)) return {estimate, 0.0, true};
  const Eigen::VectorXd unit = estimate / norm;
  const double scale = y.dot(unit);
  return {scale * unit, scale, false};
}

KnotVectord knots_from_coordinates(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& grid,
                                   const KnotMapOptions& options) {
  return adjust_knots(map_to_knots(z, options), grid, options);
}

double knot_fitness(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& grid,
                    const Eigen::VectorXd& y, const ShapesConfig& config) {
  try {
    const KnotVectord knots = knots_from_coordinates(z, grid, config.knots);
    const FitOptions options{config.end_bsplines == EndBsplines::drop};
    const double f = fitness<double>(knots, grid, y, config.lambda, options).fitness;
    return std::isfinite(f) ? f : infinite_fitness;
  } catch (const Error&) {
    return infinite_fitness;
  }
}

ModelResult fit_model(const Eigen::VectorXd& y, const Eigen::VectorXd& grid, int num_knots,
                      const ShapesConfig& config) {
  if (y.size() != grid.size()) throw IllPosedError("data and grid lengths differ");
  const Eigen::Index dimension = search_dimension(num_knots, config.knots);
  if (dimension < 1) throw ModelFitError("model has no free knot coordinates");

  const Objective objective = [&](const Eigen::Ref<const Eigen::VectorXd>& z) {
    return knot_fitness(z, grid, y, config);
  };
  std::vector<PsoResult> runs(static_cast<std::size_t>(config.num_runs));
  parallel_for(runs.size(), config.jobs, [&](std::size_t r) {
    SwarmConfig swarm = config.swarm.with_unit_box(dimension);
    swarm.seed = config.seed_base + r + 1;
    swarm.stream_tag = static_cast<std::uint64_t>(num_knots);
    runs[r] = run_pso(objective, swarm);
  });

  ModelResult result;
  result.num_knots = num_knots;
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    result.run_fitness.push_back(runs[r].best_fitness);
    if (runs[r].best_fitness < runs[best].best_fitness) best = r;
  }
  if (!std::isfinite(runs[best].best_fitness)) {
    std::ostringstream os;
    os << "every PSO evaluation for M=" << num_knots << " returned infinite fitness";
    throw ModelFitError(os.str());
  }
  result.best_run = static_cast<int>(best) + 1;
  result.knots = knots_from_coordinates(runs[best].best_location, grid, config.knots);
  const FitOptions options{config.end_bsplines == EndBsplines::drop};
  const auto fit = fitness<double>(result.knots, grid, y, config.lambda, options);
  result.coefficients = fit.coefficients.alpha;
  result.jittered = fit.coefficients.jittered;
  result.fitness = fit.fitness;
  result.aic = aic(num_knots, result.fitness);
  result.estimate = evaluate_spline<double>(result.knots, result.coefficients, grid, options);
  return result;
}

std::size_t select_model(const std::vector<ModelResult>& models) {
  if (models.empty()) throw ModelFitError("no model to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < models.size(); ++i) {
    const bool lower = models[i].aic < models[best].aic;
    const bool tie_fewer = models[i].aic == models[best].aic && models[i].num_knots < models[best].num_knots;
    if (lower || tie_fewer) best = i;
  }
  return best;
}

ShapesEstimate shapes_fit(const Eigen::VectorXd& y, const Eigen::VectorXd& grid, const ShapesConfig& config) {
  config.validate();
  check_grid(grid);
  if (y.size() != grid.size()) throw IllPosedError("data and grid lengths differ");

  ShapesEstimate out;
  for (const int m : config.model_set) {
    try {
      out.models.push_back(fit_model(y, grid, m, config));
    } catch (const Error& e) {
      out.model_failures.push_back(std::to_string(m) + ": " + e.what());
    }
  }
  if (out.models.empty()) {
    std::string what = "all models failed";
    for (const auto& f : out.model_failures) what += "; " + f;
    throw ModelFitError(what);
  }
  const ModelResult& best = out.models[select_model(out.models)];
  out.best_num_knots = best.num_knots;
  out.fitness = best.fitness;
  out.uncorrected_estimate = best.estimate;
  if (config.bias_correction) {
    BiasCorrection corrected = bias_correct(best.estimate, y);
    out.estimate = std::move(corrected.estimate);
    out.scale = corrected.scale;
    out.bias_corrected = !corrected.degenerate;
  } else {
    out.estimate = best.estimate;
  }
  return out;
}

}  // namespace shapes
