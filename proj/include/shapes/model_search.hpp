#pragma once

// Adaptive spline fit: for each candidate number of knots, several
// independently seeded PSO runs minimize the penalized fitness over knot
// placements; the model with the lowest AIC = 4M + F wins and its estimate is
// optionally rescaled to undo the shrinkage caused by the penalty.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shapes/bspline.hpp"
#include "shapes/knotmap.hpp"
#include "shapes/pso.hpp"

namespace shapes {

enum class EndBsplines { keep, drop };

struct ShapesConfig {
  std::vector<int> model_set{5, 6, 7, 8, 9, 10, 12, 14, 16, 18};
  int num_runs = 4;
  double lambda = 0.1;
  SwarmConfig swarm;  // box and seed are filled in per run
  KnotMapOptions knots;
  EndBsplines end_bsplines = EndBsplines::keep;
  bool bias_correction = true;
  /// PSO run r (1-based) of model M draws from stream (seed_base + r, M).
  std::uint64_t seed_base = 0;
  /// Worker threads for the PSO runs of one model (1 = sequential).
  unsigned jobs = 1;

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

struct ModelResult {
  int num_knots = 0;
  int best_run = 0;  // 1-based
  KnotVectord knots{Eigen::VectorXd::LinSpaced(8, 0.0, 1.0), 4};
  Eigen::VectorXd coefficients;
  double fitness = infinite_fitness;
  double aic = infinite_fitness;
  std::vector<double> run_fitness;
  Eigen::VectorXd estimate;  // alpha . B on the grid
  bool jittered = false;
};

struct ShapesEstimate {
  int best_num_knots = 0;
  Eigen::VectorXd estimate;              // bias-corrected when enabled
  Eigen::VectorXd uncorrected_estimate;  // alpha . B of the winning model
  double fitness = infinite_fitness;     // F(M_best, r_{M_best}) before correction
  double scale = 1.0;                    // A; 1 when correction is disabled
  bool bias_corrected = false;
  std::vector<ModelResult> models;         // models that produced a finite fit
  std::vector<std::string> model_failures;  // "M: reason" for the others

  [[nodiscard]] const ModelResult& best_model() const;
};

struct BiasCorrection {
  Eigen::VectorXd estimate;
  double scale = 0.0;
  bool degenerate = false;  // zero-norm input passed through
};

double aic(int num_knots, double fitness);

/// Rescales the unit-norm shape of `estimate` by its least-squares amplitude against `y`.
BiasCorrection bias_correct(const Eigen::VectorXd& estimate, const Eigen::VectorXd& y);

/// Fitness of PSO coordinates z: map -> merge/heal -> penalized fit.
/// Infinite when any stage fails.
double knot_fitness(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& grid,
                    const Eigen::VectorXd& y, const ShapesConfig& config);

/// Knots the objective actually evaluates for coordinates z.
KnotVectord knots_from_coordinates(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& grid,
                                   const KnotMapOptions& options);

ModelResult fit_model(const Eigen::VectorXd& y, const Eigen::VectorXd& grid, int num_knots,
                      const ShapesConfig& config);

/// Picks the model with the smallest AIC; ties go to fewer knots.
std::size_t select_model(const std::vector<ModelResult>& models);

ShapesEstimate shapes_fit(const Eigen::VectorXd& y, const Eigen::VectorXd& grid, const ShapesConfig& config);

}  // namespace shapes
