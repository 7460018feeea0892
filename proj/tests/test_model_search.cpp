#include <doctest.h>

#include <random>

#include "shapes/benchmarks.hpp"
#include "shapes/errors.hpp"
#include "shapes/model_search.hpp"
#include "shapes/penalized_fit.hpp"
#include "shapes/rng.hpp"

using namespace shapes;

namespace {

const Eigen::VectorXd grid = uniform_grid();

ShapesConfig quick_config() {
  ShapesConfig c;
  c.model_set = {5, 6, 7};
  c.swarm.num_iterations = 30;
  c.swarm.num_particles = 20;
  return c;
}

Eigen::VectorXd noisy_f10(std::uint64_t seed) { return generate_realization(BenchmarkId::f10, 10.0, seed).y; }

}  // namespace

TEST_CASE("aic") {
  CHECK(aic(5, 100.0) == 120.0);
  CHECK(aic(5, 100.0) < aic(5, 100.5));
  CHECK(aic(5, 100.0) < aic(6, 100.0));
}

TEST_CASE("bias correction") {
  Rng rng = make_stream(StreamKind::test, 51);
  std::normal_distribution<double> normal;
  Eigen::VectorXd f(32);
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = normal(rng);
  f.normalize();
  SUBCASE("exact amplitude") {
    const BiasCorrection b = bias_correct(f, 2.0 * f);
    CHECK(b.scale == doctest::Approx(2.0).epsilon(1e-14));
    CHECK((b.estimate - 2.0 * f).norm() <= 1e-13);
    CHECK_FALSE(b.degenerate);
  }
  SUBCASE("orthogonal data") {
    Eigen::VectorXd y(32);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
    y -= y.dot(f) * f;
    CHECK(std::abs(bias_correct(f, y).scale) <= 1e-12);
  }
  SUBCASE("invariant to rescaling the estimate") {
    Eigen::VectorXd y(32);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
    const BiasCorrection a = bias_correct(f, y);
    const BiasCorrection b = bias_correct(7.5 * f, y);
    CHECK(a.scale == doctest::Approx(b.scale).epsilon(1e-13));
    CHECK((a.estimate - b.estimate).norm() <= 1e-12);
  }
  SUBCASE("zero estimate passes through flagged") {
    const BiasCorrection b = bias_correct(Eigen::VectorXd::Zero(32), f);
    CHECK(b.degenerate);
    CHECK(b.scale == 0.0);
    CHECK(b.estimate.isZero(0.0));
  }
}

TEST_CASE("fit_model is deterministic and keeps the best run") {
  const ShapesConfig c = quick_config();
  const Eigen::VectorXd y = noisy_f10(3);
  const ModelResult a = fit_model(y, grid, 6, c);
  const ModelResult b = fit_model(y, grid, 6, c);
  CHECK(a.knots == b.knots);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.run_fitness == b.run_fitness);
  REQUIRE(a.run_fitness.size() == 4);
  const double min_run = *std::min_element(a.run_fitness.begin(), a.run_fitness.end());
  CHECK(a.fitness == doctest::Approx(min_run).epsilon(1e-12));
  CHECK(a.run_fitness[static_cast<std::size_t>(a.best_run - 1)] == min_run);
  CHECK(a.aic == aic(6, a.fitness));
  // The stored artifacts reproduce the reported fitness.
  const auto f = fitness(a.knots, grid, y, c.lambda);
  CHECK(f.fitness == doctest::Approx(a.fitness).epsilon(1e-12));
  CHECK((evaluate_spline(a.knots, a.coefficients, grid) - a.estimate).norm() <= 1e-12);
}

TEST_CASE("threaded runs give the same result as sequential runs") {
  ShapesConfig c = quick_config();
  const Eigen::VectorXd y = noisy_f10(4);
  const ModelResult sequential = fit_model(y, grid, 7, c);
  c.jobs = 4;
  const ModelResult threaded = fit_model(y, grid, 7, c);
  CHECK(sequential.run_fitness == threaded.run_fitness);
  CHECK(sequential.knots == threaded.knots);
}

TEST_CASE("seed_base changes the PSO streams") {
  ShapesConfig c = quick_config();
  const Eigen::VectorXd y = noisy_f10(5);
  const ModelResult a = fit_model(y, grid, 7, c);
  c.seed_base = 100;
  const ModelResult b = fit_model(y, grid, 7, c);
  CHECK(a.run_fitness != b.run_fitness);
}

TEST_CASE("shapes_fit selects the minimum AIC and reports diagnostics") {
  ShapesConfig c = quick_config();
  c.model_set = {5, 7, 9};
  const Eigen::VectorXd y = noisy_f10(6);
  const ShapesEstimate est = shapes_fit(y, grid, c);
  REQUIRE(est.models.size() == 3);
  double best_aic = est.models.front().aic;
  for (const auto& m : est.models) best_aic = std::min(best_aic, m.aic);
  CHECK(est.best_model().aic == best_aic);
  CHECK(std::find(c.model_set.begin(), c.model_set.end(), est.best_num_knots) != c.model_set.end());
  CHECK(est.fitness == est.best_model().fitness);
  CHECK(est.bias_corrected);
  const BiasCorrection expected = bias_correct(est.best_model().estimate, y);
  CHECK((est.estimate - expected.estimate).norm() <= 1e-12);
  CHECK(est.uncorrected_estimate == est.best_model().estimate);

  c.bias_correction = false;
  const ShapesEstimate plain = shapes_fit(y, grid, c);
  CHECK(plain.estimate == plain.best_model().estimate);
  CHECK(plain.scale == 1.0);
  CHECK_FALSE(plain.bias_corrected);
}

TEST_CASE("AIC ties go to fewer knots") {
  std::vector<ModelResult> models(3);
  models[0].num_knots = 9;
  models[0].aic = 50.0;
  models[1].num_knots = 6;
  models[1].aic = 50.0;
  models[2].num_knots = 7;
  models[2].aic = 51.0;
  CHECK(select_model(models) == 1);
  CHECK_THROWS_AS(select_model({}), ModelFitError);
}

TEST_CASE("invalid configurations are rejected") {
  ShapesConfig c;
  c.model_set = {6, 5};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.model_set = {};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ShapesConfig{};
  c.num_runs = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ShapesConfig{};
  c.lambda = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(shapes_fit(Eigen::VectorXd::Zero(10), grid, ShapesConfig{}), IllPosedError);
}

TEST_CASE("too few data points for every model is an aggregate error") {
  ShapesConfig c = quick_config();
  c.model_set = {16, 18};
  const Eigen::VectorXd small_grid = Eigen::VectorXd::LinSpaced(12, 0.0, 1.0);
  CHECK_THROWS_AS(shapes_fit(Eigen::VectorXd::Ones(12), small_grid, c), ModelFitError);
}

TEST_CASE("noiseless cubic spline with five knots is fitted exactly") {
  Eigen::VectorXd values(11);
  values << 0, 0, 0, 0, 0.2, 0.45, 0.7, 1, 1, 1, 1;
  const KnotVectord knots(values, 4);
  Eigen::VectorXd alpha(7);
  alpha << 3.0, -2.0, 5.0, 1.0, -4.0, 6.0, 2.0;
  const Eigen::VectorXd y = evaluate_spline(knots, alpha, grid);
  ShapesConfig c;
  c.lambda = 0.0;
  c.swarm.num_iterations = 1000;
  const ModelResult r = fit_model(y, grid, 5, c);
  CHECK(r.fitness < 1e-6 * y.squaredNorm());
}

TEST_CASE("noiseless f7 at SNR scale is recovered with seven knots") {
  const Eigen::VectorXd y = normalize_snr(evaluate_benchmark(BenchmarkId::f7, grid), 100.0);
  ShapesConfig c;
  c.lambda = 0.0;
  c.model_set = {5, 6, 7, 8};
  c.swarm.num_iterations = 2000;
  c.bias_correction = false;
  const ShapesEstimate est = shapes_fit(y, grid, c);
  CHECK(est.best_num_knots <= 7);
  CHECK((est.estimate - y).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(est.fitness < 1e-6 * y.squaredNorm());
}
