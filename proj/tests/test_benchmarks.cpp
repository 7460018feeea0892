#include <doctest.h>

#include "shapes/benchmarks.hpp"
#include "shapes/errors.hpp"
#include "shapes/penalized_fit.hpp"

using namespace shapes;

namespace {

double at(BenchmarkId id, double x) { return evaluate_benchmark(id, Eigen::VectorXd::Constant(1, x))[0]; }

}  // namespace

TEST_CASE("names round-trip") {
  for (const BenchmarkId id : all_benchmarks) CHECK(parse_benchmark(benchmark_name(id)) == id);
  CHECK(parse_benchmark("F10") == BenchmarkId::f10);
  CHECK_THROWS_AS(parse_benchmark("f11"), InputError);
  CHECK_THROWS_AS(parse_benchmark("sin"), InputError);
}

TEST_CASE("reference values") {
  CHECK(at(BenchmarkId::f1, 0.4) == doctest::Approx(45.0).epsilon(1e-15));
  CHECK(at(BenchmarkId::f10, 0.5) == 0.0);
  const double left = at(BenchmarkId::f6, std::nextafter(0.5, 0.0));
  CHECK(left == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at(BenchmarkId::f6, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  // f4 and f5 map [0,1] onto [-2,2]: x = 0.5 is the natural origin.
  CHECK(at(BenchmarkId::f4, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(at(BenchmarkId::f5, 0.5) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(at(BenchmarkId::f3, 0.5) == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("bump is the cubic B-spline on its knots") {
  CHECK(bump(0.3) == 0.0);
  CHECK(bump(0.55) == 0.0);
  CHECK(bump(0.2) == 0.0);
  CHECK(bump(0.9) == 0.0);
  CHECK(bump(0.45) > 0.5);
  CHECK(at(BenchmarkId::f8, 0.45) == doctest::Approx(bump(0.45) + bump(0.325)).epsilon(1e-15));
  CHECK(at(BenchmarkId::f9, 0.7) == doctest::Approx(bump(0.45) + bump(0.575)).epsilon(1e-15));
}

TEST_CASE("all functions are finite on [0,1]") {
  const Eigen::VectorXd grid = uniform_grid(4097);
  for (const BenchmarkId id : all_benchmarks) CHECK(evaluate_benchmark(id, grid).allFinite());
  CHECK_THROWS_AS(evaluate_benchmark(BenchmarkId::f1, Eigen::VectorXd::Constant(1, 1.5)), InputError);
}

TEST_CASE("jump discontinuities stand out against the local slope") {
  const double h = 1.0 / 255.0;
  for (const auto& [id, x0] : {std::pair{BenchmarkId::f2, 0.6}, std::pair{BenchmarkId::f6, 0.5}}) {
    const double below = at(id, x0 - h);
    const double above = at(id, x0 + h);
    const double slope = (at(id, x0 - h) - at(id, x0 - 2 * h)) / h;
    CHECK(std::abs(above - below) > 10.0 * std::abs(slope) * 2.0 * h);
  }
}

TEST_CASE("f7 to f9 are cubic splines on the bump knots") {
  const Eigen::VectorXd grid = uniform_grid();
  const Eigen::VectorXd y = evaluate_benchmark(BenchmarkId::f7, grid);
  Eigen::VectorXd values(13);
  values << 0, 0, 0, 0, 0.3, 0.4, 0.45, 0.5, 0.55, 1, 1, 1, 1;
  CHECK(fitness(KnotVectord(values, 4), grid, y, 0.0).fitness < 1e-10);
  // f8 adds a copy shifted right by 0.125; the union of both knot sets suffices.
  Eigen::VectorXd v8(18);
  v8 << 0, 0, 0, 0, 0.3, 0.4, 0.425, 0.45, 0.5, 0.525, 0.55, 0.575, 0.625, 0.675, 1, 1, 1, 1;
  const Eigen::VectorXd y8 = evaluate_benchmark(BenchmarkId::f8, grid);
  CHECK(fitness(KnotVectord(v8, 4), grid, y8, 0.0).fitness < 1e-10);
}

TEST_CASE("SNR normalization") {
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(4);
  unit[1] = 1.0;
  CHECK(normalize_snr(unit, 10.0)[1] == 10.0);
  for (const BenchmarkId id : all_benchmarks) {
    const Eigen::VectorXd f = normalize_snr(evaluate_benchmark(id, uniform_grid()), 100.0);
    CHECK(std::abs(f.norm() - 100.0) <= 1e-12);
    CHECK((normalize_snr(f, 100.0) - f).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK_THROWS_AS(normalize_snr(Eigen::VectorXd::Zero(4), 10.0), InputError);
  CHECK_THROWS_AS(normalize_snr(unit, 0.0), InputError);
}

TEST_CASE("realizations") {
  const DataRealization a = generate_realization(BenchmarkId::f3, 10.0, 17);
  const DataRealization b = generate_realization(BenchmarkId::f3, 10.0, 17);
  const DataRealization c = generate_realization(BenchmarkId::f3, 10.0, 18);
  CHECK(a.y == b.y);
  CHECK(a.y != c.y);
  CHECK(a.grid.size() == 256);
  CHECK(a.grid[0] == 0.0);
  CHECK(a.grid[255] == 1.0);
  CHECK(std::abs(a.truth.norm() - 10.0) <= 1e-12);
}

TEST_CASE("noise statistics over 1000 realizations") {
  double sum = 0.0;
  double sum_sq = 0.0;
  const int realizations = 1000;
  for (int j = 0; j < realizations; ++j) {
    const DataRealization r = generate_realization(BenchmarkId::f1, 100.0, static_cast<std::uint64_t>(j + 1));
    const Eigen::VectorXd noise = r.y - r.truth;
    sum += noise.sum();
    sum_sq += noise.squaredNorm();
  }
  const double n = 256.0 * realizations;
  const double mean = sum / n;
  const double variance = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(n));
  CHECK(variance >= 0.99);
  CHECK(variance <= 1.01);
}
