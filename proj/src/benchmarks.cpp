#include "shapes/benchmarks.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "shapes/errors.hpp"
#include "shapes/rng.hpp"

namespace shapes {

std::string benchmark_name(BenchmarkId id) { return "f" + std::to_string(static_cast<int>(id)); }

BenchmarkId parse_benchmark(std::string_view name) {
  std::string lower;
  for (const char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (const BenchmarkId id : all_benchmarks) {
    if (benchmark_name(id) == lower) return id;
  }
  throw InputError("unknown benchmark '" + std::string(name) + "' (expected f1..f10)");
}

std::string benchmark_description(BenchmarkId id) {
  switch (id) {
    case BenchmarkId::f1: return "90/(1+exp(-100(x-0.4))), x in [0,1]";
    case BenchmarkId::f2: return "1/(0.01+(x-0.3)^2) for x<0.6, 1/(0.015+(x-0.65)^2) otherwise, x in [0,1]";
    case BenchmarkId::f3: return "100 exp(-|10x-5|) + (10x-5)^5/500, x in [0,1]";
    case BenchmarkId::f4: return "sin(x) + 2 exp(-30x^2), x in [-2,2]";
    case BenchmarkId::f5: return "sin(2x) + 2 exp(-16x^2) + 2, x in [-2,2]";
    case BenchmarkId::f6: return "piecewise cubic with a jump at 0.5, x in [0,1]";
    case BenchmarkId::f7: return "cubic B-spline bump on knots (0.3,0.4,0.45,0.5,0.55), x in [0,1]";
    case BenchmarkId::f8: return "bump(x) + bump(x-0.125), x in [0,1]";
    case BenchmarkId::f9: return "bump(x-0.25) + bump(x-0.125), x in [0,1]";
    case BenchmarkId::f10: return "exp(-(x-0.5)^2/0.125) sin(10.24 pi (x-0.5)), x in [0,1]";
  }
  return {};
}

const KnotVectord& bump_knots() {
  static const KnotVectord knots = [] {
    Eigen::VectorXd v(11);
    v << 0.3, 0.3, 0.3, 0.3, 0.4, 0.45, 0.5, 0.55, 0.55, 0.55, 0.55;
    return KnotVectord(v, 4);
  }();
  return knots;
}

double bump(double x) {
  const KnotVectord& knots = bump_knots();
  if (!knots.contains(x)) return 0.0;
  const LocalBasis<double> local = local_basis(knots, x);
  const Eigen::Index slot = 3 - local.first;
  return slot >= 0 && slot < local.values.size() ? local.values[slot] : 0.0;
}

namespace {

double f2(double x) { return x < 0.6 ? 1.0 / (0.01 + (x - 0.3) * (x - 0.3)) : 1.0 / (0.015 + (x - 0.65) * (x - 0.65)); }

double f6(double x) {
  if (x < 0.5) return 4.0 * x * x * (3.0 - 4.0 * x);
  if (x < 0.75) return 4.0 / 3.0 * x * (4.0 * x * x - 10.0 * x + 7.0) - 1.5;
  return 16.0 / 3.0 * x * (x - 1.0) * (x - 1.0);
}

double evaluate_one(BenchmarkId id, double x) {
  using std::numbers::pi;
  switch (id) {
    case BenchmarkId::f1: return 90.0 / (1.0 + std::exp(-100.0 * (x - 0.4)));
    case BenchmarkId::f2: return f2(x);
    case BenchmarkId::f3: {
      const double u = 10.0 * x - 5.0;
      return 100.0 * std::exp(-std::abs(u)) + std::pow(u, 5) / 500.0;
    }
    case BenchmarkId::f4: {
      const double u = -2.0 + 4.0 * x;
      return std::sin(u) + 2.0 * std::exp(-30.0 * u * u);
    }
    case BenchmarkId::f5: {
      const double u = -2.0 + 4.0 * x;
      return std::sin(2.0 * u) + 2.0 * std::exp(-16.0 * u * u) + 2.0;
    }
    case BenchmarkId::f6: return f6(x);
    case BenchmarkId::f7: return bump(x);
    case BenchmarkId::f8: return bump(x) + bump(x - 0.125);
    case BenchmarkId::f9: return bump(x - 0.25) + bump(x - 0.125);
    case BenchmarkId::f10:
      return std::exp(-(x - 0.5) * (x - 0.5) / 0.125) * std::sin(10.24 * pi * (x - 0.5));
  }
  throw InputError("unknown benchmark id");
}

}  // namespace

Eigen::VectorXd evaluate_benchmark(BenchmarkId id, const Eigen::VectorXd& grid) {
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw InputError("benchmark grid must lie in [0,1]");
    out[i] = evaluate_one(id, grid[i]);
  }
  return out;
}

Eigen::VectorXd normalize_snr(const Eigen::VectorXd& samples, double snr) {
  if (!(snr > 0.0)) throw InputError("SNR must be positive");
  const double norm = samples.norm();
  if (!(norm > 0.0)) throw InputError("cannot normalize a zero signal");
  return samples * (snr / norm);
}

Eigen::VectorXd uniform_grid(Eigen::Index n) {
  if (n < 2) throw InputError("grid needs at least 2 points");
  return Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
}

DataRealization generate_realization(BenchmarkId id, double snr, std::uint64_t seed) {
  DataRealization out;
  out.seed = seed;
  out.grid = uniform_grid();
  out.truth = normalize_snr(evaluate_benchmark(id, out.grid), snr);
  Rng rng = make_stream(StreamKind::noise, seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  out.y.resize(out.grid.size());
  for (Eigen::Index i = 0; i < out.y.size(); ++i) out.y[i] = out.truth[i] + noise(rng);
  return out;
}

}  // namespace shapes
