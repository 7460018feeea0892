#pragma once

// The ten benchmark signals, SNR normalization, and noisy data realizations.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "shapes/bspline.hpp"

namespace shapes {

enum class BenchmarkId { f1 = 1, f2, f3, f4, f5, f6, f7, f8, f9, f10 };

inline constexpr std::array<BenchmarkId, 10> all_benchmarks{
    BenchmarkId::f1, BenchmarkId::f2, BenchmarkId::f3, BenchmarkId::f4, BenchmarkId::f5,
    BenchmarkId::f6, BenchmarkId::f7, BenchmarkId::f8, BenchmarkId::f9, BenchmarkId::f10};

inline constexpr int realization_length = 256;

std::string benchmark_name(BenchmarkId id);
/// Accepts "f1".."f10" (case-insensitive); throws InputError otherwise.
BenchmarkId parse_benchmark(std::string_view name);
/// Human-readable formula and natural domain.
std::string benchmark_description(BenchmarkId id);

/// Knots (0.3 x4, 0.4, 0.45, 0.5, 0.55 x4) of the cubic B-spline bump
/// underlying f7, f8 and f9.
const KnotVectord& bump_knots();
/// B_{3,4}(x) on bump_knots(), zero outside the knot span.
double bump(double x);

/// Unnormalized benchmark on a grid in [0,1], mapped affinely onto the
/// function's natural domain.
Eigen::VectorXd evaluate_benchmark(BenchmarkId id, const Eigen::VectorXd& grid);

/// Samples scaled so that their L2 norm equals snr (noise sigma = 1).
Eigen::VectorXd normalize_snr(const Eigen::VectorXd& samples, double snr);

/// n uniformly spaced points with x_0 = 0 and x_{n-1} = 1.
Eigen::VectorXd uniform_grid(Eigen::Index n = realization_length);

struct DataRealization {
  Eigen::VectorXd grid;
  Eigen::VectorXd truth;
  Eigen::VectorXd y;
  std::uint64_t seed = 0;
};

/// Truth scaled to the SNR plus iid N(0,1) noise from the stream of `seed`.
DataRealization generate_realization(BenchmarkId id, double snr, std::uint64_t seed);

}  // namespace shapes
