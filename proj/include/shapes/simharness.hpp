#pragma once

// Monte Carlo campaigns: fit many noisy realizations of a benchmark and
// summarize the error of the estimates.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "shapes/benchmarks.hpp"
#include "shapes/label.hpp"
#include "shapes/model_search.hpp"

namespace shapes {

inline constexpr int default_bootstrap_resamples = 10'000;
inline constexpr std::uint64_t default_bootstrap_seed = 20190301;

struct CampaignSpec {
  BenchmarkId benchmark = BenchmarkId::f1;
  double snr = 100.0;
  int num_realizations = 100;
  ShapesConfig config;
  /// Realization j (0-based) uses noise seed first_seed + j.
  std::uint64_t first_seed = 1;
  int bootstrap_resamples = default_bootstrap_resamples;
  std::uint64_t bootstrap_seed = default_bootstrap_seed;
  /// Realizations processed concurrently.
  unsigned jobs = 1;

  [[nodiscard]] std::string label() const { return format_label(label_of(config, snr)); }
  void validate() const;
};

/// Spec from a key string; remaining fields keep their defaults.
CampaignSpec campaign_from_label(BenchmarkId benchmark, std::string_view label, int num_realizations);

struct SimulationRecord {
  int index = 0;
  std::uint64_t seed = 0;
  int best_num_knots = 0;
  double fitness = 0.0;
  double squared_error = 0.0;              // ||f - f_hat||^2 for the configured estimate
  double squared_error_uncorrected = 0.0;  // same without bias correction
  double scale = 1.0;
  Eigen::VectorXd estimate;  // empty when read back from CSV
};

struct CampaignSummary {
  double rmse = 0.0;
  double rmse_error = 0.0;
  double rmse_uncorrected = 0.0;
  double rmse_uncorrected_error = 0.0;
  double mean_knots = 0.0;
  double knots_std = 0.0;
  std::vector<SimulationRecord> records;
  Eigen::VectorXd grid;
  Eigen::VectorXd truth;
};

double rmse(std::span<const double> squared_errors);

/// Standard deviation of the RMSE over `resamples` draws with replacement.
double bootstrap_error(std::span<const double> squared_errors, int resamples = default_bootstrap_resamples,
                       std::uint64_t seed = default_bootstrap_seed);

/// Aggregates for a set of records (records are copied into the summary).
CampaignSummary summarize(std::vector<SimulationRecord> records, int bootstrap_resamples = default_bootstrap_resamples,
                          std::uint64_t bootstrap_seed = default_bootstrap_seed);

using ProgressCallback = std::function<void(int done, int total)>;

/// Throws ModelFitError (naming the realization) if any realization fails.
CampaignSummary run_campaign(const CampaignSpec& spec, const ProgressCallback& progress = {});

/// Pointwise sample mean and standard deviation of the stored estimates.
struct Envelope {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
};
Envelope estimate_envelope(const std::vector<SimulationRecord>& records);

nlohmann::json spec_to_json(const CampaignSpec& spec);
CampaignSpec spec_from_json(const nlohmann::json& j);
nlohmann::json summary_to_json(const CampaignSummary& summary, const CampaignSpec& spec);

void write_records_csv(const std::filesystem::path& path, const std::vector<SimulationRecord>& records);
std::vector<SimulationRecord> read_records_csv(const std::filesystem::path& path);
/// One row per realization, one column per grid point.
void write_estimates_csv(const std::filesystem::path& path, const CampaignSummary& summary);

/// Formats with 17 significant digits.
std::string format_double(double value);

}  // namespace shapes
