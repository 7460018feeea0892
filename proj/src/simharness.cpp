#include "shapes/simharness.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "shapes/errors.hpp"
#include "shapes/parallel.hpp"
#include "shapes/rng.hpp"

namespace shapes {

void CampaignSpec::validate() const {
  if (!(snr > 0.0)) throw InputError("SNR must be positive");
  if (num_realizations < 1) throw InputError("need at least one realization");
  if (bootstrap_resamples < 1) throw InputError("need at least one bootstrap resample");
  config.validate();
}

CampaignSpec campaign_from_label(BenchmarkId benchmark, std::string_view text, int num_realizations) {
  const Label label = parse_label(text);
  CampaignSpec spec;
  spec.benchmark = benchmark;
  spec.snr = label.snr;
  spec.num_realizations = num_realizations;
  spec.config = apply_label(label, spec.config);
  return spec;
}

double rmse(std::span<const double> squared_errors) {
  if (squared_errors.empty()) throw InputError("RMSE of an empty set");
  const double sum = std::accumulate(squared_errors.begin(), squared_errors.end(), 0.0);
  return std::sqrt(sum / static_cast<double>(squared_errors.size()));
}

double bootstrap_error(std::span<const double> squared_errors, int resamples, std::uint64_t seed) {
  if (squared_errors.empty()) throw InputError("bootstrap of an empty set");
  if (resamples < 2) return 0.0;
  Rng rng = make_stream(StreamKind::bootstrap, seed);
  std::uniform_int_distribution<std::size_t> pick(0, squared_errors.size() - 1);
  std::vector<double> values(static_cast<std::size_t>(resamples));
  for (double& v : values) {
    double sum = 0.0;
    for (std::size_t i = 0; i < squared_errors.size(); ++i) sum += squared_errors[pick(rng)];
    v = std::sqrt(sum / static_cast<double>(squared_errors.size()));
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

CampaignSummary summarize(std::vector<SimulationRecord> records, int bootstrap_resamples,
                          std::uint64_t bootstrap_seed) {
  if (records.empty()) throw InputError("no records to summarize");
  std::vector<double> corrected;
  std::vector<double> uncorrected;
  double knots_sum = 0.0;
  for (const auto& r : records) {
    corrected.push_back(r.squared_error);
    uncorrected.push_back(r.squared_error_uncorrected);
    knots_sum += r.best_num_knots;
  }
  CampaignSummary s;
  s.rmse = rmse(corrected);
  s.rmse_error = bootstrap_error(corrected, bootstrap_resamples, bootstrap_seed);
  s.rmse_uncorrected = rmse(uncorrected);
  s.rmse_uncorrected_error = bootstrap_error(uncorrected, bootstrap_resamples, bootstrap_seed);
  const double n = static_cast<double>(records.size());
  s.mean_knots = knots_sum / n;
  double ss = 0.0;
  for (const auto& r : records) ss += (r.best_num_knots - s.mean_knots) * (r.best_num_knots - s.mean_knots);
  s.knots_std = records.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.records = std::move(records);
  return s;
}

CampaignSummary run_campaign(const CampaignSpec& spec, const ProgressCallback& progress) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.num_realizations);
  std::vector<SimulationRecord> records(n);
  std::mutex progress_mutex;
  int done = 0;
  parallel_for(n, spec.jobs, [&](std::size_t j) {
    const std::uint64_t seed = spec.first_seed + j;
    const DataRealization data = generate_realization(spec.benchmark, spec.snr, seed);
    ShapesEstimate est;
    try {
      est = shapes_fit(data.y, data.grid, spec.config);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "realization " << j << " (seed " << seed << ") failed: " << e.what();
      throw ModelFitError(os.str());
    }
    SimulationRecord& rec = records[j];
    rec.index = static_cast<int>(j);
    rec.seed = seed;
    rec.best_num_knots = est.best_num_knots;
    rec.fitness = est.fitness;
    rec.squared_error = (data.truth - est.estimate).squaredNorm();
    rec.squared_error_uncorrected = (data.truth - est.uncorrected_estimate).squaredNorm();
    rec.scale = est.scale;
    rec.estimate = std::move(est.estimate);
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++done, static_cast<int>(n));
    }
  });
  CampaignSummary summary = summarize(std::move(records), spec.bootstrap_resamples, spec.bootstrap_seed);
  summary.grid = uniform_grid();
  summary.truth = normalize_snr(evaluate_benchmark(spec.benchmark, summary.grid), spec.snr);
  return summary;
}

Envelope estimate_envelope(const std::vector<SimulationRecord>& records) {
  if (records.empty() || records.front().estimate.size() == 0) throw InputError("records carry no estimates");
  const Eigen::Index len = records.front().estimate.size();
  Envelope env{Eigen::VectorXd::Zero(len), Eigen::VectorXd::Zero(len)};
  for (const auto& r : records) env.mean += r.estimate;
  env.mean /= static_cast<double>(records.size());
  if (records.size() > 1) {
    for (const auto& r : records) env.stddev.array() += (r.estimate - env.mean).array().square();
    env.stddev = (env.stddev / static_cast<double>(records.size() - 1)).cwiseSqrt();
  }
  return env;
}

nlohmann::json spec_to_json(const CampaignSpec& spec) {
  const ShapesConfig& c = spec.config;
  return {
      {"benchmark", benchmark_name(spec.benchmark)},
      {"snr", spec.snr},
      {"n_realizations", spec.num_realizations},
      {"label", spec.label()},
      {"models", c.model_set},
      {"num_runs", c.num_runs},
      {"bias_correction", c.bias_correction},
      {"first_seed", spec.first_seed},
      {"bootstrap_resamples", spec.bootstrap_resamples},
      {"bootstrap_seed", spec.bootstrap_seed},
      {"num_particles", c.swarm.num_particles},
  };
}

CampaignSpec spec_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("benchmark")) throw InputError("campaign spec needs a 'benchmark'");
    if (!j.contains("label")) throw InputError("campaign spec needs a 'label'");
    const BenchmarkId id = parse_benchmark(j.at("benchmark").get<std::string>());
    CampaignSpec spec = campaign_from_label(id, j.at("label").get<std::string>(), j.value("n_realizations", 100));
    if (j.contains("snr") && j.at("snr").get<double>() != spec.snr) {
      throw InputError("'snr' disagrees with the SNR in the label");
    }
    if (j.contains("models")) spec.config.model_set = j.at("models").get<std::vector<int>>();
    spec.config.num_runs = j.value("num_runs", spec.config.num_runs);
    spec.config.bias_correction = j.value("bias_correction", spec.config.bias_correction);
    spec.config.swarm.num_particles = j.value("num_particles", spec.config.swarm.num_particles);
    spec.first_seed = j.value("first_seed", spec.first_seed);
    spec.bootstrap_resamples = j.value("bootstrap_resamples", spec.bootstrap_resamples);
    spec.bootstrap_seed = j.value("bootstrap_seed", spec.bootstrap_seed);
    spec.jobs = j.value("jobs", spec.jobs);
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed campaign spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid campaign spec: ") + e.what());
  }
}

nlohmann::json summary_to_json(const CampaignSummary& summary, const CampaignSpec& spec) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : summary.records) {
    records.push_back({{"index", r.index},
                       {"seed", r.seed},
                       {"m_best", r.best_num_knots},
                       {"fitness", r.fitness},
                       {"squared_error", r.squared_error},
                       {"squared_error_uncorrected", r.squared_error_uncorrected},
                       {"scale", r.scale}});
  }
  return {
      {"spec", spec_to_json(spec)},
      {"rmse", summary.rmse},
      {"rmse_error", summary.rmse_error},
      {"rmse_uncorrected", summary.rmse_uncorrected},
      {"rmse_uncorrected_error", summary.rmse_uncorrected_error},
      {"mean_knots", summary.mean_knots},
      {"knots_std", summary.knots_std},
      {"records", records},
      {"versions", {{"shapes", SHAPES_VERSION}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                            std::to_string(EIGEN_MINOR_VERSION)}}},
  };
}

std::string format_double(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

void write_records_csv(const std::filesystem::path& path, const std::vector<SimulationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "index,seed,m_best,fitness,squared_error,squared_error_uncorrected,scale\n";
  for (const auto& r : records) {
    out << r.index << ',' << r.seed << ',' << r.best_num_knots << ',' << format_double(r.fitness) << ','
        << format_double(r.squared_error) << ',' << format_double(r.squared_error_uncorrected) << ','
        << format_double(r.scale) << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

std::vector<SimulationRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<SimulationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw InputError("malformed record line: " + line);
    SimulationRecord r;
    r.index = std::stoi(fields[0]);
    r.seed = std::stoull(fields[1]);
    r.best_num_knots = std::stoi(fields[2]);
    r.fitness = std::stod(fields[3]);
    r.squared_error = std::stod(fields[4]);
    r.squared_error_uncorrected = std::stod(fields[5]);
    r.scale = std::stod(fields[6]);
    records.push_back(r);
  }
  return records;
}

void write_estimates_csv(const std::filesystem::path& path, const CampaignSummary& summary) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "index";
  for (Eigen::Index i = 0; i < summary.grid.size(); ++i) out << ",x" << i;
  out << '\n';
  for (const auto& r : summary.records) {
    out << r.index;
    for (Eigen::Index i = 0; i < r.estimate.size(); ++i) out << ',' << format_double(r.estimate[i]);
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace shapes
