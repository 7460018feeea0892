#include "shapes/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapes/benchmarks.hpp"
#include "shapes/errors.hpp"
#include "shapes/label.hpp"
#include "shapes/model_search.hpp"
#include "shapes/simharness.hpp"

namespace shapes {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct FitFlags {
  std::string label;
  std::string map = "plain";
  double lambda = 0.1;
  int iterations = 100;
  std::string ends = "fixed";
  std::string end_bsplines = "keep";
  std::string adjust = "merge";
};

struct CommonFlags {
  std::string models;
  int runs = 4;
  int particles = 40;
  bool no_bias_correction = false;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
};

// Removes the registered files unless release() is called.
class OutputGuard {
 public:
  void track(fs::path p) { paths_.push_back(std::move(p)); }
  void release() { paths_.clear(); }
  ~OutputGuard() {
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> paths_;
};

std::vector<int> parse_models(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--models: '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw InputError("--models: empty list");
  return out;
}

void apply_common(const CommonFlags& flags, ShapesConfig& config) {
  if (!flags.models.empty()) config.model_set = parse_models(flags.models);
  config.num_runs = flags.runs;
  config.swarm.num_particles = flags.particles;
  config.bias_correction = !flags.no_bias_correction;
  config.seed_base = flags.seed;
}

ShapesConfig config_from_flags(const FitFlags& f) {
  ShapesConfig config;
  if (!f.label.empty()) return apply_label(parse_label(f.label), config);
  config.knots.map = f.map == "plain" ? KnotMapKind::plain : KnotMapKind::centered_monotonic;
  config.lambda = f.lambda;
  config.swarm.num_iterations = f.iterations;
  config.knots.end_knots = f.ends == "fixed" ? EndKnots::fixed : EndKnots::variable;
  config.end_bsplines = f.end_bsplines == "keep" ? EndBsplines::keep : EndBsplines::drop;
  config.knots.adjust = f.adjust == "merge" ? KnotAdjust::merge : KnotAdjust::heal;
  return config;
}

struct XYData {
  std::vector<double> x;
  std::vector<double> y;
};

XYData read_xy_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  XYData data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ';', ',');
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    try {
      std::size_t ua = 0;
      std::size_t ub = 0;
      const double xv = std::stod(a, &ua);
      const double yv = std::stod(b, &ub);
      data.x.push_back(xv);
      data.y.push_back(yv);
    } catch (const std::exception&) {
      if (data.x.empty() && line_no == 1) continue;  // header
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": not numeric");
    }
  }
  if (data.x.size() < 3) throw InputError(path.string() + ": need at least 3 data rows");
  return data;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';  // shortest round-trip doubles
  if (!out) throw InputError("failed writing " + path.string());
}

json to_array(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

int cmd_fit(const FitFlags& flags, const CommonFlags& common, const std::string& in_path, const std::string& out_dir,
            std::ostream& out) {
  ShapesConfig config = config_from_flags(flags);
  apply_common(common, config);
  config.jobs = common.jobs;

  XYData data = read_xy_csv(in_path);
  std::vector<std::size_t> order(data.x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return data.x[a] < data.x[b]; });
  const double x_min = data.x[order.front()];
  const double x_max = data.x[order.back()];
  if (!(x_max > x_min)) throw InputError("x values must not all be equal");
  const auto n = static_cast<Eigen::Index>(order.size());
  Eigen::VectorXd grid(n);
  Eigen::VectorXd y(n);
  Eigen::VectorXd x_raw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t src = order[static_cast<std::size_t>(i)];
    x_raw[i] = data.x[src];
    grid[i] = (data.x[src] - x_min) / (x_max - x_min);
    y[i] = data.y[src];
  }
  grid[0] = 0.0;
  grid[n - 1] = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(grid[i] > grid[i - 1])) throw InputError("x values must be distinct");
  }

  const ShapesEstimate est = shapes_fit(y, grid, config);
  const ModelResult& best = est.best_model();

  fs::create_directories(out_dir);
  OutputGuard guard;
  const fs::path model_path = fs::path(out_dir) / "model.json";
  const fs::path estimate_path = fs::path(out_dir) / "estimate.csv";
  guard.track(model_path);
  guard.track(estimate_path);

  json table = json::array();
  for (const auto& m : est.models) {
    table.push_back({{"M", m.num_knots}, {"aic", m.aic}, {"fitness", m.fitness}, {"best_run", m.best_run},
                     {"run_fitness", m.run_fitness}});
  }
  const Eigen::VectorXd knots_unit = best.knots.values();
  const Eigen::VectorXd knots_x = x_min + (x_max - x_min) * knots_unit.array();
  json model = {
      {"m_best", est.best_num_knots},
      {"fitness", est.fitness},
      {"scale", est.scale},
      {"bias_corrected", est.bias_corrected},
      {"label", flags.label},
      {"map", config.knots.map == KnotMapKind::plain ? "plain" : "centered"},
      {"iterations", config.swarm.num_iterations},
      {"end_knots", config.knots.end_knots == EndKnots::fixed ? "fixed" : "variable"},
      {"adjust", config.knots.adjust == KnotAdjust::merge ? "merge" : "heal"},
      {"models", config.model_set},
      {"num_runs", config.num_runs},
      {"seed_base", config.seed_base},
      {"lambda", config.lambda},
      {"order", best.knots.order()},
      {"drop_end_bsplines", config.end_bsplines == EndBsplines::drop},
      {"knots", to_array(knots_unit)},
      {"knots_x", to_array(knots_x)},
      {"coefficients", to_array(best.coefficients)},
      {"aic_table", table},
      {"model_failures", est.model_failures},
      {"transform", {{"x_min", x_min}, {"x_max", x_max}, {"rule", "u = (x - x_min) / (x_max - x_min)"}}},
  };
  write_json(model_path, model);
  {
    std::ofstream csv(estimate_path);
    if (!csv) throw InputError("cannot write " + estimate_path.string());
    csv << "x,y,estimate\n";
    for (Eigen::Index i = 0; i < n; ++i) {
      csv << format_double(x_raw[i]) << ',' << format_double(y[i]) << ',' << format_double(est.estimate[i]) << '\n';
    }
    if (!csv) throw InputError("failed writing " + estimate_path.string());
  }
  guard.release();
  out << "M_best=" << est.best_num_knots << " fitness=" << format_double(est.fitness) << " -> " << out_dir << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive spline fitting with PSO-optimized free knots", "shapes"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a two-column CSV (x, y)");
  FitFlags fit_flags;
  CommonFlags fit_common;
  std::string fit_in;
  std::string fit_out;
  fit->add_option("--in", fit_in, "Input CSV with columns x,y")->required();
  fit->add_option("--out", fit_out, "Output directory")->required();
  auto* fit_label = fit->add_option("--label", fit_flags.label, "Settings key string, e.g. LP_100_0.1_100_FKM");
  std::vector<CLI::Option*> explicit_opts{
      fit->add_option("--map", fit_flags.map, "Knot map")->check(CLI::IsMember({"plain", "centered"})),
      fit->add_option("--lambda", fit_flags.lambda, "Regulator gain")->check(CLI::NonNegativeNumber),
      fit->add_option("--iters", fit_flags.iterations, "PSO iterations")->check(CLI::PositiveNumber),
      fit->add_option("--ends", fit_flags.ends, "End knots")->check(CLI::IsMember({"fixed", "variable"})),
      fit->add_option("--end-bsplines", fit_flags.end_bsplines, "End B-splines")
          ->check(CLI::IsMember({"keep", "drop"})),
      fit->add_option("--adjust", fit_flags.adjust, "Crowded knots")->check(CLI::IsMember({"merge", "heal"}))};
  for (auto* o : explicit_opts) fit_label->excludes(o);

  const auto add_common = [](CLI::App* cmd, CommonFlags& c) {
    cmd->add_option("--models", c.models, "Comma-separated knot counts (default 5,6,7,8,9,10,12,14,16,18)");
    cmd->add_option("--runs", c.runs, "PSO runs per model")->check(CLI::PositiveNumber);
    cmd->add_option("--particles", c.particles, "Particles per swarm")->check(CLI::Range(2, 100000));
    cmd->add_flag("--no-bias-correction", c.no_bias_correction, "Skip the amplitude rescaling step");
    cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  add_common(fit, fit_common);
  fit->add_option("--seed", fit_common.seed, "Offset added to PSO run seeds (default 0)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo campaign on a benchmark");
  CommonFlags sim_common;
  std::string sim_benchmark;
  std::string sim_label;
  std::string sim_spec;
  std::string sim_out = ".";
  std::optional<double> sim_snr;
  int sim_n = 100;
  std::uint64_t sim_seed = 1;
  bool sim_estimates = false;
  auto* sim_bench_opt = sim->add_option("--benchmark", sim_benchmark, "f1..f10");
  auto* sim_label_opt = sim->add_option("--label", sim_label, "Settings key string");
  auto* sim_spec_opt = sim->add_option("--spec", sim_spec, "Campaign spec JSON file")->check(CLI::ExistingFile);
  sim_spec_opt->excludes(sim_label_opt)->excludes(sim_bench_opt);
  sim->add_option("--snr", sim_snr, "SNR (must match the label)");
  auto* sim_n_opt = sim->add_option("--n,--nr", sim_n, "Number of realizations")->check(CLI::PositiveNumber);
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Noise seed of the first realization (default 1)");
  sim->add_option("--out", sim_out, "Output directory");
  sim->add_flag("--estimates", sim_estimates, "Also write estimates.csv");
  add_common(sim, sim_common);

  // benchmarks
  auto* bench = app.add_subcommand("benchmarks", "List benchmark functions or dump their samples");
  bool bench_list = false;
  std::string bench_dump;
  int bench_points = realization_length;
  std::optional<double> bench_snr;
  std::string bench_out;
  auto* list_opt = bench->add_flag("--list", bench_list, "List functions");
  auto* dump_opt = bench->add_option("--dump", bench_dump, "Function to sample, e.g. f10");
  list_opt->excludes(dump_opt);
  bench->add_option("--points", bench_points, "Number of uniform samples on [0,1]")->check(CLI::Range(2, 10000000));
  bench->add_option("--snr", bench_snr, "Normalize to this SNR")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "Output CSV (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_flags, fit_common, fit_in, fit_out, out);

    if (sim->parsed()) {
      CampaignSpec spec;
      if (!sim_spec.empty()) {
        std::ifstream in(sim_spec);
        json j;
        try {
          j = json::parse(in);
        } catch (const json::exception& e) {
          throw InputError(sim_spec + ": " + e.what());
        }
        spec = spec_from_json(j);
      } else {
        if (sim_benchmark.empty() || sim_label.empty()) {
          throw InputError("simulate needs --benchmark and --label, or --spec");
        }
        spec = campaign_from_label(parse_benchmark(sim_benchmark), sim_label, sim_n);
      }
      if (sim_snr && *sim_snr != spec.snr) throw InputError("--snr disagrees with the SNR in the label");
      if (sim_n_opt->count() > 0) spec.num_realizations = sim_n;
      if (sim_seed_opt->count() > 0) spec.first_seed = sim_seed;
      if (!sim_common.models.empty()) spec.config.model_set = parse_models(sim_common.models);
      if (sim->count("--runs") > 0) spec.config.num_runs = sim_common.runs;
      if (sim->count("--particles") > 0) spec.config.swarm.num_particles = sim_common.particles;
      if (sim_common.no_bias_correction) spec.config.bias_correction = false;
      if (sim->count("--jobs") > 0) spec.jobs = sim_common.jobs;
      spec.validate();

      const CampaignSummary summary = run_campaign(spec);
      fs::create_directories(sim_out);
      OutputGuard guard;
      const fs::path summary_path = fs::path(sim_out) / "summary.json";
      const fs::path records_path = fs::path(sim_out) / "records.csv";
      guard.track(summary_path);
      guard.track(records_path);
      const json j = summary_to_json(summary, spec);
      write_json(summary_path, j);
      write_records_csv(records_path, summary.records);
      if (sim_estimates) {
        const fs::path est_path = fs::path(sim_out) / "estimates.csv";
        guard.track(est_path);
        write_estimates_csv(est_path, summary);
      }
      guard.release();
      json brief = j;
      brief.erase("records");
      out << brief.dump(2) << '\n';
      return 0;
    }

    if (bench->parsed()) {
      if (bench_list || bench_dump.empty()) {
        for (const BenchmarkId id : all_benchmarks) out << benchmark_name(id) << '\t' << benchmark_description(id) << '\n';
        return 0;
      }
      const BenchmarkId id = parse_benchmark(bench_dump);
      const Eigen::VectorXd grid = uniform_grid(bench_points);
      Eigen::VectorXd f = evaluate_benchmark(id, grid);
      if (bench_snr) f = normalize_snr(f, *bench_snr);
      std::ostringstream csv;
      csv << "x,f\n";
      for (Eigen::Index i = 0; i < grid.size(); ++i) csv << format_double(grid[i]) << ',' << format_double(f[i]) << '\n';
      if (bench_out.empty()) {
        out << csv.str();
      } else {
        OutputGuard guard;
        guard.track(bench_out);
        std::ofstream file(bench_out);
        file << csv.str();
        if (!file) throw InputError("cannot write " + bench_out);
        file.close();
        guard.release();
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), '\n', ' ');
    err << "shapes: error: " << what << '\n';
    return 1;
  }
  return 2;
}

}  // namespace shapes
