#include "d2dra/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "d2dra/dataset_io.hpp"
#include "d2dra/errors.hpp"
#include "d2dra/svg_chart.hpp"

namespace d2dra {

namespace fs = std::filesystem;

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];  // lower median
}

double percentile95(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

double outage_rate(std::span<const InstanceOutcome> outcomes) {
  if (outcomes.empty()) throw ConfigError("outage_rate: empty outcome list");
  std::size_t feasible = 0;
  std::size_t violated = 0;
  for (const InstanceOutcome& o : outcomes) {
    if (!o.oracle_feasible) continue;
    feasible += 1;
    if (!o.dnn_feasible) violated += 1;
  }
  if (feasible == 0) return 0.0;
  return static_cast<double>(violated) / static_cast<double>(feasible);
}

void SweepConfig::validate() const {
  base_config.validate();
  grid.validate();
  if (d_values.empty()) throw ConfigError("sweep: d_values must be non-empty");
  for (double d : d_values) {
    if (!(d > 0.0)) throw ConfigError("sweep: area sizes must be positive");
  }
  if (goals.empty()) throw ConfigError("sweep: goals must be non-empty");
  if (train_count < 1 || test_count < 1) throw ConfigError("sweep: counts must be >= 1");
}

std::vector<std::vector<OracleSolution>> solve_dataset_oracle(const Dataset& dataset,
                                                              const GridSpec& grid,
                                                              const OracleOptions& options,
                                                              const std::string& cache_dir,
                                                              int threads) {
  std::string digest;
  fs::path cache_path;
  if (!cache_dir.empty()) {
    digest = dataset_digest_hex(dataset);
    cache_path = fs::path(cache_dir) / oracle_cache_filename(digest, grid);
    if (auto cached = load_oracle_cache(cache_path.string(), digest, grid)) {
      if (cached->solutions.size() == dataset.count()) return std::move(cached->solutions);
    }
  }

  std::vector<std::vector<OracleSolution>> solutions(dataset.count());
  const std::span<const Goal> goals(kCacheGoalOrder);
  auto solve_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      solutions[k] = grid_search_multi(dataset.instances[k], goals, grid, dataset.config, options);
    }
  };

  const std::size_t count = dataset.count();
  if (threads <= 1 || count < 2) {
    solve_range(0, count);
  } else {
    const std::size_t n_workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_workers);
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) break;
            solutions[k] =
                grid_search_multi(dataset.instances[k], goals, grid, dataset.config, options);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  if (!cache_dir.empty()) {
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    OracleCache cache;
    cache.dataset_sha256 = digest;
    cache.grid = grid;
    cache.n_due = dataset.config.n_due;
    cache.n_channels = dataset.config.n_channels;
    cache.solutions = solutions;
    save_oracle_cache(cache, cache_path.string());
  }
  return solutions;
}

namespace {

InstanceOutcome evaluate_instance(const RaModel& model, const ChannelInstance& instance,
                                  Goal goal, const OracleSolution& oracle,
                                  const SystemConfig& config, bool measure_timing) {
  InstanceOutcome out;
  PowerAllocation alloc;
  if (measure_timing) {
    const auto t0 = std::chrono::steady_clock::now();
    alloc = infer(model, instance);
    out.dnn_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.oracle_ms = oracle.wall_ms;
  } else {
    alloc = infer(model, instance);
  }

  const LinkReport report = check_constraints(instance, alloc, config);
  out.dnn_feasible = report.feasible;
  out.violation_qos = report.violation_qos;
  out.violation_interference_w = report.violation_interference_w;
  for (double se : report.se_per_due) out.dnn_se_sum += se;
  for (double ee : report.ee_per_due) out.dnn_ee_sum += ee;
  for (double p : report.total_power_w) out.dnn_power_sum_w += p;

  out.oracle_feasible = oracle.feasible;
  const VerifyRecord rec = verify_against(instance, alloc, goal, oracle, config);
  out.dnn_objective = rec.dnn_objective;
  out.oracle_objective = rec.oracle_objective;
  if (oracle.feasible) {
    const LinkReport oracle_report = check_constraints(instance, oracle.best_alloc, config);
    for (double se : oracle_report.se_per_due) out.oracle_se_sum += se;
    for (double ee : oracle_report.ee_per_due) out.oracle_ee_sum += ee;
    for (double p : oracle_report.total_power_w) out.oracle_power_sum_w += p;
  }
  return out;
}

SweepRow aggregate(Goal goal, double d_m, const SystemConfig& config,
                   std::span<const InstanceOutcome> outcomes, bool measure_timing) {
  SweepRow row;
  row.goal = goal;
  row.d_m = d_m;
  row.n_test = outcomes.size();

  double dnn_obj = 0.0, oracle_obj = 0.0;
  double se = 0.0, ee = 0.0, pw = 0.0;
  double ose = 0.0, oee = 0.0, opw = 0.0;
  double viol = 0.0;
  std::size_t n_of = 0, n_viol = 0;
  std::vector<double> dnn_times, oracle_times;
  for (const InstanceOutcome& o : outcomes) {
    if (!o.oracle_feasible) continue;
    n_of += 1;
    dnn_obj += o.dnn_objective;
    oracle_obj += o.oracle_objective;
    se += o.dnn_se_sum;
    ee += o.dnn_ee_sum;
    pw += o.dnn_power_sum_w;
    ose += o.oracle_se_sum;
    oee += o.oracle_ee_sum;
    opw += o.oracle_power_sum_w;
    if (!o.dnn_feasible) {
      n_viol += 1;
      viol += o.violation_interference_w / config.i_thresh_w() +
              (config.r_thresh > 0.0 ? o.violation_qos / config.r_thresh : 0.0);
    }
    if (measure_timing) {
      dnn_times.push_back(o.dnn_ms);
      oracle_times.push_back(o.oracle_ms);
    }
  }
  row.n_oracle_feasible = n_of;
  if (n_of > 0) {
    const double n = static_cast<double>(n_of);
    row.mean_se_bpshz = se / n;
    row.mean_ee_bpj = ee / n;
    row.mean_power_sum_w = pw / n;
    row.mean_power_w = pw / n / config.n_due;
    row.oracle_mean_se_bpshz = ose / n;
    row.oracle_mean_ee_bpj = oee / n;
    row.oracle_mean_power_w = opw / n / config.n_due;
    row.ratio_vs_oracle = oracle_obj == 0.0 ? 0.0 : dnn_obj / oracle_obj;
    row.outage_rate = outage_rate(outcomes);
    row.mean_violation = n_viol > 0 ? viol / static_cast<double>(n_viol) : 0.0;
  }
  if (measure_timing) {
    row.dnn_ms_median = median(dnn_times);
    row.oracle_ms_median = median(oracle_times);
  }
  return row;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* goal_color(Goal goal) {
  switch (goal) {
    case Goal::kMaxSe: return "#1f77b4";
    case Goal::kMaxEe: return "#2ca02c";
    case Goal::kMinPw: return "#d62728";
  }
  return "#000000";
}

}  // namespace

SweepResults run_sweep(const SweepConfig& sweep) {
  sweep.validate();

  SweepResults results;
  {
    std::ostringstream grid_label;
    grid_label << sweep.grid.k_total << 'x' << sweep.grid.k_split;
    results.gridspec_label = grid_label.str();
    std::ostringstream seeds_label;
    seeds_label << "data=" << sweep.data_seed << ";train=" << sweep.hyper.seed;
    results.seeds_label = seeds_label.str();
  }

  for (std::size_t d_idx = 0; d_idx < sweep.d_values.size(); ++d_idx) {
    SystemConfig config = sweep.base_config;
    config.area_d = sweep.d_values[d_idx];
    config.validate();

    ArchConfig arch;
    arch.layers_tnet = sweep.arch_layers;
    arch.layers_pnet = sweep.arch_layers;
    arch.hidden_width = sweep.arch_hidden_width;
    arch.input_dim = config.input_dim();

    // Fresh data per sweep point; train and test streams never overlap.
    const std::uint64_t train_seed = RandomStream::derive_substream_seed(sweep.data_seed, 2 * d_idx);
    const std::uint64_t test_seed =
        RandomStream::derive_substream_seed(sweep.data_seed, 2 * d_idx + 1);
    const Dataset train_ds = generate_dataset(config, sweep.train_count, train_seed, sweep.threads);
    const Dataset test_ds = generate_dataset(config, sweep.test_count, test_seed, sweep.threads);

    const std::vector<std::vector<OracleSolution>> oracle_solutions =
        solve_dataset_oracle(test_ds, sweep.grid, sweep.oracle, sweep.cache_dir, sweep.threads);

    for (Goal goal : sweep.goals) {
      const TrainResult trained = train(train_ds, goal, arch, sweep.hyper);

      std::size_t goal_idx = 0;
      while (kCacheGoalOrder[goal_idx] != goal) ++goal_idx;

      std::vector<InstanceOutcome> outcomes;
      outcomes.reserve(test_ds.count());
      for (std::size_t k = 0; k < test_ds.count(); ++k) {
        outcomes.push_back(evaluate_instance(trained.model, test_ds.instances[k], goal,
                                             oracle_solutions[k][goal_idx], config,
                                             sweep.measure_timing));
      }
      results.rows.push_back(aggregate(goal, config.area_d, config, outcomes,
                                       sweep.measure_timing));
    }
  }
  return results;
}

void export_results(const SweepResults& results, const std::string& out_dir) {
  if (results.rows.empty()) throw ConfigError("export_results: no result rows");

  std::error_code ec;
  fs::create_directories(out_dir, ec);

  const fs::path csv_path = fs::path(out_dir) / "sweep.csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw IoError("cannot open for writing: " + csv_path.string());
  csv << "goal,d_m,mean_se_bpshz,mean_ee_bpj,mean_power_w,ratio_vs_oracle,outage_rate,"
         "mean_violation,dnn_ms_median,oracle_ms_median,n_test,n_oracle_feasible,gridspec,seeds,"
         "mean_power_sum_w,oracle_mean_se_bpshz,oracle_mean_ee_bpj,oracle_mean_power_w\n";
  for (const SweepRow& row : results.rows) {
    csv << to_string(row.goal) << ',' << format_double(row.d_m) << ','
        << format_double(row.mean_se_bpshz) << ',' << format_double(row.mean_ee_bpj) << ','
        << format_double(row.mean_power_w) << ',' << format_double(row.ratio_vs_oracle) << ','
        << format_double(row.outage_rate) << ',' << format_double(row.mean_violation) << ','
        << format_double(row.dnn_ms_median) << ',' << format_double(row.oracle_ms_median) << ','
        << row.n_test << ',' << row.n_oracle_feasible << ',' << results.gridspec_label << ','
        << results.seeds_label << ',' << format_double(row.mean_power_sum_w) << ','
        << format_double(row.oracle_mean_se_bpshz) << ','
        << format_double(row.oracle_mean_ee_bpj) << ','
        << format_double(row.oracle_mean_power_w) << '\n';
  }
  csv.flush();
  if (!csv) throw IoError("write failure: " + csv_path.string());

  struct MetricChart {
    const char* file;
    const char* title;
    const char* y_label;
    double SweepRow::*dnn;
    double SweepRow::*oracle;
  };
  const MetricChart charts[] = {
      {"se_vs_d.svg", "Spectral efficiency vs. area size", "mean SE (bps/Hz)",
       &SweepRow::mean_se_bpshz, &SweepRow::oracle_mean_se_bpshz},
      {"ee_vs_d.svg", "Energy efficiency vs. area size", "mean EE (bits/J)",
       &SweepRow::mean_ee_bpj, &SweepRow::oracle_mean_ee_bpj},
      {"power_vs_d.svg", "Transmit power vs. area size", "mean power per DUE (W)",
       &SweepRow::mean_power_w, &SweepRow::oracle_mean_power_w},
  };

  std::vector<Goal> goals;
  for (const SweepRow& row : results.rows) {
    if (std::find(goals.begin(), goals.end(), row.goal) == goals.end()) goals.push_back(row.goal);
  }

  for (const MetricChart& chart : charts) {
    ChartSpec spec;
    spec.title = chart.title;
    spec.x_label = "area size D (m)";
    spec.y_label = chart.y_label;
    for (Goal goal : goals) {
      ChartSeries dnn, oracle;
      dnn.label = to_string(goal) + " (DNN)";
      dnn.color = goal_color(goal);
      oracle.label = to_string(goal) + " (oracle)";
      oracle.color = goal_color(goal);
      oracle.dashed = true;
      for (const SweepRow& row : results.rows) {
        if (row.goal != goal) continue;
        dnn.x.push_back(row.d_m);
        dnn.y.push_back(row.*(chart.dnn));
        oracle.x.push_back(row.d_m);
        oracle.y.push_back(row.*(chart.oracle));
      }
      spec.series.push_back(std::move(dnn));
      spec.series.push_back(std::move(oracle));
    }
    write_svg_chart(spec, (fs::path(out_dir) / chart.file).string());
  }
}

TimingReport timing_benchmark(const RaModel& model, const Dataset& dataset, int repetitions,
                              const GridSpec& grid, const OracleOptions& oracle_options) {
  if (dataset.count() < 30) {
    throw ConfigError("timing_benchmark: need at least 30 instances");
  }
  if (repetitions < 1) throw ConfigError("timing_benchmark: repetitions must be >= 1");

  TimingReport report;
  report.n_instances = dataset.count();
  std::vector<double> dnn_times, oracle_times;
  dnn_times.reserve(dataset.count());
  oracle_times.reserve(dataset.count());

  for (const ChannelInstance& instance : dataset.instances) {
    std::vector<double> reps(repetitions);
    for (int r = 0; r < repetitions; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const PowerAllocation alloc = infer(model, instance);
      reps[r] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (alloc.p.empty()) throw Error("timing_benchmark: empty allocation");
    }
    dnn_times.push_back(median(reps));
    const OracleSolution sol = grid_search(instance, model.goal, grid, dataset.config,
                                           oracle_options);
    oracle_times.push_back(sol.wall_ms);
  }

  report.dnn_median_ms = median(dnn_times);
  report.dnn_p95_ms = percentile95(dnn_times);
  report.oracle_median_ms = median(oracle_times);
  report.oracle_p95_ms = percentile95(oracle_times);
  report.speedup = report.dnn_median_ms > 0.0 ? report.oracle_median_ms / report.dnn_median_ms
                                              : 0.0;
  return report;
}

}  // namespace d2dra
