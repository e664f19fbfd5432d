#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "d2dra/grid_oracle.hpp"
#include "d2dra/oracle_cache.hpp"
#include "d2dra/ra_net.hpp"

namespace d2dra {

// One trained-model-versus-oracle comparison on one test instance.
struct InstanceOutcome {
  bool oracle_feasible = false;
  bool dnn_feasible = false;
  double dnn_objective = 0.0;
  double oracle_objective = 0.0;
  double violation_qos = 0.0;             // [R_T - SE_i]^+ max over DUEs
  double violation_interference_w = 0.0;  // [I^k - I_T]^+ max over channels
  double dnn_se_sum = 0.0;
  double dnn_ee_sum = 0.0;
  double dnn_power_sum_w = 0.0;
  double oracle_se_sum = 0.0;
  double oracle_ee_sum = 0.0;
  double oracle_power_sum_w = 0.0;
  double dnn_ms = 0.0;
  double oracle_ms = 0.0;
};

// Fraction of oracle-feasible instances where the DNN allocation strictly
// violates the interference or QoS constraint. Instances the oracle itself
// could not satisfy are excluded.
double outage_rate(std::span<const InstanceOutcome> outcomes);

struct SweepConfig {
  SystemConfig base_config;  // area_d is overridden per sweep point
  std::vector<double> d_values = {100.0, 200.0, 300.0, 400.0, 500.0};
  std::vector<Goal> goals = {Goal::kMaxSe, Goal::kMaxEe, Goal::kMinPw};
  std::size_t train_count = 40000;
  std::size_t test_count = 2000;
  int arch_layers = 4;
  int arch_hidden_width = 100;
  TrainHyper hyper;  // hyper.seed is the training seed, shared across goals
  GridSpec grid;
  std::uint64_t data_seed = 7;
  OracleOptions oracle;
  std::string cache_dir;  // empty disables the oracle cache
  bool measure_timing = true;
  int threads = 1;  // instance-level parallelism for the oracle pass

  void validate() const;
};

// One row per (goal, D). All DNN and oracle means are over the
// oracle-feasible test instances of that D, so every comparison is paired.
struct SweepRow {
  Goal goal = Goal::kMaxSe;
  double d_m = 0.0;
  double mean_se_bpshz = 0.0;
  double mean_ee_bpj = 0.0;
  double mean_power_w = 0.0;  // per-DUE mean total power
  double ratio_vs_oracle = 0.0;
  double outage_rate = 0.0;
  double mean_violation = 0.0;  // normalized, over violating instances
  double dnn_ms_median = 0.0;
  double oracle_ms_median = 0.0;
  std::size_t n_test = 0;
  std::size_t n_oracle_feasible = 0;
  double mean_power_sum_w = 0.0;  // network total (all DUEs)
  double oracle_mean_se_bpshz = 0.0;
  double oracle_mean_ee_bpj = 0.0;
  double oracle_mean_power_w = 0.0;
};

struct SweepResults {
  std::vector<SweepRow> rows;  // goal-major within each D, D in config order
  std::string gridspec_label;
  std::string seeds_label;
};

// Full protocol: per D, generate train/test datasets, train one model per
// goal (identical initialization across goals), solve every test instance
// with the multi-goal grid oracle (cached when cache_dir is set), evaluate
// and aggregate.
SweepResults run_sweep(const SweepConfig& sweep);

// CSV + one SVG line chart per metric (SE, EE, power vs D; one line per
// goal; DNN solid, oracle dashed). Throws ConfigError on empty results.
void export_results(const SweepResults& results, const std::string& out_dir);

struct TimingReport {
  double dnn_median_ms = 0.0;
  double dnn_p95_ms = 0.0;
  double oracle_median_ms = 0.0;
  double oracle_p95_ms = 0.0;
  double speedup = 0.0;
  std::size_t n_instances = 0;
};

// Per-instance DNN inference time (median of `repetitions` runs each) versus
// one grid search per instance, over at least 30 instances.
TimingReport timing_benchmark(const RaModel& model, const Dataset& dataset, int repetitions,
                              const GridSpec& grid, const OracleOptions& oracle_options = {});

// Multi-goal oracle pass over a whole dataset with optional file cache and
// instance-level parallelism; solutions[k][g] follows kCacheGoalOrder.
std::vector<std::vector<OracleSolution>> solve_dataset_oracle(const Dataset& dataset,
                                                              const GridSpec& grid,
                                                              const OracleOptions& options,
                                                              const std::string& cache_dir,
                                                              int threads);

double median(std::vector<double> values);
double percentile95(std::vector<double> values);

}  // namespace d2dra
