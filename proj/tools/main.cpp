// d2dra: generate channel data, train allocation networks, solve instances
// with the grid oracle, run evaluation sweeps, and benchmark inference.
//
// Exit codes: 0 success, 2 usage/config, 3 I/O, 4 training divergence,
// 5 oracle budget exceeded.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "d2dra/channel_model.hpp"
#include "d2dra/dataset_io.hpp"
#include "d2dra/digest.hpp"
#include "d2dra/errors.hpp"
#include "d2dra/eval_harness.hpp"
#include "d2dra/grid_oracle.hpp"
#include "d2dra/link_metrics.hpp"
#include "d2dra/model_io.hpp"
#include "d2dra/ra_net.hpp"
#include "d2dra/rng.hpp"
#include "d2dra/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace d2dra;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitBudget = 5;

std::string version_string() {
  std::ostringstream out;
  out << "d2dra " << kToolVersion << " (dataset format " << kDatasetFormatVersion
      << ", model format " << kModelFormatVersion << ", oracle cache format "
      << kOracleCacheFormatVersion << ")";
  return out.str();
}

void require_fresh_output(const std::string& path, bool force) {
  if (path.empty()) return;
  if (fs::exists(path) && !force) {
    throw ConfigError("output path exists: " + path + " (pass --force to overwrite)");
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Every artifact-producing run leaves a manifest beside its primary output:
// the resolved configuration, seeds, digests of all files touched, and the
// wall time, enough to reconstruct the run.
struct ManifestWriter {
  std::string command;
  json config = json::object();
  json seeds = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const std::string& manifest_path) const {
    json doc{{"tool", "d2dra"},
             {"tool_version", kToolVersion},
             {"format_versions",
              {{"dataset", kDatasetFormatVersion},
               {"model", kModelFormatVersion},
               {"oracle_cache", kOracleCacheFormatVersion}}},
             {"generator", RandomStream::kGeneratorId},
             {"command", command},
             {"config", config},
             {"seeds", seeds},
             {"wall_time_s",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    json in_list = json::array();
    for (const std::string& p : inputs) {
      in_list.push_back({{"path", p}, {"sha256", sha256_file_hex(p)}});
    }
    json out_list = json::array();
    for (const std::string& p : outputs) {
      out_list.push_back({{"path", p}, {"sha256", sha256_file_hex(p)}});
    }
    doc["inputs"] = in_list;
    doc["outputs"] = out_list;

    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + manifest_path);
    out << doc.dump(1) << '\n';
  }
};

struct PhysicsFlags {
  SystemConfig config;

  void attach(CLI::App* cmd, bool with_area = true) {
    cmd->add_option("--n-due", config.n_due, "Number of D2D pairs N");
    cmd->add_option("--n-channels", config.n_channels, "Number of channels M");
    if (with_area) cmd->add_option("--area", config.area_d, "Area side length D in meters");
    cmd->add_option("--p-max-dbm", config.p_max_dbm, "Maximum DUE transmit power (dBm)");
    cmd->add_option("--p-circuit-dbm", config.p_circuit_dbm, "Circuit power (dBm)");
    cmd->add_option("--bandwidth-hz", config.bandwidth_hz, "Per-channel bandwidth (Hz)");
    cmd->add_option("--noise-density", config.noise_density_dbm_hz,
                    "Noise spectral density (dBm/Hz)");
    cmd->add_option("--i-thresh-dbm", config.i_thresh_dbm, "Interference threshold I_T (dBm)");
    cmd->add_option("--r-thresh", config.r_thresh, "QoS threshold R_T (bps/Hz)");
    cmd->add_option("--p-cue-dbm", config.p_cue_dbm, "CUE transmit power (dBm)");
    cmd->add_option("--pair-min", config.pair_dist_min_m, "Min DUE pair separation (m)");
    cmd->add_option("--pair-max", config.pair_dist_max_m, "Max DUE pair separation (m)");
    cmd->add_option("--pathloss-coeff-log10", config.pathloss_coeff_log10,
                    "Path loss coefficient exponent: gain = 10^-c * d^-e");
    cmd->add_option("--pathloss-exp", config.pathloss_exp, "Path loss exponent");
  }

  json to_json() const {
    return json{{"n_due", config.n_due},
                {"n_channels", config.n_channels},
                {"area_d", config.area_d},
                {"p_max_dbm", config.p_max_dbm},
                {"p_circuit_dbm", config.p_circuit_dbm},
                {"bandwidth_hz", config.bandwidth_hz},
                {"noise_density_dbm_hz", config.noise_density_dbm_hz},
                {"i_thresh_dbm", config.i_thresh_dbm},
                {"r_thresh", config.r_thresh},
                {"p_cue_dbm", config.p_cue_dbm},
                {"pair_dist_min_m", config.pair_dist_min_m},
                {"pair_dist_max_m", config.pair_dist_max_m},
                {"pathloss_coeff_log10", config.pathloss_coeff_log10},
                {"pathloss_exp", config.pathloss_exp}};
  }
};

struct TrainFlags {
  TrainHyper hyper;
  int layers = 4;
  int width = 100;

  void attach(CLI::App* cmd) {
    cmd->add_option("--epochs", hyper.epochs, "Training epochs");
    cmd->add_option("--batch", hyper.batch_size, "Mini-batch size");
    cmd->add_option("--lr", hyper.lr_base, "Base Adam step size");
    cmd->add_option("--lr-decay", hyper.lr_decay, "Step-size decay at 1/3 and 2/3 of epochs");
    cmd->add_option("--lambda1", hyper.lambda1, "Interference penalty weight");
    cmd->add_option("--lambda2", hyper.lambda2, "QoS penalty weight");
    cmd->add_option("--val-frac", hyper.val_fraction, "Validation split fraction");
    cmd->add_option("--ee-scale", hyper.ee_scale, "EE objective scale inside the loss");
    cmd->add_flag("--legacy-qos-sign", hyper.legacy_qos_sign,
                  "Use the published [SE_i - R_T]^+ penalty argument (comparison runs only)");
    cmd->add_option("--layers", layers, "Weight layers per network head");
    cmd->add_option("--width", width, "Hidden layer width");
  }

  json to_json() const {
    return json{{"epochs", hyper.epochs},
                {"batch", hyper.batch_size},
                {"lr", hyper.lr_base},
                {"lr_decay", hyper.lr_decay},
                {"lambda1", hyper.lambda1},
                {"lambda2", hyper.lambda2},
                {"val_fraction", hyper.val_fraction},
                {"ee_scale", hyper.ee_scale},
                {"legacy_qos_sign", hyper.legacy_qos_sign},
                {"layers", layers},
                {"width", width}};
  }
};

GridSpec parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) {
    throw ConfigError("bad --grid '" + text + "': expected <k_total>x<k_split>, e.g. 51x51");
  }
  GridSpec grid;
  try {
    grid.k_total = std::stoi(text.substr(0, x));
    grid.k_split = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad --grid '" + text + "': expected <k_total>x<k_split>");
  }
  grid.validate();
  return grid;
}

std::vector<Goal> parse_goals(const std::string& csv) {
  std::vector<Goal> goals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) goals.push_back(parse_goal(item));
  }
  if (goals.empty()) throw ConfigError("--goals parsed to an empty list");
  return goals;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError(std::string(what) + " parsed to an empty list");
  return values;
}

void print_allocation(std::ostream& out, const PowerAllocation& alloc) {
  for (int i = 0; i < alloc.n_due; ++i) {
    out << "  due " << i << ":";
    for (int m = 0; m < alloc.n_channels; ++m) {
      out << " p[" << m << "]=" << fmt17(alloc.at(i, m)) << " W";
    }
    out << "  (total " << fmt17(alloc.total(i)) << " W)\n";
  }
}

void print_report(std::ostream& out, const LinkReport& report) {
  for (std::size_t i = 0; i < report.se_per_due.size(); ++i) {
    out << "  due " << i << ": se=" << fmt17(report.se_per_due[i])
        << " bps/Hz  ee=" << fmt17(report.ee_per_due[i])
        << " bits/J  power=" << fmt17(report.total_power_w[i]) << " W\n";
  }
  for (std::size_t k = 0; k < report.cue_interference_w.size(); ++k) {
    out << "  channel " << k << ": bs interference=" << fmt17(report.cue_interference_w[k])
        << " W\n";
  }
  out << "  feasible: " << (report.feasible ? "yes" : "no") << "\n";
  if (!report.feasible) {
    out << "  violation: interference=" << fmt17(report.violation_interference_w)
        << " W  qos=" << fmt17(report.violation_qos) << " bps/Hz\n";
  }
}

// ---- gen-data ----

struct GenDataArgs {
  PhysicsFlags physics;
  std::size_t count = 40000;
  std::uint64_t seed = 7;
  std::string out;
  std::string csv;
  int threads = 1;
  bool force = false;
};

int run_gen_data(const GenDataArgs& args) {
  ManifestWriter manifest;
  manifest.command = "gen-data";
  args.physics.config.validate();
  require_fresh_output(args.out, args.force);
  require_fresh_output(args.csv, args.force);

  const Dataset ds = generate_dataset(args.physics.config, args.count, args.seed, args.threads);
  save_dataset(ds, args.out);
  manifest.outputs.push_back(args.out);
  if (!args.csv.empty()) {
    export_dataset_csv(ds, args.csv);
    manifest.outputs.push_back(args.csv);
  }

  manifest.config = args.physics.to_json();
  manifest.config["count"] = args.count;
  manifest.config["threads"] = args.threads;
  manifest.seeds = {{"data", args.seed}};
  manifest.write(args.out + ".manifest.json");
  std::cout << "wrote " << args.out << " (" << ds.count() << " instances, seed " << args.seed
            << ")\n";
  return 0;
}

// ---- train ----

struct TrainArgs {
  TrainFlags flags;
  std::string data;
  std::string goal = "max-se";
  std::string out;
  std::string history;
  std::uint64_t seed = 1;
  bool force = false;
};

int run_train(const TrainArgs& args) {
  ManifestWriter manifest;
  manifest.command = "train";
  const std::string history_path =
      args.history.empty() ? args.out + ".history.csv" : args.history;
  require_fresh_output(args.out, args.force);
  require_fresh_output(history_path, args.force);

  const Goal goal = parse_goal(args.goal);
  if (args.flags.hyper.lambda1 == 0.0 && args.flags.hyper.lambda2 == 0.0) {
    std::cerr << "warning: lambda1 = lambda2 = 0, constraints are not penalized\n";
  }

  const Dataset ds = load_dataset(args.data);
  manifest.inputs.push_back(args.data);

  ArchConfig arch;
  arch.layers_tnet = args.flags.layers;
  arch.layers_pnet = args.flags.layers;
  arch.hidden_width = args.flags.width;
  arch.input_dim = ds.config.input_dim();

  TrainHyper hyper = args.flags.hyper;
  hyper.seed = args.seed;
  const TrainResult result = train(ds, goal, arch, hyper);

  save_model(result.model, args.out);
  manifest.outputs.push_back(args.out);

  {
    std::ofstream hist(history_path, std::ios::trunc);
    if (!hist) throw IoError("cannot write loss history: " + history_path);
    hist << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < result.train_loss.size(); ++e) {
      hist << e << ',' << fmt17(result.train_loss[e]) << ',';
      if (e < result.val_loss.size()) hist << fmt17(result.val_loss[e]);
      hist << '\n';
    }
  }
  manifest.outputs.push_back(history_path);

  manifest.config = args.flags.to_json();
  manifest.config["goal"] = args.goal;
  manifest.seeds = {{"train", args.seed}, {"dataset", ds.seed}};
  manifest.write(args.out + ".manifest.json");
  std::cout << "trained " << args.goal << " model: final train loss "
            << fmt17(result.model.meta.final_train_loss) << ", " << result.model.meta.adam_steps
            << " adam steps -> " << args.out << "\n";
  return 0;
}

// ---- eval ----

struct EvalArgs {
  PhysicsFlags physics;
  TrainFlags flags;
  std::string goals = "max-se,max-ee,min-pw";
  std::string d_list = "100,200,300,400,500";
  std::string grid = "51x51";
  std::string out;
  std::size_t train_count = 40000;
  std::size_t test_count = 2000;
  std::uint64_t data_seed = 7;
  std::uint64_t train_seed = 1;
  std::string cache_dir;
  bool no_cache = false;
  bool no_timing = false;
  std::uint64_t budget = 100'000'000;
  int threads = 1;
  bool force = false;
};

int run_eval(const EvalArgs& args) {
  ManifestWriter manifest;
  manifest.command = "eval";
  if (args.out.empty()) throw ConfigError("--out directory is required");
  require_fresh_output((fs::path(args.out) / "sweep.csv").string(), args.force);

  SweepConfig sweep;
  sweep.base_config = args.physics.config;
  sweep.goals = parse_goals(args.goals);
  sweep.d_values = parse_double_list(args.d_list, "--d-list");
  sweep.grid = parse_grid(args.grid);
  sweep.train_count = args.train_count;
  sweep.test_count = args.test_count;
  sweep.arch_layers = args.flags.layers;
  sweep.arch_hidden_width = args.flags.width;
  sweep.hyper = args.flags.hyper;
  sweep.hyper.seed = args.train_seed;
  sweep.data_seed = args.data_seed;
  sweep.oracle.budget = args.budget;
  sweep.threads = args.threads;
  sweep.measure_timing = !args.no_timing;
  if (!args.no_cache) {
    sweep.cache_dir =
        args.cache_dir.empty() ? (fs::path(args.out) / "cache").string() : args.cache_dir;
  }

  const SweepResults results = run_sweep(sweep);
  export_results(results, args.out);
  manifest.outputs.push_back((fs::path(args.out) / "sweep.csv").string());
  for (const char* chart : {"se_vs_d.svg", "ee_vs_d.svg", "power_vs_d.svg"}) {
    manifest.outputs.push_back((fs::path(args.out) / chart).string());
  }

  manifest.config = args.physics.to_json();
  const json flag_json = args.flags.to_json();
  for (const auto& [key, value] : flag_json.items()) manifest.config[key] = value;
  manifest.config["goals"] = args.goals;
  manifest.config["d_list"] = args.d_list;
  manifest.config["grid"] = args.grid;
  manifest.config["train_count"] = args.train_count;
  manifest.config["test_count"] = args.test_count;
  manifest.config["budget"] = args.budget;
  manifest.config["threads"] = args.threads;
  manifest.config["timing"] = !args.no_timing;
  manifest.config["cache_dir"] = sweep.cache_dir;
  manifest.seeds = {{"data", args.data_seed}, {"train", args.train_seed}};
  manifest.write((fs::path(args.out) / "manifest.json").string());

  std::cout << "sweep finished: " << results.rows.size() << " rows -> " << args.out
            << "/sweep.csv\n";
  for (const SweepRow& row : results.rows) {
    std::cout << "  " << to_string(row.goal) << " D=" << row.d_m
              << ": ratio=" << fmt17(row.ratio_vs_oracle) << " outage=" << fmt17(row.outage_rate)
              << " (feasible " << row.n_oracle_feasible << "/" << row.n_test << ")\n";
  }
  return 0;
}

// ---- oracle ----

struct OracleArgs {
  std::string data;
  std::size_t index = 0;
  std::string goal = "max-se";
  std::string grid = "51x51";
  std::uint64_t budget = 100'000'000;
  int threads = 1;
  std::string out;
  bool force = false;
};

int run_oracle(const OracleArgs& args) {
  ManifestWriter manifest;
  manifest.command = "oracle";
  const Dataset ds = load_dataset(args.data);
  manifest.inputs.push_back(args.data);
  if (args.index >= ds.count()) {
    throw ConfigError("--index " + std::to_string(args.index) + " out of range (dataset has " +
                      std::to_string(ds.count()) + " instances)");
  }
  const Goal goal = parse_goal(args.goal);
  const GridSpec grid = parse_grid(args.grid);
  OracleOptions options;
  options.budget = args.budget;
  options.threads = args.threads;

  const OracleSolution sol =
      grid_search(ds.instances[args.index], goal, grid, ds.config, options);

  std::ostringstream report;
  report << "instance " << args.index << " goal " << args.goal << " grid " << grid.k_total << "x"
         << grid.k_split << "\n";
  report << "evaluations: " << sol.evaluations << "\n";
  report << "wall_ms: " << fmt17(sol.wall_ms) << "\n";
  report << "feasible: " << (sol.feasible ? "yes" : "no") << "\n";
  if (sol.feasible) {
    report << "objective: " << fmt17(sol.objective) << "\n";
    print_allocation(report, sol.best_alloc);
    print_report(report, check_constraints(ds.instances[args.index], sol.best_alloc, ds.config));
  } else {
    report << "min_violation: " << fmt17(sol.min_violation) << "\n";
    print_allocation(report, sol.min_violation_alloc);
  }
  std::cout << report.str();

  if (!args.out.empty()) {
    require_fresh_output(args.out, args.force);
    std::ofstream out(args.out, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + args.out);
    out << report.str();
    out.close();
    manifest.outputs.push_back(args.out);
    manifest.config = {{"index", args.index}, {"goal", args.goal}, {"grid", args.grid},
                       {"budget", args.budget}, {"threads", args.threads}};
    manifest.seeds = {{"dataset", ds.seed}};
    manifest.write(args.out + ".manifest.json");
  }
  return 0;
}

// ---- bench ----

struct BenchArgs {
  std::string model;
  std::string data;
  int reps = 50;
  std::size_t limit = 50;
  std::string grid = "51x51";
  std::uint64_t budget = 100'000'000;
  std::string out;
  bool force = false;
};

int run_bench(const BenchArgs& args) {
  ManifestWriter manifest;
  manifest.command = "bench";
  const RaModel model = load_model(args.model);
  Dataset ds = load_dataset(args.data);
  manifest.inputs.push_back(args.model);
  manifest.inputs.push_back(args.data);
  if (!(model.system == ds.config)) {
    throw ConfigError("model and dataset disagree on the system configuration");
  }
  if (args.limit >= 30 && ds.count() > args.limit) {
    ds.instances.resize(args.limit);
  }

  const GridSpec grid = parse_grid(args.grid);
  OracleOptions options;
  options.budget = args.budget;
  const TimingReport report = timing_benchmark(model, ds, args.reps, grid, options);

  std::ostringstream text;
  text << "instances: " << report.n_instances << "  repetitions: " << args.reps << "\n";
  text << "dnn_median_ms: " << fmt17(report.dnn_median_ms) << "\n";
  text << "dnn_p95_ms: " << fmt17(report.dnn_p95_ms) << "\n";
  text << "oracle_median_ms: " << fmt17(report.oracle_median_ms) << "\n";
  text << "oracle_p95_ms: " << fmt17(report.oracle_p95_ms) << "\n";
  text << "speedup: " << fmt17(report.speedup) << "\n";
  std::cout << text.str();

  if (!args.out.empty()) {
    require_fresh_output(args.out, args.force);
    std::ofstream out(args.out, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + args.out);
    out << text.str();
    out.close();
    manifest.outputs.push_back(args.out);
    manifest.config = {{"reps", args.reps}, {"limit", args.limit}, {"grid", args.grid}};
    manifest.seeds = {{"dataset", ds.seed}, {"train", model.meta.train_seed}};
    manifest.write(args.out + ".manifest.json");
  }
  return 0;
}

// ---- infer ----

struct InferArgs {
  std::string model;
  std::string data;
  std::size_t index = 0;
  std::string out;
  bool force = false;
};

int run_infer(const InferArgs& args) {
  ManifestWriter manifest;
  manifest.command = "infer";
  const RaModel model = load_model(args.model);
  const Dataset ds = load_dataset(args.data);
  manifest.inputs.push_back(args.model);
  manifest.inputs.push_back(args.data);
  if (args.index >= ds.count()) {
    throw ConfigError("--index " + std::to_string(args.index) + " out of range (dataset has " +
                      std::to_string(ds.count()) + " instances)");
  }

  const ChannelInstance& instance = ds.instances[args.index];
  const PowerAllocation alloc = infer(model, instance);
  const LinkReport report = check_constraints(instance, alloc, ds.config);

  std::ostringstream text;
  text << "instance " << args.index << " model goal " << to_string(model.goal) << "\n";
  print_allocation(text, alloc);
  print_report(text, report);
  std::cout << text.str();

  if (!args.out.empty()) {
    require_fresh_output(args.out, args.force);
    std::ofstream out(args.out, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + args.out);
    out << text.str();
    out.close();
    manifest.outputs.push_back(args.out);
    manifest.config = {{"index", args.index}};
    manifest.seeds = {{"dataset", ds.seed}, {"train", model.meta.train_seed}};
    manifest.write(args.out + ".manifest.json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned power allocation laboratory for underlay D2D networks"};
  app.set_version_flag("--version", version_string());
  app.set_config("--config", "", "Structured-text config file; flags take precedence");
  app.require_subcommand(1);

  GenDataArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen-data", "Generate a channel-gain dataset");
  gen_args.physics.attach(gen);
  gen->add_option("--count", gen_args.count, "Number of channel samples");
  gen->add_option("--seed", gen_args.seed, "Dataset seed");
  gen->add_option("--out", gen_args.out, "Output dataset path")->required();
  gen->add_option("--csv", gen_args.csv, "Also export instances as CSV");
  gen->add_option("--threads", gen_args.threads, "Worker threads (identical output)");
  gen->add_flag("--force", gen_args.force, "Overwrite existing outputs");

  TrainArgs train_args;
  CLI::App* tr = app.add_subcommand("train", "Train an allocation model on a dataset");
  tr->add_option("--data", train_args.data, "Training dataset")->required();
  tr->add_option("--goal", train_args.goal, "Objective: max-se, max-ee or min-pw")->required();
  tr->add_option("--out", train_args.out, "Output model path")->required();
  tr->add_option("--history", train_args.history,
                 "Loss-history CSV path (default <out>.history.csv)");
  tr->add_option("--seed", train_args.seed, "Training seed");
  train_args.flags.attach(tr);
  tr->add_flag("--force", train_args.force, "Overwrite existing outputs");

  EvalArgs eval_args;
  CLI::App* ev = app.add_subcommand("eval", "Run the area-size sweep against the grid oracle");
  eval_args.physics.attach(ev, /*with_area=*/false);
  ev->add_option("--goals", eval_args.goals, "Comma-separated goals");
  ev->add_option("--d-list", eval_args.d_list, "Comma-separated area sizes in meters");
  ev->add_option("--grid", eval_args.grid, "Oracle grid <k_total>x<k_split>");
  ev->add_option("--out", eval_args.out, "Output directory")->required();
  ev->add_option("--train-count", eval_args.train_count, "Training samples per area size");
  ev->add_option("--test-count", eval_args.test_count, "Test instances per area size");
  ev->add_option("--data-seed", eval_args.data_seed, "Dataset seed");
  ev->add_option("--seed", eval_args.train_seed, "Training seed");
  ev->add_option("--cache-dir", eval_args.cache_dir, "Oracle cache directory");
  ev->add_flag("--no-cache", eval_args.no_cache, "Disable the oracle cache");
  ev->add_flag("--no-timing", eval_args.no_timing,
               "Write zeros in timing columns (byte-reproducible sweep.csv)");
  ev->add_option("--budget", eval_args.budget, "Max joint oracle evaluations per instance");
  ev->add_option("--threads", eval_args.threads, "Worker threads (identical output)");
  eval_args.flags.attach(ev);
  ev->add_flag("--force", eval_args.force, "Overwrite existing outputs");

  OracleArgs oracle_args;
  CLI::App* orc = app.add_subcommand("oracle", "Exhaustively solve one instance");
  orc->add_option("--data", oracle_args.data, "Dataset path")->required();
  orc->add_option("--index", oracle_args.index, "Instance index");
  orc->add_option("--goal", oracle_args.goal, "Objective: max-se, max-ee or min-pw");
  orc->add_option("--grid", oracle_args.grid, "Grid <k_total>x<k_split>");
  orc->add_option("--budget", oracle_args.budget, "Max joint evaluations");
  orc->add_option("--threads", oracle_args.threads, "Worker threads (identical output)");
  orc->add_option("--out", oracle_args.out, "Also write the report to a file");
  orc->add_flag("--force", oracle_args.force, "Overwrite existing outputs");

  BenchArgs bench_args;
  CLI::App* bn = app.add_subcommand("bench", "Time DNN inference against the grid oracle");
  bn->add_option("--model", bench_args.model, "Model path")->required();
  bn->add_option("--data", bench_args.data, "Dataset path")->required();
  bn->add_option("--reps", bench_args.reps, "Inference repetitions per instance");
  bn->add_option("--limit", bench_args.limit, "Use at most this many instances (>= 30)");
  bn->add_option("--grid", bench_args.grid, "Grid <k_total>x<k_split>");
  bn->add_option("--budget", bench_args.budget, "Max joint evaluations");
  bn->add_option("--out", bench_args.out, "Also write the report to a file");
  bn->add_flag("--force", bench_args.force, "Overwrite existing outputs");

  InferArgs infer_args;
  CLI::App* in = app.add_subcommand("infer", "Allocate power for one instance with a model");
  in->add_option("--model", infer_args.model, "Model path")->required();
  in->add_option("--data", infer_args.data, "Dataset path")->required();
  in->add_option("--index", infer_args.index, "Instance index");
  in->add_option("--out", infer_args.out, "Also write the report to a file");
  in->add_flag("--force", infer_args.force, "Overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen_data(gen_args);
    if (tr->parsed()) return run_train(train_args);
    if (ev->parsed()) return run_eval(eval_args);
    if (orc->parsed()) return run_oracle(oracle_args);
    if (bn->parsed()) return run_bench(bench_args);
    if (in->parsed()) return run_infer(infer_args);
  } catch (const BudgetExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const TrainingDivergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
