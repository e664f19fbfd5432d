#include "d2dra/ra_net.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "d2dra/errors.hpp"

namespace d2dra {

using nn::Mat;
using nn::Tape;

namespace {

constexpr double kStdFloor = 1e-9;
constexpr double kInvLn2 = 1.4426950408889634;  // 1/ln(2)

int gain_col(const SystemConfig& c, int m, int tx, int rx) {
  const int s = c.n_due + 1;
  return (m * s + tx) * s + rx;
}

}  // namespace

void ArchConfig::validate(const SystemConfig& system) const {
  if (layers_tnet < 2 || layers_pnet < 2) {
    throw ConfigError("ArchConfig: layer counts must be >= 2");
  }
  if (hidden_width < 1) throw ConfigError("ArchConfig: hidden_width must be >= 1");
  if (input_dim != system.input_dim()) {
    throw ConfigError("ArchConfig: input_dim " + std::to_string(input_dim) +
                      " does not match the system's M*(N+1)^2 = " +
                      std::to_string(system.input_dim()));
  }
}

std::vector<int> ArchConfig::tnet_dims(const SystemConfig& system) const {
  std::vector<int> dims(layers_tnet + 1, hidden_width);
  dims.front() = input_dim;
  dims.back() = system.n_due;
  return dims;
}

std::vector<int> ArchConfig::pnet_dims(const SystemConfig& system) const {
  std::vector<int> dims(layers_pnet + 1, hidden_width);
  dims.front() = input_dim;
  dims.back() = system.n_due * system.n_channels;
  return dims;
}

std::vector<double> preprocess(const ChannelInstance& instance, const NormStats& norm) {
  if (instance.gains.size() != norm.mean.size()) {
    throw ConfigError("preprocess: instance shape does not match normalization stats");
  }
  std::vector<double> features(instance.gains.size());
  for (std::size_t k = 0; k < instance.gains.size(); ++k) {
    const double h = instance.gains[k];
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw ConfigError("preprocess: non-positive channel gain at index " + std::to_string(k));
    }
    features[k] = (10.0 * std::log10(h) - norm.mean[k]) / norm.stddev[k];
  }
  return features;
}

NormStats compute_norm_stats(const Dataset& dataset, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ConfigError("compute_norm_stats: empty index set");
  const std::size_t dim = dataset.instances.front().gains.size();
  NormStats norm;
  norm.mean.assign(dim, 0.0);
  norm.stddev.assign(dim, 0.0);

  for (std::size_t idx : indices) {
    const ChannelInstance& inst = dataset.instances[idx];
    for (std::size_t k = 0; k < dim; ++k) {
      norm.mean[k] += 10.0 * std::log10(inst.gains[k]);
    }
  }
  const double n = static_cast<double>(indices.size());
  for (double& m : norm.mean) m /= n;

  for (std::size_t idx : indices) {
    const ChannelInstance& inst = dataset.instances[idx];
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = 10.0 * std::log10(inst.gains[k]) - norm.mean[k];
      norm.stddev[k] += d * d;
    }
  }
  for (double& s : norm.stddev) s = std::max(std::sqrt(s / n), kStdFloor);
  return norm;
}

PowerAllocation forward_alloc(const RaModel& model, const std::vector<double>& features) {
  const int n = model.system.n_due;
  const int m = model.system.n_channels;
  if (static_cast<int>(features.size()) != model.arch.input_dim) {
    throw ConfigError("forward_alloc: feature length does not match arch input_dim");
  }
  Mat x(1, features.size());
  for (std::size_t k = 0; k < features.size(); ++k) x(0, k) = features[k];

  Mat t = nn::dense_forward(model.tnet, x);
  t = (1.0 / (1.0 + (-t.array()).exp())).matrix() * model.system.p_max_w();

  Mat rho = nn::dense_forward(model.pnet, x);
  nn::softmax_groups_inplace(rho, m);

  PowerAllocation alloc = PowerAllocation::zeros(n, m);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) {
      alloc.at(i, k) = t(0, i) * rho(0, i * m + k);
    }
  }
  return alloc;
}

PowerAllocation infer(const RaModel& model, const ChannelInstance& instance) {
  return forward_alloc(model, preprocess(instance, model.norm));
}

BatchData make_batch(const Dataset& dataset, std::span<const std::size_t> indices,
                     const NormStats& norm) {
  const std::size_t dim = norm.mean.size();
  BatchData batch;
  batch.features.resize(indices.size(), dim);
  batch.gains.resize(indices.size(), dim);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const ChannelInstance& inst = dataset.instances[indices[r]];
    if (inst.gains.size() != dim) {
      throw ConfigError("make_batch: instance shape does not match normalization stats");
    }
    for (std::size_t k = 0; k < dim; ++k) {
      const double h = inst.gains[k];
      if (!(h > 0.0)) {
        throw ConfigError("make_batch: non-positive channel gain");
      }
      batch.gains(r, k) = h;
      batch.features(r, k) = (10.0 * std::log10(h) - norm.mean[k]) / norm.stddev[k];
    }
  }
  return batch;
}

LossGraph build_loss_graph(Tape& tape, const nn::ParamSet& tnet, const nn::ParamSet& pnet,
                           const BatchData& batch, Goal goal, const SystemConfig& system,
                           const TrainHyper& hyper) {
  const int n = system.n_due;
  const int m = system.n_channels;
  const auto rows = batch.features.rows();
  const double noise_w = system.noise_power_w();
  const double cue_w = system.p_cue_per_channel_w();

  LossGraph graph;
  const Tape::Id x = tape.constant(batch.features);

  Tape::Id t_lin = nn::dense_forward_tape(tape, tnet, x, &graph.tnet_nodes);
  const Tape::Id t = tape.scale(tape.sigmoid(t_lin), system.p_max_w());
  Tape::Id p_lin = nn::dense_forward_tape(tape, pnet, x, &graph.pnet_nodes);
  const Tape::Id rho = tape.softmax_groups(p_lin, m);
  const Tape::Id power = tape.mul(tape.repeat_cols(t, m), rho);
  graph.power = power;

  auto gains_column = [&](int mi, int tx, int rx) {
    return tape.constant(batch.gains.col(gain_col(system, mi, tx, rx)));
  };
  auto power_column = [&](int i, int mi) { return tape.slice_cols(power, i * m + mi, 1); };

  // SE_i = sum_m log2(1 + p_im h_im / (noise + sum_{j != i} p_jm h_jm + cue)).
  std::vector<Tape::Id> se(n, -1);
  for (int i = 0; i < n; ++i) {
    const int rx = i + 1;
    for (int mi = 0; mi < m; ++mi) {
      Tape::Id denom = tape.constant(Mat::Constant(rows, 1, noise_w));
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        denom = tape.add(denom, tape.mul(power_column(j, mi), gains_column(mi, j + 1, rx)));
      }
      denom = tape.add(
          denom, tape.constant((cue_w * batch.gains.col(gain_col(system, mi, 0, rx))).eval()));
      const Tape::Id sinr =
          tape.div(tape.mul(power_column(i, mi), gains_column(mi, i + 1, rx)), denom);
      const Tape::Id se_im = tape.scale(tape.log(tape.add_scalar(sinr, 1.0)), kInvLn2);
      se[i] = se[i] < 0 ? se_im : tape.add(se[i], se_im);
    }
  }

  // Interference penalty: sum_k tanh([I^k - I_T]^+).
  const double i_t = system.i_thresh_w();
  Tape::Id pen_i = -1;
  for (int k = 0; k < m; ++k) {
    Tape::Id ik = -1;
    for (int i = 0; i < n; ++i) {
      const Tape::Id term = tape.mul(power_column(i, k), gains_column(k, i + 1, 0));
      ik = ik < 0 ? term : tape.add(ik, term);
    }
    const Tape::Id pen = tape.tanh(tape.relu(tape.add_scalar(ik, -i_t)));
    pen_i = pen_i < 0 ? pen : tape.add(pen_i, pen);
  }

  // QoS penalty: sum_i tanh([R_T - SE_i]^+); the legacy flag flips the sign
  // back to the published [SE_i - R_T]^+ form.
  Tape::Id pen_q = -1;
  for (int i = 0; i < n; ++i) {
    const Tape::Id arg = hyper.legacy_qos_sign
                             ? tape.add_scalar(se[i], -system.r_thresh)
                             : tape.add_scalar(tape.scale(se[i], -1.0), system.r_thresh);
    const Tape::Id pen = tape.tanh(tape.relu(arg));
    pen_q = pen_q < 0 ? pen : tape.add(pen_q, pen);
  }

  Tape::Id objective = -1;
  switch (goal) {
    case Goal::kMaxSe: {
      Tape::Id sum = se[0];
      for (int i = 1; i < n; ++i) sum = tape.add(sum, se[i]);
      objective = tape.scale(sum, -1.0);
      break;
    }
    case Goal::kMaxEe: {
      const double p_c = system.p_circuit_w();
      Tape::Id sum = -1;
      for (int i = 0; i < n; ++i) {
        const Tape::Id ptot = tape.sum_cols(tape.slice_cols(power, i * m, m));
        const Tape::Id ee =
            tape.div(tape.scale(se[i], system.bandwidth_hz), tape.add_scalar(ptot, p_c));
        sum = sum < 0 ? ee : tape.add(sum, ee);
      }
      objective = tape.scale(sum, -hyper.ee_scale);
      break;
    }
    case Goal::kMinPw:
      objective = tape.sum_cols(power);
      break;
  }

  const Tape::Id penalties =
      tape.add(tape.scale(pen_i, hyper.lambda1), tape.scale(pen_q, hyper.lambda2));
  graph.loss = tape.mean_all(tape.add(objective, penalties));
  return graph;
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t count, RandomStream& rng) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t k = count - 1; k > 0; --k) {
    const std::size_t j = rng.below(k + 1);
    std::swap(idx[k], idx[j]);
  }
  return idx;
}

double evaluate_loss(const nn::ParamSet& tnet, const nn::ParamSet& pnet, const Dataset& dataset,
                     std::span<const std::size_t> indices, const NormStats& norm, Goal goal,
                     const SystemConfig& system, const TrainHyper& hyper) {
  double total = 0.0;
  std::size_t done = 0;
  while (done < indices.size()) {
    const std::size_t take =
        std::min<std::size_t>(hyper.batch_size, indices.size() - done);
    const BatchData batch = make_batch(dataset, indices.subspan(done, take), norm);
    Tape tape;
    const LossGraph graph = build_loss_graph(tape, tnet, pnet, batch, goal, system, hyper);
    total += tape.value(graph.loss)(0, 0) * static_cast<double>(take);
    done += take;
  }
  return total / static_cast<double>(indices.size());
}

}  // namespace

TrainResult train(const Dataset& dataset, Goal goal, const ArchConfig& arch,
                  const TrainHyper& hyper) {
  const SystemConfig& system = dataset.config;
  arch.validate(system);
  if (hyper.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (hyper.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (hyper.lambda1 < 0.0 || hyper.lambda2 < 0.0) {
    throw ConfigError("train: penalty weights must be >= 0");
  }
  if (hyper.val_fraction < 0.0 || hyper.val_fraction >= 1.0) {
    throw ConfigError("train: val_fraction must be in [0, 1)");
  }
  if (dataset.instances.empty()) throw ConfigError("train: empty dataset");

  RandomStream rng(hyper.seed);
  nn::ParamSet tnet = nn::make_dense_stack("tnet", arch.tnet_dims(system), rng);
  nn::ParamSet pnet = nn::make_dense_stack("pnet", arch.pnet_dims(system), rng);

  // Split, then freeze normalization on the training part only.
  std::vector<std::size_t> order = shuffled_indices(dataset.count(), rng);
  const std::size_t n_val =
      static_cast<std::size_t>(std::llround(hyper.val_fraction * dataset.count()));
  std::vector<std::size_t> train_idx(order.begin(), order.end() - n_val);
  std::vector<std::size_t> val_idx(order.end() - n_val, order.end());
  if (train_idx.empty()) throw ConfigError("train: empty training split");
  const NormStats norm = compute_norm_stats(dataset, train_idx);

  nn::AdamState tnet_state = nn::AdamState::init(tnet);
  nn::AdamState pnet_state = nn::AdamState::init(pnet);

  std::vector<std::size_t> milestones;
  for (double frac : hyper.lr_milestones) {
    milestones.push_back(static_cast<std::size_t>(frac * hyper.epochs));
  }

  TrainResult result;
  std::int64_t steps = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    double lr = hyper.lr_base;
    for (std::size_t ms : milestones) {
      if (static_cast<std::size_t>(epoch) >= ms) lr *= hyper.lr_decay;
    }
    tnet_state.hyper.alpha = lr;
    pnet_state.hyper.alpha = lr;

    // Fresh mini-batch order every epoch.
    for (std::size_t k = train_idx.size() - 1; k > 0; --k) {
      const std::size_t j = rng.below(k + 1);
      std::swap(train_idx[k], train_idx[j]);
    }

    double epoch_loss = 0.0;
    std::size_t done = 0;
    while (done < train_idx.size()) {
      const std::size_t take =
          std::min<std::size_t>(hyper.batch_size, train_idx.size() - done);
      const BatchData batch =
          make_batch(dataset, std::span<const std::size_t>(train_idx).subspan(done, take), norm);
      Tape tape;
      const LossGraph graph = build_loss_graph(tape, tnet, pnet, batch, goal, system, hyper);
      const double loss = tape.value(graph.loss)(0, 0);
      if (!std::isfinite(loss)) {
        throw TrainingDivergedError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                    ", step " + std::to_string(steps) + " (goal " +
                                    to_string(goal) + ", lr " + std::to_string(lr) + ")");
      }
      tape.backward(graph.loss);

      std::vector<Mat> tnet_grads;
      tnet_grads.reserve(graph.tnet_nodes.size());
      for (Tape::Id id : graph.tnet_nodes) tnet_grads.push_back(tape.grad(id));
      std::vector<Mat> pnet_grads;
      pnet_grads.reserve(graph.pnet_nodes.size());
      for (Tape::Id id : graph.pnet_nodes) pnet_grads.push_back(tape.grad(id));
      nn::adam_step(tnet, tnet_grads, tnet_state);
      nn::adam_step(pnet, pnet_grads, pnet_state);

      epoch_loss += loss * static_cast<double>(take);
      done += take;
      steps += 1;
    }
    result.train_loss.push_back(epoch_loss / static_cast<double>(train_idx.size()));
    if (!val_idx.empty()) {
      result.val_loss.push_back(
          evaluate_loss(tnet, pnet, dataset, val_idx, norm, goal, system, hyper));
    }
  }

  RaModel& model = result.model;
  model.arch = arch;
  model.system = system;
  model.goal = goal;
  model.tnet = std::move(tnet);
  model.pnet = std::move(pnet);
  model.norm = norm;
  model.meta.dataset_seed = dataset.seed;
  model.meta.train_seed = hyper.seed;
  model.meta.epochs = hyper.epochs;
  model.meta.adam_steps = steps;
  model.meta.final_train_loss = result.train_loss.back();
  model.meta.final_val_loss = result.val_loss.empty() ? 0.0 : result.val_loss.back();
  return result;
}

}  // namespace d2dra
