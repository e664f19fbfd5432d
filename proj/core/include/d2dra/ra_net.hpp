#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "d2dra/autodiff.hpp"
#include "d2dra/channel_model.hpp"
#include "d2dra/link_metrics.hpp"
#include "d2dra/optimizer.hpp"
#include "d2dra/system_config.hpp"

namespace d2dra {

// Tnet and Pnet share this shape. Layer counts are weight layers: 4 layers
// means 3 hidden ReLU layers plus a linear output layer.
struct ArchConfig {
  int layers_tnet = 4;
  int layers_pnet = 4;
  int hidden_width = 100;
  int input_dim = 0;  // M * (N+1)^2, set from the SystemConfig

  void validate(const SystemConfig& system) const;
  std::vector<int> tnet_dims(const SystemConfig& system) const;  // ... -> N
  std::vector<int> pnet_dims(const SystemConfig& system) const;  // ... -> N*M

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

// Per-feature mean / standard deviation of the dB-scale gains over the
// training split. stddev is floored at 1e-9.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  friend bool operator==(const NormStats&, const NormStats&) = default;
};

struct TrainHyper {
  int epochs = 200;
  int batch_size = 1000;
  double lr_base = 1e-3;
  double lr_decay = 0.3;
  std::vector<double> lr_milestones = {1.0 / 3.0, 2.0 / 3.0};  // fractions of epochs
  double lambda1 = 10.0;  // interference penalty weight
  double lambda2 = 10.0;  // QoS penalty weight
  double val_fraction = 0.1;
  // EE enters the loss as EE_i * ee_scale so its magnitude is comparable to
  // the SE objective and Adam step sizes transfer across goals. Monotone, so
  // the preference ordering over allocations is unchanged.
  double ee_scale = 1e-8;
  std::uint64_t seed = 1;
  // The QoS penalty is [R_T - SE_i]^+ (penalize violation). The literal
  // published form [SE_i - R_T]^+ penalizes satisfying the constraint and is
  // kept behind this flag for comparison runs only.
  bool legacy_qos_sign = false;
};

struct TrainMeta {
  std::uint64_t dataset_seed = 0;
  std::uint64_t train_seed = 0;
  int epochs = 0;
  std::int64_t adam_steps = 0;
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
};

struct RaModel {
  ArchConfig arch;
  SystemConfig system;
  Goal goal = Goal::kMaxSe;
  nn::ParamSet tnet;
  nn::ParamSet pnet;
  NormStats norm;
  TrainMeta meta;
};

// feature_k = (10*log10(h_k) - mean_k) / stddev_k, flattened [m][i][j].
// Throws ConfigError on non-positive gains.
std::vector<double> preprocess(const ChannelInstance& instance, const NormStats& norm);

NormStats compute_norm_stats(const Dataset& dataset, std::span<const std::size_t> indices);

// t_i = P_T * sigmoid(Tnet_i(x)); rho_i = softmax group i of Pnet(x);
// p[i][m] = t_i * rho_{i,m}. The power constraint holds by construction.
PowerAllocation forward_alloc(const RaModel& model, const std::vector<double>& features);

// preprocess with the model's stored NormStats, then forward_alloc.
PowerAllocation infer(const RaModel& model, const ChannelInstance& instance);

// Rows of the z-scored feature matrix and the matching linear gains for a
// set of instances, both B x input_dim in [m][i][j] column order.
struct BatchData {
  nn::Mat features;
  nn::Mat gains;
};
BatchData make_batch(const Dataset& dataset, std::span<const std::size_t> indices,
                     const NormStats& norm);

struct LossGraph {
  nn::Tape::Id loss = -1;   // scalar
  nn::Tape::Id power = -1;  // B x (N*M), column i*M+m
  std::vector<nn::Tape::Id> tnet_nodes;
  std::vector<nn::Tape::Id> pnet_nodes;
};

// Batch-mean loss: objective (-sum SE_i, -ee_scale * sum EE_i, or
// +sum p[i][m]) plus lambda1 * sum_k tanh([I^k - I_T]^+) plus
// lambda2 * sum_i tanh([R_T - SE_i]^+), all in linear units.
LossGraph build_loss_graph(nn::Tape& tape, const nn::ParamSet& tnet, const nn::ParamSet& pnet,
                           const BatchData& batch, Goal goal, const SystemConfig& system,
                           const TrainHyper& hyper);

struct TrainResult {
  RaModel model;
  std::vector<double> train_loss;  // per-epoch mean over training samples
  std::vector<double> val_loss;    // per-epoch mean over the validation split
};

// Xavier-initialized Adam training over shuffled mini-batches with the
// milestone step-size schedule. NormStats come from the training split only.
// Throws TrainingDivergedError on a non-finite loss.
TrainResult train(const Dataset& dataset, Goal goal, const ArchConfig& arch,
                  const TrainHyper& hyper);

}  // namespace d2dra
