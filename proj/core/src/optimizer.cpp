#include "d2dra/optimizer.hpp"

#include <cmath>

#include "d2dra/errors.hpp"

namespace d2dra::nn {

Mat& ParamSet::find(const std::string& name) {
  for (Entry& e : entries) {
    if (e.name == name) return e.value;
  }
  throw ConfigError("ParamSet: no entry named '" + name + "'");
}

const Mat& ParamSet::find(const std::string& name) const {
  return const_cast<ParamSet*>(this)->find(name);
}

bool ParamSet::shapes_chain() const {
  for (const Entry& e : entries) {
    if (!e.value.allFinite()) return false;
  }
  // Weight k's output dim must match weight k+1's input dim.
  const Mat* prev_w = nullptr;
  for (const Entry& e : entries) {
    if (e.name.find(".w") == std::string::npos) continue;
    if (prev_w != nullptr && prev_w->cols() != e.value.rows()) return false;
    prev_w = &e.value;
  }
  return true;
}

Mat xavier_init(int fan_in, int fan_out, RandomStream& rng) {
  if (fan_in < 1 || fan_out < 1) throw ConfigError("xavier_init: fans must be >= 1");
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  Mat w(fan_in, fan_out);
  for (int r = 0; r < fan_in; ++r) {
    for (int c = 0; c < fan_out; ++c) {
      w(r, c) = rng.uniform(-bound, bound);
    }
  }
  return w;
}

ParamSet make_dense_stack(const std::string& prefix, const std::vector<int>& layer_dims,
                          RandomStream& rng) {
  if (layer_dims.size() < 2) throw ConfigError("make_dense_stack: need at least 2 dims");
  ParamSet params;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int in = layer_dims[l];
    const int out = layer_dims[l + 1];
    params.entries.push_back({prefix + ".w" + std::to_string(l), xavier_init(in, out, rng)});
    params.entries.push_back({prefix + ".b" + std::to_string(l), Mat::Zero(1, out)});
  }
  return params;
}

Mat dense_forward(const ParamSet& params, const Mat& input) {
  const std::size_t n_layers = params.entries.size() / 2;
  Mat x = input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Mat& w = params.entries[2 * l].value;
    const Mat& b = params.entries[2 * l + 1].value;
    x = (x * w).rowwise() + b.row(0);
    if (l + 1 < n_layers) x = x.cwiseMax(0.0);
  }
  return x;
}

Tape::Id dense_forward_tape(Tape& tape, const ParamSet& params, Tape::Id input,
                            std::vector<Tape::Id>* param_nodes) {
  const std::size_t n_layers = params.entries.size() / 2;
  Tape::Id x = input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Tape::Id w = tape.param(params.entries[2 * l].value);
    const Tape::Id b = tape.param(params.entries[2 * l + 1].value);
    if (param_nodes != nullptr) {
      param_nodes->push_back(w);
      param_nodes->push_back(b);
    }
    x = tape.add_row(tape.matmul(x, w), b);
    if (l + 1 < n_layers) x = tape.relu(x);
  }
  return x;
}

AdamState AdamState::init(const ParamSet& params, AdamHyper hyper) {
  AdamState state;
  state.hyper = hyper;
  state.m.reserve(params.entries.size());
  state.v.reserve(params.entries.size());
  for (const auto& e : params.entries) {
    state.m.push_back(Mat::Zero(e.value.rows(), e.value.cols()));
    state.v.push_back(Mat::Zero(e.value.rows(), e.value.cols()));
  }
  return state;
}

void adam_step(ParamSet& params, const std::vector<Mat>& grads, AdamState& state) {
  if (grads.size() != params.entries.size() || state.m.size() != params.entries.size()) {
    throw ConfigError("adam_step: gradient/state count mismatch");
  }
  const AdamHyper& h = state.hyper;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.entries.size(); ++k) {
    Mat& theta = params.entries[k].value;
    const Mat& g = grads[k];
    if (g.rows() != theta.rows() || g.cols() != theta.cols()) {
      throw ConfigError("adam_step: gradient shape mismatch at '" + params.entries[k].name + "'");
    }
    state.m[k] = h.beta1 * state.m[k] + (1.0 - h.beta1) * g;
    state.v[k] = h.beta2 * state.v[k] + (1.0 - h.beta2) * g.cwiseProduct(g);
    const Mat m_hat = state.m[k] / bc1;
    const Mat v_hat = state.v[k] / bc2;
    theta.array() -= h.alpha * m_hat.array() / (v_hat.array().sqrt() + h.eps);
  }
}

}  // namespace d2dra::nn
