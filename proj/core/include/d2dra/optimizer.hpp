#pragma once

#include <string>
#include <vector>

#include "d2dra/autodiff.hpp"
#include "d2dra/rng.hpp"

namespace d2dra::nn {

// Named weight/bias matrices in a fixed order; the order defines gradient
// collection and Adam update order, so training stays deterministic.
struct ParamSet {
  struct Entry {
    std::string name;
    Mat value;
  };
  std::vector<Entry> entries;

  Mat& find(const std::string& name);
  const Mat& find(const std::string& name) const;

  // Shapes chain correctly and all values are finite.
  bool shapes_chain() const;
};

// Uniform on [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))],
// filled row-major. Biases are initialized to zero elsewhere.
Mat xavier_init(int fan_in, int fan_out, RandomStream& rng);

// Dense ReLU stack: layer_dims = {in, h1, ..., out}; weights w0..w{L-1} with
// zero biases b0..b{L-1}. The final layer is linear (output transforms such
// as sigmoid/softmax are applied by the caller).
ParamSet make_dense_stack(const std::string& prefix, const std::vector<int>& layer_dims,
                          RandomStream& rng);

// Forward through a dense stack built by make_dense_stack, ReLU on all but
// the last layer. Tape-free, used for inference.
Mat dense_forward(const ParamSet& params, const Mat& input);

// Same network recorded on a tape; param node ids are appended to
// param_nodes in entry order.
Tape::Id dense_forward_tape(Tape& tape, const ParamSet& params, Tape::Id input,
                            std::vector<Tape::Id>* param_nodes);

struct AdamHyper {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  std::int64_t step = 0;
  std::vector<Mat> m;  // first moments, parallel to ParamSet entries
  std::vector<Mat> v;  // second moments

  static AdamState init(const ParamSet& params, AdamHyper hyper = {});
};

// One bias-corrected Adam update over every entry, in order.
void adam_step(ParamSet& params, const std::vector<Mat>& grads, AdamState& state);

}  // namespace d2dra::nn
