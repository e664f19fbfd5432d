#pragma once

#include <Eigen/Dense>
#include <vector>

namespace d2dra::nn {

using Mat = Eigen::MatrixXd;

// Reverse-mode tape over dense matrices. Values are computed eagerly as the
// graph is built, so the record is topologically ordered by construction and
// backward() visits each node exactly once, in reverse.
//
// The primitive set is exactly what the allocation losses need: dense layers,
// ReLU ([.]^+ with subgradient 0 at 0), sigmoid, tanh, log, grouped softmax,
// column plumbing and reductions. No general broadcasting.
class Tape {
 public:
  using Id = int;

  // Leaf without gradient tracking (gains, features, thresholds).
  Id constant(Mat value);
  // Leaf with gradient tracking (weights, biases).
  Id param(Mat value);

  Id matmul(Id x, Id w);             // (B x I) * (I x O)
  Id add_row(Id x, Id bias);         // bias 1 x K broadcast over rows
  Id add(Id a, Id b);                // elementwise, same shape
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);
  Id div(Id a, Id b);
  Id scale(Id x, double s);          // s * x
  Id add_scalar(Id x, double s);     // x + s
  Id relu(Id x);
  Id sigmoid(Id x);
  Id tanh(Id x);
  Id log(Id x);                      // natural log; inputs must be > 0
  // Softmax across each consecutive group of group_size columns, per row,
  // with max-subtraction for stability.
  Id softmax_groups(Id x, int group_size);
  // B x N -> B x (N * times); output column i*times + t copies input column i.
  Id repeat_cols(Id x, int times);
  Id slice_cols(Id x, int start, int count);
  Id sum_cols(Id x);                 // B x K -> B x 1
  Id sum_all(Id x);                  // -> 1 x 1
  Id mean_all(Id x);                 // -> 1 x 1

  // Accumulates gradients of a scalar (1 x 1) output into every node.
  // Throws ConfigError if the output is not scalar.
  void backward(Id output);

  const Mat& value(Id id) const { return nodes_[id].value; }
  // Valid after backward().
  const Mat& grad(Id id) const { return nodes_[id].grad; }

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    kConst, kParam, kMatMul, kAddRow, kAdd, kSub, kMul, kDiv, kScale, kAddScalar,
    kRelu, kSigmoid, kTanh, kLog, kSoftmaxGroups, kRepeatCols, kSliceCols,
    kSumCols, kSumAll, kMeanAll,
  };
  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    int i0 = 0;
    int i1 = 0;
    double s0 = 0.0;
    Mat value;
    Mat grad;
  };

  Id push(Node node);
  void check_same_shape(Id a, Id b, const char* op) const;

  std::vector<Node> nodes_;
};

// Row-wise grouped softmax with max-subtraction; shared by the tape op and
// the tape-free inference path so both produce bit-identical outputs.
void softmax_groups_inplace(Mat& x, int group_size);

}  // namespace d2dra::nn
