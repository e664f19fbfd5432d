#include "d2dra/autodiff.hpp"

#include <cmath>
#include <string>

#include "d2dra/errors.hpp"

namespace d2dra::nn {

void softmax_groups_inplace(Mat& x, int group_size) {
  const int groups = static_cast<int>(x.cols()) / group_size;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (int g = 0; g < groups; ++g) {
      const int base = g * group_size;
      double mx = x(r, base);
      for (int c = 1; c < group_size; ++c) mx = std::max(mx, x(r, base + c));
      double sum = 0.0;
      for (int c = 0; c < group_size; ++c) {
        const double e = std::exp(x(r, base + c) - mx);
        x(r, base + c) = e;
        sum += e;
      }
      for (int c = 0; c < group_size; ++c) x(r, base + c) /= sum;
    }
  }
}

Tape::Id Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<Id>(nodes_.size() - 1);
}

void Tape::check_same_shape(Id a, Id b, const char* op) const {
  const Mat& va = nodes_[a].value;
  const Mat& vb = nodes_[b].value;
  if (va.rows() != vb.rows() || va.cols() != vb.cols()) {
    throw ConfigError(std::string("tape ") + op + ": shape mismatch " +
                      std::to_string(va.rows()) + "x" + std::to_string(va.cols()) + " vs " +
                      std::to_string(vb.rows()) + "x" + std::to_string(vb.cols()));
  }
}

Tape::Id Tape::constant(Mat value) { return push({Op::kConst, -1, -1, 0, 0, 0.0, std::move(value), {}}); }

Tape::Id Tape::param(Mat value) { return push({Op::kParam, -1, -1, 0, 0, 0.0, std::move(value), {}}); }

Tape::Id Tape::matmul(Id x, Id w) {
  if (nodes_[x].value.cols() != nodes_[w].value.rows()) {
    throw ConfigError("tape matmul: inner dimensions disagree");
  }
  Mat v = nodes_[x].value * nodes_[w].value;
  return push({Op::kMatMul, x, w, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::add_row(Id x, Id bias) {
  if (nodes_[bias].value.rows() != 1 || nodes_[bias].value.cols() != nodes_[x].value.cols()) {
    throw ConfigError("tape add_row: bias must be 1 x cols(x)");
  }
  Mat v = nodes_[x].value.rowwise() + nodes_[bias].value.row(0);
  return push({Op::kAddRow, x, bias, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::add(Id a, Id b) {
  check_same_shape(a, b, "add");
  Mat v = nodes_[a].value + nodes_[b].value;
  return push({Op::kAdd, a, b, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::sub(Id a, Id b) {
  check_same_shape(a, b, "sub");
  Mat v = nodes_[a].value - nodes_[b].value;
  return push({Op::kSub, a, b, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::mul(Id a, Id b) {
  check_same_shape(a, b, "mul");
  Mat v = nodes_[a].value.cwiseProduct(nodes_[b].value);
  return push({Op::kMul, a, b, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::div(Id a, Id b) {
  check_same_shape(a, b, "div");
  Mat v = nodes_[a].value.cwiseQuotient(nodes_[b].value);
  return push({Op::kDiv, a, b, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::scale(Id x, double s) {
  Mat v = s * nodes_[x].value;
  return push({Op::kScale, x, -1, 0, 0, s, std::move(v), {}});
}

Tape::Id Tape::add_scalar(Id x, double s) {
  Mat v = nodes_[x].value.array() + s;
  return push({Op::kAddScalar, x, -1, 0, 0, s, std::move(v), {}});
}

Tape::Id Tape::relu(Id x) {
  Mat v = nodes_[x].value.cwiseMax(0.0);
  return push({Op::kRelu, x, -1, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::sigmoid(Id x) {
  Mat v = (1.0 / (1.0 + (-nodes_[x].value.array()).exp())).matrix();
  return push({Op::kSigmoid, x, -1, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::tanh(Id x) {
  Mat v = nodes_[x].value.array().tanh().matrix();
  return push({Op::kTanh, x, -1, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::log(Id x) {
  Mat v = nodes_[x].value.array().log().matrix();
  return push({Op::kLog, x, -1, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::softmax_groups(Id x, int group_size) {
  const int cols = static_cast<int>(nodes_[x].value.cols());
  if (group_size < 1 || cols % group_size != 0) {
    throw ConfigError("tape softmax_groups: columns not divisible by group size");
  }
  Mat v = nodes_[x].value;
  softmax_groups_inplace(v, group_size);
  return push({Op::kSoftmaxGroups, x, -1, group_size, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::repeat_cols(Id x, int times) {
  const Mat& in = nodes_[x].value;
  Mat v(in.rows(), in.cols() * times);
  for (Eigen::Index c = 0; c < in.cols(); ++c) {
    for (int t = 0; t < times; ++t) v.col(c * times + t) = in.col(c);
  }
  return push({Op::kRepeatCols, x, -1, times, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::slice_cols(Id x, int start, int count) {
  const Mat& in = nodes_[x].value;
  if (start < 0 || count < 1 || start + count > in.cols()) {
    throw ConfigError("tape slice_cols: range out of bounds");
  }
  Mat v = in.middleCols(start, count);
  return push({Op::kSliceCols, x, -1, start, count, 0.0, std::move(v), {}});
}

Tape::Id Tape::sum_cols(Id x) {
  Mat v = nodes_[x].value.rowwise().sum();
  return push({Op::kSumCols, x, -1, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::sum_all(Id x) {
  Mat v(1, 1);
  v(0, 0) = nodes_[x].value.sum();
  return push({Op::kSumAll, x, -1, 0, 0, 0.0, std::move(v), {}});
}

Tape::Id Tape::mean_all(Id x) {
  Mat v(1, 1);
  v(0, 0) = nodes_[x].value.mean();
  return push({Op::kMeanAll, x, -1, 0, 0, 0.0, std::move(v), {}});
}

void Tape::backward(Id output) {
  const Mat& out = nodes_[output].value;
  if (out.rows() != 1 || out.cols() != 1) {
    throw ConfigError("tape backward: output must be scalar (1x1)");
  }
  for (Node& n : nodes_) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  nodes_[output].grad(0, 0) = 1.0;

  for (int id = output; id >= 0; --id) {
    Node& n = nodes_[id];
    const Mat& g = n.grad;
    switch (n.op) {
      case Op::kConst:
      case Op::kParam:
        break;
      case Op::kMatMul:
        nodes_[n.a].grad.noalias() += g * nodes_[n.b].value.transpose();
        nodes_[n.b].grad.noalias() += nodes_[n.a].value.transpose() * g;
        break;
      case Op::kAddRow:
        nodes_[n.a].grad += g;
        nodes_[n.b].grad.row(0) += g.colwise().sum();
        break;
      case Op::kAdd:
        nodes_[n.a].grad += g;
        nodes_[n.b].grad += g;
        break;
      case Op::kSub:
        nodes_[n.a].grad += g;
        nodes_[n.b].grad -= g;
        break;
      case Op::kMul:
        nodes_[n.a].grad += g.cwiseProduct(nodes_[n.b].value);
        nodes_[n.b].grad += g.cwiseProduct(nodes_[n.a].value);
        break;
      case Op::kDiv:
        nodes_[n.a].grad += g.cwiseQuotient(nodes_[n.b].value);
        nodes_[n.b].grad -= g.cwiseProduct(n.value).cwiseQuotient(nodes_[n.b].value);
        break;
      case Op::kScale:
        nodes_[n.a].grad += n.s0 * g;
        break;
      case Op::kAddScalar:
        nodes_[n.a].grad += g;
        break;
      case Op::kRelu:
        // Strict > 0: subgradient 0 exactly at the kink.
        nodes_[n.a].grad.array() +=
            g.array() * (nodes_[n.a].value.array() > 0.0).cast<double>();
        break;
      case Op::kSigmoid:
        nodes_[n.a].grad.array() += g.array() * n.value.array() * (1.0 - n.value.array());
        break;
      case Op::kTanh:
        nodes_[n.a].grad.array() += g.array() * (1.0 - n.value.array().square());
        break;
      case Op::kLog:
        nodes_[n.a].grad.array() += g.array() / nodes_[n.a].value.array();
        break;
      case Op::kSoftmaxGroups: {
        Mat& ga = nodes_[n.a].grad;
        const int group = n.i0;
        const int groups = static_cast<int>(n.value.cols()) / group;
        for (Eigen::Index r = 0; r < n.value.rows(); ++r) {
          for (int gi = 0; gi < groups; ++gi) {
            const int base = gi * group;
            double dot = 0.0;
            for (int c = 0; c < group; ++c) dot += g(r, base + c) * n.value(r, base + c);
            for (int c = 0; c < group; ++c) {
              ga(r, base + c) += n.value(r, base + c) * (g(r, base + c) - dot);
            }
          }
        }
        break;
      }
      case Op::kRepeatCols: {
        Mat& ga = nodes_[n.a].grad;
        const int times = n.i0;
        for (Eigen::Index c = 0; c < ga.cols(); ++c) {
          for (int t = 0; t < times; ++t) ga.col(c) += g.col(c * times + t);
        }
        break;
      }
      case Op::kSliceCols:
        nodes_[n.a].grad.middleCols(n.i0, n.i1) += g;
        break;
      case Op::kSumCols:
        nodes_[n.a].grad.colwise() += g.col(0);
        break;
      case Op::kSumAll:
        nodes_[n.a].grad.array() += g(0, 0);
        break;
      case Op::kMeanAll:
        nodes_[n.a].grad.array() +=
            g(0, 0) / static_cast<double>(nodes_[n.a].value.size());
        break;
    }
  }
}

}  // namespace d2dra::nn
