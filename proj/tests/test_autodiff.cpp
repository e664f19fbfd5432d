#include <doctest.h>

#include <cmath>

#include "d2dra/autodiff.hpp"
#include "d2dra/errors.hpp"
#include "d2dra/grad_check.hpp"
#include "d2dra/optimizer.hpp"
#include "d2dra/rng.hpp"

using namespace d2dra;
using nn::Mat;
using nn::ParamSet;
using nn::Tape;

namespace {

Mat row(std::initializer_list<double> xs) {
  Mat m(1, xs.size());
  int c = 0;
  for (double x : xs) m(0, c++) = x;
  return m;
}

// Scalar loss of a small dense net: mean(sigmoid(relu(x W0 + b0) W1 + b1)).
double stack_loss_value(const ParamSet& params, const Mat& x) {
  Tape tape;
  std::vector<Tape::Id> nodes;
  const Tape::Id out = nn::dense_forward_tape(tape, params, tape.constant(x), &nodes);
  return tape.value(tape.mean_all(tape.sigmoid(out)))(0, 0);
}

std::vector<Mat> stack_loss_grads(const ParamSet& params, const Mat& x) {
  Tape tape;
  std::vector<Tape::Id> nodes;
  const Tape::Id out = nn::dense_forward_tape(tape, params, tape.constant(x), &nodes);
  tape.backward(tape.mean_all(tape.sigmoid(out)));
  std::vector<Mat> grads;
  for (Tape::Id id : nodes) grads.push_back(tape.grad(id));
  return grads;
}

}  // namespace

TEST_SUITE_BEGIN("neuralcore");

TEST_CASE("forward primitives hit their reference values") {
  Tape tape;
  const auto sm0 = tape.softmax_groups(tape.constant(row({0.0, 0.0})), 2);
  CHECK(tape.value(sm0)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tape.value(sm0)(0, 1) == doctest::Approx(0.5).epsilon(1e-15));

  const auto sm = tape.softmax_groups(tape.constant(row({1.0, 2.0})), 2);
  CHECK(tape.value(sm)(0, 0) == doctest::Approx(0.2689414213699951).epsilon(1e-12));
  CHECK(tape.value(sm)(0, 1) == doctest::Approx(0.7310585786300049).epsilon(1e-12));

  const auto sg = tape.sigmoid(tape.constant(row({0.0})));
  CHECK(tape.value(sg)(0, 0) == 0.5);
  const auto rl = tape.relu(tape.constant(row({-3.0})));
  CHECK(tape.value(rl)(0, 0) == 0.0);
  const auto th = tape.tanh(tape.constant(row({0.5})));
  CHECK(tape.value(th)(0, 0) == doctest::Approx(0.46211715726000974).epsilon(1e-15));
}

TEST_CASE("dense layer computes Wx + b") {
  Tape tape;
  Mat w(2, 2);
  w << 1.0, 2.0, 3.0, 4.0;
  const auto y = tape.add_row(tape.matmul(tape.constant(row({1.0, 1.0})), tape.constant(w)),
                              tape.constant(row({0.5, -0.5})));
  CHECK(tape.value(y)(0, 0) == doctest::Approx(4.5));
  CHECK(tape.value(y)(0, 1) == doctest::Approx(5.5));
}

TEST_CASE("softmax groups sum to one and shrug off constant shifts") {
  RandomStream rng(4);
  Mat x(8, 6);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 6; ++c) x(r, c) = rng.uniform(-30.0, 30.0);
  }
  Tape tape;
  const auto sm = tape.softmax_groups(tape.constant(x), 3);
  const Mat& y = tape.value(sm);
  for (int r = 0; r < 8; ++r) {
    for (int g = 0; g < 2; ++g) {
      double sum = 0.0;
      for (int c = 0; c < 3; ++c) {
        sum += y(r, 3 * g + c);
        CHECK(y(r, 3 * g + c) > 0.0);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  Mat shifted = x;
  shifted.array() += 1234.5;  // same within each group
  Tape tape2;
  const Mat& y2 = tape2.value(tape2.softmax_groups(tape2.constant(shifted), 3));
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 6; ++c) CHECK(y2(r, c) == doctest::Approx(y(r, c)).epsilon(1e-12));
  }
}

TEST_CASE("shape mismatches are rejected") {
  Tape tape;
  const auto a = tape.constant(Mat::Zero(2, 3));
  const auto b = tape.constant(Mat::Zero(3, 2));
  CHECK_THROWS_AS(tape.add(a, b), ConfigError);
  CHECK_THROWS_AS(tape.matmul(a, a), ConfigError);
  CHECK_THROWS_AS(tape.softmax_groups(a, 2), ConfigError);
  CHECK_THROWS_AS(tape.slice_cols(a, 2, 2), ConfigError);
  CHECK_THROWS_AS(tape.backward(a), ConfigError);
}

TEST_CASE("backward of w^2 at w=3 gives 6") {
  Tape tape;
  const auto w = tape.param(row({3.0}));
  tape.backward(tape.sum_all(tape.mul(w, w)));
  CHECK(tape.grad(w)(0, 0) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("relu subgradient at exactly zero is zero") {
  Tape tape;
  const auto w = tape.param(row({0.0, -1.0, 2.0}));
  tape.backward(tape.sum_all(tape.relu(w)));
  CHECK(tape.grad(w)(0, 0) == 0.0);
  CHECK(tape.grad(w)(0, 1) == 0.0);
  CHECK(tape.grad(w)(0, 2) == 1.0);
}

TEST_CASE("two-layer network gradients match finite differences") {
  RandomStream rng(7);
  ParamSet params = nn::make_dense_stack("net", {5, 8, 3}, rng);
  Mat x(4, 5);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 5; ++c) x(r, c) = rng.uniform(-2.0, 2.0);
  }
  const auto report = nn::grad_check(
      params, [&](const ParamSet& p) { return stack_loss_value(p, x); },
      [&](const ParamSet& p) { return stack_loss_grads(p, x); });
  INFO("max rel error ", report.max_rel_error, " at ", report.worst_param);
  CHECK(report.pass);
  CHECK(report.max_rel_error <= 1e-4);
}

TEST_CASE("softmax+log gradient equals the analytic Jacobian result") {
  // loss = -log(softmax(x)[target]) => dx_j = softmax_j - [j == target]
  Tape tape;
  const auto x = tape.param(row({0.3, -1.2, 2.0, 0.4}));
  const auto sm = tape.softmax_groups(x, 4);
  const auto picked = tape.slice_cols(sm, 2, 1);  // target = 2
  tape.backward(tape.sum_all(tape.scale(tape.log(picked), -1.0)));
  const Mat& y = tape.value(sm);
  for (int j = 0; j < 4; ++j) {
    const double expected = y(0, j) - (j == 2 ? 1.0 : 0.0);
    CHECK(tape.grad(x)(0, j) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("repeat/slice/sum column plumbing propagates gradients") {
  Tape tape;
  const auto w = tape.param(row({1.5, -2.0}));
  const auto rep = tape.repeat_cols(w, 3);  // [w0 w0 w0 w1 w1 w1]
  CHECK(tape.value(rep)(0, 2) == 1.5);
  CHECK(tape.value(rep)(0, 3) == -2.0);
  tape.backward(tape.sum_all(rep));
  CHECK(tape.grad(w)(0, 0) == 3.0);
  CHECK(tape.grad(w)(0, 1) == 3.0);

  Tape t2;
  const auto v = t2.param(row({1.0, 2.0, 3.0}));
  t2.backward(t2.sum_all(t2.slice_cols(v, 1, 2)));
  CHECK(t2.grad(v)(0, 0) == 0.0);
  CHECK(t2.grad(v)(0, 1) == 1.0);
  CHECK(t2.grad(v)(0, 2) == 1.0);

  Tape t3;
  Mat m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const auto p = t3.param(m);
  t3.backward(t3.mean_all(t3.sum_cols(p)));
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) CHECK(t3.grad(p)(r, c) == 0.5);
  }
}

TEST_CASE("xavier bounds, variance and determinism") {
  RandomStream rng(13);
  const Mat w = nn::xavier_init(100, 100, rng);
  const double bound = std::sqrt(6.0 / 200.0);
  CHECK(bound == doctest::Approx(0.17320508075688773).epsilon(1e-15));
  for (int r = 0; r < 100; ++r) {
    for (int c = 0; c < 100; ++c) {
      REQUIRE(w(r, c) >= -bound);
      REQUIRE(w(r, c) <= bound);
    }
  }
  // 1e5 draws for the variance check: bound^2/3 within 5%.
  RandomStream rng2(14);
  const Mat big = nn::xavier_init(200, 500, rng2);
  const double big_bound = std::sqrt(6.0 / 700.0);
  double bsq = 0.0, bsum = 0.0;
  for (int r = 0; r < 200; ++r) {
    for (int c = 0; c < 500; ++c) {
      bsum += big(r, c);
      bsq += big(r, c) * big(r, c);
    }
  }
  const double bn = 200 * 500;
  const double mean = bsum / bn;
  CHECK(bsq / bn - mean * mean == doctest::Approx(big_bound * big_bound / 3.0).epsilon(0.05));

  RandomStream r1(5), r2(5);
  CHECK(nn::xavier_init(7, 9, r1) == nn::xavier_init(7, 9, r2));
  CHECK_THROWS_AS(nn::xavier_init(0, 3, r1), ConfigError);
}

TEST_CASE("adam: zero gradients leave parameters untouched") {
  RandomStream rng(3);
  ParamSet params = nn::make_dense_stack("net", {3, 4, 2}, rng);
  const ParamSet before = params;
  nn::AdamState state = nn::AdamState::init(params);
  std::vector<Mat> grads;
  for (const auto& e : params.entries) grads.push_back(Mat::Zero(e.value.rows(), e.value.cols()));
  nn::adam_step(params, grads, state);
  for (std::size_t k = 0; k < params.entries.size(); ++k) {
    CHECK(params.entries[k].value == before.entries[k].value);
  }
}

TEST_CASE("adam single-scalar first step matches the hand update") {
  ParamSet params;
  params.entries.push_back({"w", row({1.0})});
  nn::AdamState state = nn::AdamState::init(params);
  std::vector<Mat> grads = {row({1.0})};
  nn::adam_step(params, grads, state);
  // m_hat = 1, v_hat = 1 after bias correction: step = alpha / (1 + eps).
  CHECK(1.0 - params.entries[0].value(0, 0) ==
        doctest::Approx(0.0009999999900000003).epsilon(1e-12));

  // alpha = 0 freezes parameters.
  ParamSet frozen;
  frozen.entries.push_back({"w", row({2.5})});
  nn::AdamState s2 = nn::AdamState::init(frozen, {.alpha = 0.0});
  nn::adam_step(frozen, {row({3.0})}, s2);
  CHECK(frozen.entries[0].value(0, 0) == 2.5);
}

TEST_CASE("adam trajectories are reproducible") {
  auto run = [] {
    RandomStream rng(17);
    ParamSet params = nn::make_dense_stack("net", {4, 6, 2}, rng);
    nn::AdamState state = nn::AdamState::init(params);
    Mat x(3, 4);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) x(r, c) = rng.uniform(-1.0, 1.0);
    }
    for (int step = 0; step < 25; ++step) {
      Tape tape;
      std::vector<Tape::Id> nodes;
      const auto out = nn::dense_forward_tape(tape, params, tape.constant(x), &nodes);
      tape.backward(tape.mean_all(tape.mul(out, out)));
      std::vector<Mat> grads;
      for (auto id : nodes) grads.push_back(tape.grad(id));
      nn::adam_step(params, grads, state);
    }
    return params;
  };
  const ParamSet a = run();
  const ParamSet b = run();
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    CHECK(a.entries[k].value == b.entries[k].value);
  }
}

TEST_CASE("grad_check flags a corrupted gradient") {
  RandomStream rng(19);
  ParamSet params = nn::make_dense_stack("net", {3, 5, 2}, rng);
  Mat x(2, 3);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) x(r, c) = rng.uniform(-1.0, 1.0);
  }
  const auto report = nn::grad_check(
      params, [&](const ParamSet& p) { return stack_loss_value(p, x); },
      [&](const ParamSet& p) {
        auto grads = stack_loss_grads(p, x);
        grads[0](0, 0) += 0.25;  // deliberate corruption
        return grads;
      });
  CHECK(!report.pass);
}

TEST_CASE("grad_check passes when every [.]^+ branch is inactive") {
  // loss = mean(relu(xW)) with all pre-activations negative: gradient is
  // exactly zero everywhere and finite differences agree.
  ParamSet params;
  Mat w(2, 2);
  w << 0.5, 0.25, 0.75, 0.5;
  params.entries.push_back({"w", w});
  Mat x(3, 2);
  x << -1.0, -2.0, -0.5, -1.5, -3.0, -0.25;  // xW strictly negative
  auto value = [&](const ParamSet& p) {
    Tape tape;
    const auto out = tape.relu(tape.matmul(tape.constant(x), tape.param(p.entries[0].value)));
    return tape.value(tape.mean_all(out))(0, 0);
  };
  auto grads = [&](const ParamSet& p) {
    Tape tape;
    const auto wn = tape.param(p.entries[0].value);
    tape.backward(tape.mean_all(tape.relu(tape.matmul(tape.constant(x), wn))));
    return std::vector<Mat>{tape.grad(wn)};
  };
  const auto report = nn::grad_check(params, value, grads);
  CHECK(report.pass);
  CHECK(report.max_abs_error <= 1e-6);
}

TEST_CASE("backward stays finite on extreme but finite inputs") {
  Tape tape;
  const auto x = tape.param(row({-700.0, 700.0, 0.0, 1e-9}));
  const auto y = tape.sum_all(tape.softmax_groups(tape.sigmoid(x), 4));
  tape.backward(y);
  for (int c = 0; c < 4; ++c) REQUIRE(std::isfinite(tape.grad(x)(0, c)));
}

TEST_SUITE_END();
