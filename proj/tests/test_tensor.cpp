#include <gtest/gtest.h>

#include <functional>

#include "scriptkit/error.hpp"
#include "scriptkit/gradcheck.hpp"
#include "scriptkit/ops.hpp"
#include "scriptkit/rng.hpp"
#include "scriptkit/tensor.hpp"

using namespace scriptkit;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(-scale, scale);
  return t;
}

// Loss = sum(c * out) for fixed random c; backward receives c as dout.
GradCheckReport check_op(std::vector<std::pair<std::string, Tensor*>> inputs, const std::function<Tensor()>& forward,
                         const std::function<void(const Tensor&, const Tensor&)>& backward, Rng& rng) {
  ParamGroup group;
  for (auto& [name, t] : inputs) group.add(name, *t);
  const Tensor probe = forward();
  const Tensor c = random_tensor(probe.shape(), rng);
  auto loss = [&](bool with_grad) {
    const Tensor out = forward();
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) total += c[i] * out[i];
    if (with_grad) backward(out, c);
    return total;
  };
  GradCheckOptions opts;
  opts.eps = 1e-5;
  opts.tol = 1e-6;
  return grad_check(loss, group, opts);
}

}  // namespace

TEST(Tensor, ShapeAndStorage) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_FALSE(t.has_grad());
  t.grad()[0] = 1.0;
  EXPECT_TRUE(t.has_grad());
  t.zero_grad();
  EXPECT_EQ(t.grad()[0], 0.0);
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0}), ShapeError);
  EXPECT_THROW(t.reshape({4}), ShapeError);
  t.reshape({3, 2});
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_THROW(t.dim(2), ShapeError);
}

TEST(ParamGroupTest, OrderAndNames) {
  Tensor a({1}), b({2});
  ParamGroup g;
  g.add("a", a);
  g.add("b", b, false);
  EXPECT_THROW(g.add("a", b), ConfigError);
  EXPECT_EQ(g.entries()[0].name, "a");
  EXPECT_EQ(g.scalar_count(), 3u);
  EXPECT_EQ(g.scalar_count(true), 1u);
  EXPECT_EQ(&g.at("b"), &b);
  EXPECT_THROW(g.at("c"), ConfigError);
}

TEST(Ops, ShapeLawsAndExamples) {
  EXPECT_EQ(ops::matmul(Tensor({2, 3}), Tensor({3, 4})).shape(), (Shape{2, 4}));
  try {
    ops::matmul(Tensor({2, 3}), Tensor({2, 4}));
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("(2, 3)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("(2, 4)"), std::string::npos);
  }
  const Tensor s = ops::softmax(Tensor({1, 2}, {0.0, 0.0}), 1);
  EXPECT_DOUBLE_EQ(s[0], 0.5);
  EXPECT_DOUBLE_EQ(s[1], 0.5);

  Tensor xy({2, 1}, {3.0, 5.0});
  const Tensor m = ops::mean(xy, 0);
  EXPECT_DOUBLE_EQ(m[0], 4.0);
  ops::mean_backward(xy, Tensor({1, 1}, {1.0}), 0);
  EXPECT_DOUBLE_EQ(xy.grad()[0], 0.5);
  EXPECT_DOUBLE_EQ(xy.grad()[1], 0.5);

  EXPECT_THROW(ops::add(Tensor({2, 2}), Tensor({2, 3})), ShapeError);
  EXPECT_THROW(ops::slice(Tensor({2, 2}), 0, 1, 3), ShapeError);
  EXPECT_THROW(ops::concat({}, 0), ShapeError);
  Tensor a({1, 2}), b({1, 3});
  EXPECT_THROW(ops::concat({&a, &b}, 0), ShapeError);
  EXPECT_EQ(ops::concat({&a, &b}, 1).shape(), (Shape{1, 5}));
}

TEST(Ops, SoftmaxRowsSumToOne) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = random_tensor({4, 7}, rng, 30.0);
    const Tensor y = ops::softmax(x, 1);
    for (std::size_t r = 0; r < 4; ++r) {
      double sum = 0.0;
      for (double v : y.row(r)) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    const Tensor yc = ops::softmax(x, 0);
    for (std::size_t c = 0; c < 7; ++c) {
      double sum = 0.0;
      for (std::size_t r = 0; r < 4; ++r) sum += yc.at(r, c);
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Ops, GradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.index(4), k = 1 + rng.index(4), m = 1 + rng.index(4);
    Tensor a = random_tensor({n, k}, rng), b = random_tensor({k, m}, rng), c = random_tensor({n, k}, rng);

    auto r = check_op({{"a", &a}, {"b", &b}}, [&] { return ops::matmul(a, b); },
                      [&](const Tensor&, const Tensor& d) { ops::matmul_backward(a, b, d); }, rng);
    EXPECT_LT(r.max_rel_error, 1e-6) << "matmul seed " << seed;

    r = check_op({{"a", &a}, {"c", &c}}, [&] { return ops::add(a, c); },
                 [&](const Tensor&, const Tensor& d) { ops::add_backward(a, c, d); }, rng);
    EXPECT_LT(r.max_rel_error, 1e-6) << "add seed " << seed;

    r = check_op({{"a", &a}}, [&] { return ops::sigmoid(a); },
                 [&](const Tensor& y, const Tensor& d) { ops::sigmoid_backward(a, y, d); }, rng);
    EXPECT_LT(r.max_rel_error, 1e-6) << "sigmoid seed " << seed;

    r = check_op({{"a", &a}}, [&] { return ops::tanh(a); },
                 [&](const Tensor& y, const Tensor& d) { ops::tanh_backward(a, y, d); }, rng);
    EXPECT_LT(r.max_rel_error, 1e-6) << "tanh seed " << seed;

    for (std::size_t axis : {0u, 1u}) {
      r = check_op({{"a", &a}}, [&] { return ops::softmax(a, axis); },
                   [&](const Tensor& y, const Tensor& d) { ops::softmax_backward(a, y, d, axis); }, rng);
      EXPECT_LT(r.max_rel_error, 1e-6) << "softmax axis " << axis << " seed " << seed;

      r = check_op({{"a", &a}}, [&] { return ops::mean(a, axis); },
                   [&](const Tensor&, const Tensor& d) { ops::mean_backward(a, d, axis); }, rng);
      EXPECT_LT(r.max_rel_error, 1e-6) << "mean axis " << axis << " seed " << seed;

      const std::size_t extent = a.dim(axis);
      const std::size_t begin = rng.index(extent);
      const std::size_t end = begin + 1 + rng.index(extent - begin);
      r = check_op({{"a", &a}}, [&] { return ops::slice(a, axis, begin, end); },
                   [&](const Tensor&, const Tensor& d) { ops::slice_backward(a, d, axis, begin); }, rng);
      EXPECT_LT(r.max_rel_error, 1e-6) << "slice axis " << axis << " seed " << seed;

      r = check_op({{"a", &a}, {"c", &c}}, [&] { return ops::concat({&a, &c}, axis); },
                   [&](const Tensor&, const Tensor& d) { ops::concat_backward({&a, &c}, d, axis); }, rng);
      EXPECT_LT(r.max_rel_error, 1e-6) << "concat axis " << axis << " seed " << seed;
    }
  }
}

TEST(GradCheck, SumOfSquaresIsExact) {
  Rng rng(8);
  Tensor x = random_tensor({3, 3}, rng);
  ParamGroup g;
  g.add("x", x);
  auto f = [&](bool with_grad) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += x[i] * x[i];
      if (with_grad) x.grad()[i] += 2.0 * x[i];
    }
    return s;
  };
  GradCheckOptions opts;
  opts.eps = 1e-3;
  const auto report = grad_check(f, g, opts);
  EXPECT_LT(report.max_rel_error, 1e-10);
  EXPECT_EQ(report.coordinates, 9u);
  EXPECT_TRUE(report.passed);
}

TEST(GradCheck, DetectsAWrongGradient) {
  Tensor x({1}, {2.0});
  ParamGroup g;
  g.add("x", x);
  auto f = [&](bool with_grad) {
    if (with_grad) x.grad()[0] += 3.0 * x[0];
    return x[0] * x[0];
  };
  const auto report = grad_check(f, g);
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.worst_param, "x");
}

TEST(GradCheck, RejectsBadOptions) {
  Tensor x({1});
  ParamGroup g;
  g.add("x", x);
  GradCheckOptions opts;
  opts.eps = 0.0;
  EXPECT_THROW(grad_check([](bool) { return 0.0; }, g, opts), ConfigError);
  opts.eps = 1e-6;
  opts.floor = -1.0;
  EXPECT_THROW(grad_check([](bool) { return 0.0; }, g, opts), ConfigError);
}
