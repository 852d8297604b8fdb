#include "wsym/tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "wsym/rng.hpp"

using namespace wsym;

namespace {

Tensor random_tensor(Shape shape, SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

// Independent reference: plain i-j-l triple loop.
Tensor matmul_reference(const Tensor& a, const Tensor& b) {
    Tensor c(Shape{a.dim(0), b.dim(1)});
    for (std::size_t i = 0; i < a.dim(0); ++i) {
        for (std::size_t j = 0; j < b.dim(1); ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < a.dim(1); ++l) acc += a.at(i, l) * b.at(l, j);
            c.at(i, j) = acc;
        }
    }
    return c;
}

}  // namespace

TEST(Shape, RejectsZeroDims) {
    EXPECT_THROW(Shape({2, 0, 3}), std::invalid_argument);
    EXPECT_EQ(Shape({2, 3, 4}).numel(), 24u);
}

TEST(Tensor, DataLengthMustMatchShape) {
    EXPECT_THROW(Tensor(Shape{2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(Matmul, IdentityCase) {
    const Tensor a = Tensor::matrix(2, 2, {1, 2, 3, 4});
    const Tensor c = matmul(Tensor::identity(2), a);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(c[i], a[i]);
}

TEST(Matmul, DiagonalScaling) {
    const Tensor d = Tensor::matrix(2, 2, {2, 0, 0, 3});
    const Tensor x = Tensor::matrix(2, 1, {1, 1});
    const Tensor y = matmul(d, x);
    EXPECT_EQ(y.at(0, 0), 2.0);
    EXPECT_EQ(y.at(1, 0), 3.0);
}

TEST(Matmul, MatchesTripleLoopReference) {
    SplitMix64 rng(7);
    const Tensor a = random_tensor(Shape{3, 4}, rng);
    const Tensor b = random_tensor(Shape{4, 2}, rng);
    const Tensor got = matmul(a, b);
    const Tensor want = matmul_reference(a, b);
    for (std::size_t i = 0; i < got.numel(); ++i) EXPECT_DOUBLE_EQ(got[i], want[i]);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
    const Tensor a = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
    const Tensor b = Tensor::matrix(2, 2, {1, 2, 3, 4});
    try {
        matmul(a, b);
        FAIL() << "expected a dimension error";
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
        EXPECT_NE(msg.find("[2x2]"), std::string::npos) << msg;
    }
}

TEST(Matmul, AssociativityOnRandomTriples) {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 1 + rng.below(4), k = 1 + rng.below(4);
        const std::size_t n = 1 + rng.below(4), p = 1 + rng.below(4);
        const Tensor a = random_tensor(Shape{m, k}, rng);
        const Tensor b = random_tensor(Shape{k, n}, rng);
        const Tensor c = random_tensor(Shape{n, p}, rng);
        const Tensor left = matmul(matmul(a, b), c);
        const Tensor right = matmul(a, matmul(b, c));
        const double scale = std::max(1.0, max_abs(left));
        for (std::size_t i = 0; i < left.numel(); ++i) {
            EXPECT_NEAR(left[i], right[i], 1e-9 * scale);
        }
    }
}

TEST(Conv1d, IdentityKernel) {
    const Tensor y = conv1d_valid(Tensor::vector({1}), Tensor::vector({5, 6, 7}));
    ASSERT_EQ(y.numel(), 3u);
    EXPECT_EQ(y.at(0), 5.0);
    EXPECT_EQ(y.at(1), 6.0);
    EXPECT_EQ(y.at(2), 7.0);
}

TEST(Conv1d, HandSum) {
    const Tensor y = conv1d_valid(Tensor::vector({1, 1}), Tensor::vector({1, 2, 3}));
    ASSERT_EQ(y.numel(), 2u);
    EXPECT_EQ(y.at(0), 3.0);
    EXPECT_EQ(y.at(1), 5.0);
}

TEST(Conv1d, ZeroKernel) {
    const Tensor y = conv1d_valid(Tensor::vector({0, 0}), Tensor::vector({4, -1, 9}));
    for (std::size_t i = 0; i < y.numel(); ++i) EXPECT_EQ(y.at(i), 0.0);
}

TEST(Conv1d, SignalShorterThanKernelThrows) {
    EXPECT_THROW(conv1d_valid(Tensor::vector({1, 2, 3}), Tensor::vector({1, 2})),
                 std::invalid_argument);
}

TEST(Conv1d, BilinearInSignal) {
    SplitMix64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 1 + rng.below(3);
        const std::size_t n = m + rng.below(5);
        const Tensor k = random_tensor(Shape{m}, rng);
        const Tensor x = random_tensor(Shape{n}, rng);
        const Tensor y = random_tensor(Shape{n}, rng);
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        const Tensor mixed = conv1d_valid(k, add(scale(x, a), scale(y, b)));
        const Tensor split = add(scale(conv1d_valid(k, x), a), scale(conv1d_valid(k, y), b));
        for (std::size_t i = 0; i < mixed.numel(); ++i) {
            EXPECT_NEAR(mixed[i], split[i], 1e-10);
        }
    }
}

TEST(Conv1d, LinearInKernel) {
    SplitMix64 rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 1 + rng.below(3);
        const std::size_t n = m + rng.below(5);
        const Tensor k = random_tensor(Shape{m}, rng);
        const Tensor l = random_tensor(Shape{m}, rng);
        const Tensor x = random_tensor(Shape{n}, rng);
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        const Tensor mixed = conv1d_valid(add(scale(k, a), scale(l, b)), x);
        const Tensor split = add(scale(conv1d_valid(k, x), a), scale(conv1d_valid(l, x), b));
        for (std::size_t i = 0; i < mixed.numel(); ++i) {
            EXPECT_NEAR(mixed[i], split[i], 1e-10);
        }
    }
}

TEST(Elementwise, BasicValues) {
    const Tensor r = elementwise(Elementwise::Relu, Tensor::vector({-1, 0, 2}));
    EXPECT_EQ(r.at(0), 0.0);
    EXPECT_EQ(r.at(1), 0.0);
    EXPECT_EQ(r.at(2), 2.0);
    EXPECT_EQ(elementwise(Elementwise::Tanh, Tensor::vector({0})).at(0), 0.0);
    EXPECT_NEAR(elementwise(Elementwise::Sin, Tensor::vector({M_PI / 2})).at(0), 1.0, 1e-12);
}

TEST(Elementwise, ReluPositivelyHomogeneousForPowersOfTwo) {
    SplitMix64 rng(17);
    const Tensor x = random_tensor(Shape{16}, rng, -5.0, 5.0);
    for (double lambda : {0.25, 0.5, 2.0, 8.0, 1024.0}) {
        const Tensor left = elementwise(Elementwise::Relu, scale(x, lambda));
        const Tensor right = scale(elementwise(Elementwise::Relu, x), lambda);
        for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_EQ(left[i], right[i]);
    }
}
