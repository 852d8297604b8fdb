#include "wsym/network_eval.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "wsym/rng.hpp"

using namespace wsym;

TEST(Forward, ZeroWeightsGiveFinalBias) {
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({2, 3, 2});
    WeightSpacePoint u = WeightSpacePoint::zeros(spec);
    u.biases[1].at(0, 0) = 4.0;
    u.biases[1].at(1, 0) = -2.5;
    for (ActivationKind sigma : {ActivationKind::ReLU, ActivationKind::Sin, ActivationKind::Tanh}) {
        const Tensor y = forward(u, NetworkKind::fcnn(), sigma, Tensor::vector({1, -1}));
        EXPECT_EQ(y.at(0), 4.0);
        EXPECT_EQ(y.at(1), -2.5);
    }
}

TEST(Forward, SingleLayerIsAffine) {
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({1, 1});
    WeightSpacePoint u = WeightSpacePoint::zeros(spec);
    u.weights[0].at(0, 0, 0) = 2.0;
    u.biases[0].at(0, 0) = 3.0;
    const Tensor y = forward(u, NetworkKind::fcnn(), ActivationKind::ReLU, Tensor::vector({5}));
    EXPECT_EQ(y.at(0), 13.0);
}

TEST(Forward, FcnnSingleLayerMatchesMatrixForm) {
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({3, 2});
    const WeightSpacePoint u = random_point(spec, 4, 1.0);
    SplitMix64 rng(5);
    Tensor x(Shape{3});
    for (double& v : x.data()) v = rng.uniform(-2, 2);
    const Tensor y = forward(u, NetworkKind::fcnn(), ActivationKind::Tanh, x);
    for (int j = 0; j < 2; ++j) {
        double want = u.biases[0].at(j, 0);
        for (int k = 0; k < 3; ++k) want += u.weights[0].at(j, k, 0) * x.at(k);
        EXPECT_DOUBLE_EQ(y.at(j), want);
    }
}

TEST(Forward, CnnSingleChannelMatchesConv) {
    const WeightSpaceSpec spec({1, 1}, {2}, {1});
    WeightSpacePoint u = WeightSpacePoint::zeros(spec);
    u.weights[0].at(0, 0, 0) = 1.0;
    u.weights[0].at(0, 0, 1) = 1.0;
    const Tensor x(Shape{1, 3}, {1, 2, 3});
    const Tensor y = forward(u, NetworkKind::cnn(3), ActivationKind::ReLU, x);
    ASSERT_EQ(y.numel(), 2u);
    EXPECT_EQ(y.at(0), 3.0);
    EXPECT_EQ(y.at(1), 5.0);
}

TEST(Forward, InputShapeMismatchRejected) {
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({2, 3, 2});
    const WeightSpacePoint u = random_point(spec, 2, 1.0);
    EXPECT_THROW(forward(u, NetworkKind::fcnn(), ActivationKind::ReLU, Tensor::vector({1, 2, 3})),
                 std::invalid_argument);
    const WeightSpaceSpec conv({2, 2}, {2}, {1});
    const WeightSpacePoint v = random_point(conv, 3, 1.0);
    EXPECT_THROW(forward(v, NetworkKind::cnn(5), ActivationKind::ReLU, Tensor(Shape{2, 4})),
                 std::invalid_argument);
}

TEST(Forward, CnnSignalShrinkingBelowOneThrows) {
    const WeightSpaceSpec spec({1, 1, 1}, {3, 3}, {1, 1});
    const WeightSpacePoint u = random_point(spec, 3, 1.0);
    const Tensor x(Shape{1, 4}, {1, 2, 3, 4});
    try {
        forward(u, NetworkKind::cnn(4), ActivationKind::ReLU, x);
        FAIL() << "expected a dimension error";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("layer 2"), std::string::npos) << e.what();
    }
}

TEST(Forward, OuterActivationFlag) {
    const WeightSpaceSpec spec({1, 1}, {1}, {1});
    WeightSpacePoint u = WeightSpacePoint::zeros(spec);
    u.weights[0].at(0, 0, 0) = 1.0;
    u.biases[0].at(0, 0) = -2.0;
    const Tensor x(Shape{1, 2}, {1, 1});
    const Tensor plain = forward(u, NetworkKind::cnn(2, false), ActivationKind::ReLU, x);
    const Tensor wrapped = forward(u, NetworkKind::cnn(2, true), ActivationKind::ReLU, x);
    EXPECT_EQ(plain.at(0), -1.0);
    EXPECT_EQ(wrapped.at(0), 0.0);
}

TEST(Forward, ReluHomogeneityIdentity) {
    // a * relu(W conv x + b) == relu((aW) conv x + (ab)) for a > 0,
    // exactly when a is a power of two.
    SplitMix64 rng(11);
    const Tensor w = Tensor::vector({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Tensor x = Tensor::vector({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const double b = rng.uniform(-1, 1);
    for (double a : {0.5, 2.0, 64.0}) {
        Tensor lhs = conv1d_valid(w, x);
        for (double& v : lhs.data()) v += b;
        lhs = scale(elementwise(Elementwise::Relu, lhs), a);
        Tensor rhs = conv1d_valid(scale(w, a), x);
        for (double& v : rhs.data()) v += a * b;
        rhs = elementwise(Elementwise::Relu, rhs);
        for (std::size_t i = 0; i < lhs.numel(); ++i) EXPECT_EQ(lhs[i], rhs[i]);
    }
}

TEST(CheckInvariance, MatchedPairsStayTiny) {
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({2, 4, 3, 2});
    const WeightSpacePoint u = random_point(spec, 7, 1.0);
    const InvarianceReport relu = check_invariance(u, NetworkKind::fcnn(), ActivationKind::ReLU,
                                                   SubgroupKind::Positive, 200, 1, 0.5, 2.0);
    EXPECT_LE(relu.max_rel_dev, 1e-10);

    const InvarianceReport tanh_r = check_invariance(u, NetworkKind::fcnn(), ActivationKind::Tanh,
                                                     SubgroupKind::SignFlip, 200, 2, 0.5, 2.0);
    EXPECT_LE(tanh_r.max_rel_dev, 1e-12);
}

TEST(CheckInvariance, CnnMatchedPair) {
    const WeightSpaceSpec spec({2, 3, 2}, {2, 2}, {1, 1});
    const WeightSpacePoint u = random_point(spec, 8, 1.0);
    const InvarianceReport r = check_invariance(u, NetworkKind::cnn(6), ActivationKind::ReLU,
                                                SubgroupKind::Positive, 200, 3, 0.5, 2.0);
    EXPECT_LE(r.max_rel_dev, 1e-10);
}

TEST(CheckInvariance, ConstructedNegativeControl) {
    // W1 = [1], b1 = 0, W2 = [1], x = 1: flipping the hidden sign changes
    // relu output from 1 to 0.
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({1, 1, 1});
    WeightSpacePoint u = WeightSpacePoint::zeros(spec);
    u.weights[0].at(0, 0, 0) = 1.0;
    u.weights[1].at(0, 0, 0) = 1.0;

    GroupElement g = GroupElement::identity(spec.channels);
    g.layers[1] = MonomialElement(DiagonalScaling({-1.0}), Permutation::identity(1));
    const Tensor x = Tensor::vector({1.0});
    const Tensor before = forward(u, NetworkKind::fcnn(), ActivationKind::ReLU, x);
    const Tensor after = forward(act_weights(g, u), NetworkKind::fcnn(), ActivationKind::ReLU, x);
    EXPECT_EQ(before.at(0), 1.0);
    EXPECT_EQ(after.at(0), 0.0);

    // the sampling-based checker sees it too (a -1 appears w.h.p.)
    const InvarianceReport r = check_invariance(u, NetworkKind::fcnn(), ActivationKind::ReLU,
                                                SubgroupKind::SignFlip, 40, 4, 0.5, 2.0);
    EXPECT_GT(r.max_rel_dev, 1e-3);
    EXPECT_GE(r.argmax_trial, 0);
}

TEST(CheckInvariance, ScaleRangeSweep) {
    // widening scale ranges trade tolerance linearly in hi/lo
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({2, 4, 4, 3, 2});
    const WeightSpacePoint u = random_point(spec, 17, 1.0);
    for (double hi : {10.0, 1e2, 1e4, 1e6}) {
        const InvarianceReport r = check_invariance(u, NetworkKind::fcnn(), ActivationKind::ReLU,
                                                    SubgroupKind::Positive, 250, 19, 1.0, hi);
        EXPECT_LE(r.max_rel_dev, 1e-10 * hi) << "range [1, " << hi << "]";
    }
}

TEST(CheckInvariance, LogUniformSampledScales) {
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({2, 4, 3, 2});
    const WeightSpacePoint u = random_point(spec, 23, 1.0);
    SampleOptions opts;
    opts.lo = 1.0;
    opts.hi = 1e6;
    opts.log_uniform = true;
    SplitMix64 rng(29);
    double worst = 0.0;
    for (int trial = 0; trial < 250; ++trial) {
        const GroupElement g =
            sample_group(SubgroupKind::Positive, spec.channels, rng.next(), opts);
        Tensor x(Shape{2});
        for (double& v : x.data()) v = rng.uniform(-2, 2);
        const Tensor a = forward(u, NetworkKind::fcnn(), ActivationKind::ReLU, x);
        const Tensor b = forward(act_weights(g, u), NetworkKind::fcnn(), ActivationKind::ReLU, x);
        worst = std::max(worst, max_abs(sub(a, b)) / std::max(1.0, max_abs(a)));
    }
    EXPECT_LE(worst, 1e-6);
}

TEST(CheckInvariance, ParallelMatchesSequential) {
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn({2, 3, 2});
    const WeightSpacePoint u = random_point(spec, 12, 1.0);
    const InvarianceReport seq = check_invariance(u, NetworkKind::fcnn(), ActivationKind::ReLU,
                                                  SubgroupKind::Positive, 64, 5, 0.5, 2.0, 1);
    const InvarianceReport par = check_invariance(u, NetworkKind::fcnn(), ActivationKind::ReLU,
                                                  SubgroupKind::Positive, 64, 5, 0.5, 2.0, 4);
    EXPECT_EQ(seq.max_abs_dev, par.max_abs_dev);
    EXPECT_EQ(seq.max_rel_dev, par.max_rel_dev);
    EXPECT_EQ(seq.argmax_trial, par.argmax_trial);
}
