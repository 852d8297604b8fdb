#include "wsym/train.hpp"

#include <cmath>
#include <stdexcept>

#include "wsym/network_eval.hpp"
#include "wsym/rng.hpp"

namespace wsym {

namespace {

double mse(const NfnStack& stack, const std::vector<WeightSpacePoint>& points,
           const std::vector<double>& targets) {
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double pred = stack.apply(points[i]).at(0);
        const double err = pred - targets[i];
        acc += err * err;
    }
    return acc / static_cast<double>(points.size());
}

std::vector<double> collect_params(NfnStack& stack) {
    std::vector<double> theta;
    stack.visit_params([&theta](double& v) { theta.push_back(v); });
    return theta;
}

void load_params(NfnStack& stack, const std::vector<double>& theta) {
    std::size_t pos = 0;
    stack.visit_params([&theta, &pos](double& v) { v = theta[pos++]; });
}

}  // namespace

ToyTrainResult train_toy(const ToyTrainConfig& config) {
    const WeightSpaceSpec spec = WeightSpaceSpec::fcnn(config.channels);
    const std::size_t L = config.channels.size() - 1;
    const WeightSpaceSpec feature_spec(config.channels,
                                       std::vector<int>(L, config.feature_weight_dim),
                                       std::vector<int>(L, config.feature_bias_dim));
    NfnStack stack = NfnStack::make_default(LayerFamily::Positive, spec, feature_spec,
                                            config.stack_depth, config.mlp_hidden, 1, config.seed);
    ToyTrainResult result;
    result.parameter_count = stack.parameter_count();
    if (result.parameter_count > config.param_budget) {
        throw std::invalid_argument("train_toy: parameter budget exceeded, " +
                                    std::to_string(result.parameter_count) + " > " +
                                    std::to_string(config.param_budget));
    }

    // Synthetic dataset: random points U with the invariant target
    // y(U) = f(x0; U, ReLU) at one fixed probe x0.
    SplitMix64 rng(config.seed ^ 0x746F79ULL);
    Tensor probe(Shape{static_cast<std::size_t>(spec.channels[0])});
    for (double& v : probe.data()) v = rng.uniform(-1.0, 1.0);
    auto target_of = [&](const WeightSpacePoint& point) {
        return forward(point, NetworkKind::fcnn(), ActivationKind::ReLU, probe).at(0);
    };

    std::vector<WeightSpacePoint> train_points, holdout_points;
    std::vector<double> train_targets;
    for (int i = 0; i < config.train_size; ++i) {
        train_points.push_back(random_point(spec, rng.next(), config.data_scale));
        train_targets.push_back(target_of(train_points.back()));
    }
    for (int i = 0; i < config.holdout_size; ++i) {
        holdout_points.push_back(random_point(spec, rng.next(), config.data_scale));
    }

    std::vector<double> theta = collect_params(stack);
    std::vector<double> grad(theta.size(), 0.0);

    double loss = mse(stack, train_points, train_targets);
    result.initial_loss = loss;
    result.losses.push_back(loss);

    std::vector<double> last_good = theta;
    for (int step = 0; step < config.steps; ++step) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            const double h = 1e-4 * (1.0 + std::fabs(saved));
            theta[i] = saved + h;
            load_params(stack, theta);
            const double plus = mse(stack, train_points, train_targets);
            theta[i] = saved - h;
            load_params(stack, theta);
            const double minus = mse(stack, train_points, train_targets);
            theta[i] = saved;
            grad[i] = (plus - minus) / (2.0 * h);
        }
        for (std::size_t i = 0; i < theta.size(); ++i) {
            theta[i] -= config.learning_rate * grad[i];
        }
        load_params(stack, theta);
        loss = mse(stack, train_points, train_targets);
        if (!std::isfinite(loss)) {
            result.aborted_nonfinite = true;
            theta = last_good;
            load_params(stack, theta);
            loss = result.losses.back();
            break;
        }
        last_good = theta;
        result.losses.push_back(loss);
        ++result.steps_run;
    }
    result.final_loss = result.losses.back();

    // Predictions must agree on group-augmented duplicates of held-out points.
    SampleOptions opts;
    opts.lo = 0.5;
    opts.hi = 2.0;
    for (std::size_t i = 0; i < holdout_points.size(); ++i) {
        const GroupElement g = sample_group(subgroup_for(stack.family()), spec.channels,
                                            rng.next(), opts);
        const double plain = stack.apply(holdout_points[i]).at(0);
        const double augmented = stack.apply(act_weights(g, holdout_points[i])).at(0);
        const double rel = std::fabs(augmented - plain) / std::max(1.0, std::fabs(plain));
        result.holdout_aug_max_rel_dev = std::max(result.holdout_aug_max_rel_dev, rel);
    }
    return result;
}

}  // namespace wsym
