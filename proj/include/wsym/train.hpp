#pragma once

#include <cstdint>
#include <vector>

#include "wsym/stack.hpp"

namespace wsym {

/// Toy regression task: fit the G-invariant target
/// y(U) = f(x0; U, ReLU) (FCNN forward at a fixed probe) with an NfnStack,
/// minimizing MSE by plain gradient descent on central finite differences.
struct ToyTrainConfig {
    std::vector<int> channels = {1, 2, 1};  // FCNN spec, all dims 1
    /// Feature dims of the stack's internal weight space. Values above 1
    /// keep the invariant head informative on scalar-entry inputs.
    int feature_weight_dim = 3;
    int feature_bias_dim = 3;
    int stack_depth = 1;
    std::vector<int> mlp_hidden = {8};
    double learning_rate = 0.05;
    int steps = 500;
    int train_size = 24;
    int holdout_size = 8;
    double data_scale = 1.0;
    std::uint64_t seed = 1;
    long long param_budget = 2000;
};

struct ToyTrainResult {
    long long parameter_count = 0;
    std::vector<double> losses;  // losses[0] is the initial loss
    double initial_loss = 0.0;
    double final_loss = 0.0;
    bool aborted_nonfinite = false;
    int steps_run = 0;
    /// After training: worst relative gap between predictions on held-out
    /// points and on their group-augmented duplicates.
    double holdout_aug_max_rel_dev = 0.0;
};

ToyTrainResult train_toy(const ToyTrainConfig& config);

}  // namespace wsym
