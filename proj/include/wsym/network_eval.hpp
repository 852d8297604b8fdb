#pragma once

#include <cstdint>
#include <string>

#include "wsym/group.hpp"
#include "wsym/tensor.hpp"
#include "wsym/weight_space.hpp"

namespace wsym {

enum class ActivationKind { ReLU, Sin, Tanh };

const char* activation_name(ActivationKind kind);
ActivationKind activation_from_name(const std::string& name);
Elementwise elementwise_for(ActivationKind kind);

/// The subgroup that leaves networks with this activation invariant:
/// positive scaling for ReLU, sign flips for sin and tanh.
SubgroupKind matching_subgroup(ActivationKind kind);

struct NetworkKind {
    enum class Type { FCNN, CNN };
    Type type = Type::FCNN;
    /// CNN only: spatial length of each input channel.
    int input_len = 0;
    /// CNN only: whether the activation is also applied after the last
    /// convolution. Off by default; both behaviours are supported.
    bool outer_activation = false;

    static NetworkKind fcnn() { return {}; }
    static NetworkKind cnn(int input_len, bool outer_activation = false) {
        return {Type::CNN, input_len, outer_activation};
    }
};

/// FCNN: f(x) = W^(L) s(... s(W^(1) x + b^(1)) ...) + b^(L); no activation
/// after the last layer. CNN: channel j at layer i is
/// sum_k W^(i)_{jk} * signal_k + b^(i)_j (valid 1-D convolution, bias added
/// to every position); activation between layers and, if requested, after
/// the last one. Output: [n_L] for FCNN, [n_L * out_len] flattened for CNN.
Tensor forward(const WeightSpacePoint& point, const NetworkKind& kind, ActivationKind activation,
               const Tensor& x);

struct InvarianceReport {
    int trials = 0;
    double max_abs_dev = 0.0;
    double max_rel_dev = 0.0;
    int argmax_trial = -1;
};

/// Per trial: sample g from the subgroup (boundary layers identity) and a
/// probe x, then compare forward(gU) against forward(U). The relative
/// denominator is max(1, |f(x;U)|_inf). A subgroup that does not match the
/// activation is allowed; it simply reports large deviations.
InvarianceReport check_invariance(const WeightSpacePoint& point, const NetworkKind& kind,
                                  ActivationKind activation, SubgroupKind subgroup, int trials,
                                  std::uint64_t seed, double scale_lo, double scale_hi,
                                  int jobs = 1);

}  // namespace wsym
