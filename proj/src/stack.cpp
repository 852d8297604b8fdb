#include "wsym/stack.hpp"

#include <stdexcept>
#include <string>

namespace wsym {

NfnStack::NfnStack(std::vector<EquivariantParams> layers_in, ActivationKind activation_in,
                   InvariantPipelineConfig head_in)
    : layers(std::move(layers_in)), activation(activation_in), head(std::move(head_in)) {
    validate();
}

NfnStack NfnStack::make_default(LayerFamily family, const WeightSpaceSpec& source,
                                const WeightSpaceSpec& target, int depth,
                                const std::vector<int>& mlp_hidden, int output_dim,
                                std::uint64_t seed) {
    std::vector<EquivariantParams> layers;
    layers.reserve(depth);
    for (int t = 0; t < depth; ++t) {
        layers.push_back(
            EquivariantParams::random(family, t == 0 ? source : target, target, seed + t));
    }
    const ActivationKind activation =
        family == LayerFamily::Positive ? ActivationKind::ReLU : ActivationKind::Tanh;
    InvariantPipelineConfig head = InvariantPipelineConfig::make_default(
        family, target, mlp_hidden, output_dim, seed + depth);
    return NfnStack(std::move(layers), activation, std::move(head));
}

void NfnStack::validate() const {
    if (layers.empty()) {
        throw std::invalid_argument("stack: needs at least one equivariant layer");
    }
    for (std::size_t t = 0; t < layers.size(); ++t) {
        if (layers[t].family != head.family) {
            throw std::invalid_argument("stack: layer " + std::to_string(t) +
                                        " family differs from the head family");
        }
        if (t + 1 < layers.size() && !(layers[t].target == layers[t + 1].source)) {
            throw std::invalid_argument("stack: layer " + std::to_string(t) +
                                        " target spec does not chain into layer " +
                                        std::to_string(t + 1));
        }
    }
    if (!(layers.back().target == head.spec)) {
        throw std::invalid_argument("stack: head spec does not match the last layer target");
    }
    const SubgroupKind expected = matching_subgroup(activation);
    if (expected != subgroup_for(head.family)) {
        throw std::invalid_argument("stack: activation does not match the family");
    }
    head.validate();
}

namespace {

WeightSpacePoint activate_point(ActivationKind activation, const WeightSpacePoint& point) {
    const Elementwise op = elementwise_for(activation);
    WeightSpacePoint out = point;
    for (Tensor& w : out.weights) w = elementwise(op, w);
    for (Tensor& b : out.biases) b = elementwise(op, b);
    return out;
}

}  // namespace

Tensor NfnStack::apply(const WeightSpacePoint& point) const {
    WeightSpacePoint current = wsym::apply(layers[0], point);
    for (std::size_t t = 1; t < layers.size(); ++t) {
        current = wsym::apply(layers[t], activate_point(activation, current));
    }
    return apply_invariant(head, current);
}

long long NfnStack::parameter_count() const {
    long long total = 0;
    for (const EquivariantParams& layer : layers) total += layer.count();
    auto count_alpha = [&total](const AlphaMap& alpha) {
        if (alpha.has_head) total += static_cast<long long>(2 * alpha.head_scale.numel());
    };
    for (const AlphaMap& a : head.w_first) count_alpha(a);
    count_alpha(head.b_first);
    for (const AlphaMap& a : head.w_mid) count_alpha(a);
    for (const AlphaMap& a : head.b_mid) count_alpha(a);
    for (const AlphaMap& a : head.w_last) count_alpha(a);
    for (const AlphaMap& a : head.b_last) count_alpha(a);
    for (const Tensor& w : head.mlp.weights) total += static_cast<long long>(w.numel());
    for (const Tensor& b : head.mlp.biases) total += static_cast<long long>(b.numel());
    return total;
}

void NfnStack::visit_params(const std::function<void(double&)>& fn) {
    for (EquivariantParams& layer : layers) {
        layer.for_each_block([&fn](Tensor& block) {
            for (double& v : block.data()) fn(v);
        });
    }
    auto visit_alpha = [&fn](AlphaMap& alpha) {
        if (!alpha.has_head) return;
        for (double& v : alpha.head_scale.data()) fn(v);
        for (double& v : alpha.head_shift.data()) fn(v);
    };
    for (AlphaMap& a : head.w_first) visit_alpha(a);
    visit_alpha(head.b_first);
    for (AlphaMap& a : head.w_mid) visit_alpha(a);
    for (AlphaMap& a : head.b_mid) visit_alpha(a);
    for (AlphaMap& a : head.w_last) visit_alpha(a);
    for (AlphaMap& a : head.b_last) visit_alpha(a);
    for (Tensor& w : head.mlp.weights) {
        for (double& v : w.data()) fn(v);
    }
    for (Tensor& b : head.mlp.biases) {
        for (double& v : b.data()) fn(v);
    }
}

}  // namespace wsym
