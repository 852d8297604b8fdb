#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wsym/equivariant.hpp"
#include "wsym/invariant.hpp"
#include "wsym/network_eval.hpp"

namespace wsym {

/// A stacked functional: equivariant layers chained source-to-target, the
/// family's activation applied to every weight and bias feature entry
/// between consecutive layers, and an invariant pipeline on top. The whole
/// map is invariant to the family's symmetry subgroup by construction.
struct NfnStack {
    std::vector<EquivariantParams> layers;
    ActivationKind activation = ActivationKind::ReLU;
    InvariantPipelineConfig head;

    NfnStack(std::vector<EquivariantParams> layers_in, ActivationKind activation_in,
             InvariantPipelineConfig head_in);

    /// Stack of `depth` random equivariant layers (source -> target, then
    /// target -> target) with a default head on the target space (family
    /// alphas, mean pool, random MLP). Target feature dims above 1 keep the
    /// alpha stage informative: on scalar entries a homogeneous-degree-zero
    /// map is constant almost everywhere.
    static NfnStack make_default(LayerFamily family, const WeightSpaceSpec& source,
                                 const WeightSpaceSpec& target, int depth,
                                 const std::vector<int>& mlp_hidden, int output_dim,
                                 std::uint64_t seed);

    LayerFamily family() const { return head.family; }
    Tensor apply(const WeightSpacePoint& point) const;
    long long parameter_count() const;

    /// Visit every trainable coefficient in a fixed order (equivariant
    /// blocks, then alpha heads, then MLP weights).
    void visit_params(const std::function<void(double&)>& fn);

    void validate() const;
};

}  // namespace wsym
