#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsym/equivariant.hpp"
#include "wsym/tensor.hpp"
#include "wsym/weight_space.hpp"

namespace wsym {

enum class AlphaBase {
    /// x -> (x_i^2 / sum_j x_j^2), with alpha(0) = 0. Positively homogeneous
    /// of degree zero (and even), so it kills positive scalings.
    NormalizedSquares,
    /// x -> (|x_1|, ..., |x_n|). Even, so it kills sign flips.
    AbsValue,
};

/// One alpha map R^n -> R^n, optionally composed with a per-slot affine
/// head (the learnable beta): y_i = head_scale_i * base(x)_i + head_shift_i.
/// The head never touches the group part, which the base already removed.
struct AlphaMap {
    AlphaBase base = AlphaBase::NormalizedSquares;
    bool has_head = false;
    Tensor head_scale;
    Tensor head_shift;

    static AlphaMap plain(AlphaBase base) { return {base, false, {}, {}}; }
    static AlphaMap composed(AlphaBase base, Tensor scale, Tensor shift);

    Tensor operator()(const Tensor& x) const;
};

/// Is this alpha usable for the family? Positive needs positive homogeneity
/// of degree zero (NormalizedSquares); SignFlip needs evenness (both bases).
bool alpha_fits_family(const AlphaMap& alpha, LayerFamily family);

enum class PoolMode { Sum, Mean };

/// ReLU MLP head; empty layer list is the identity read-out.
struct Mlp {
    std::vector<Tensor> weights;  // [out x in] per stage
    std::vector<Tensor> biases;   // [out] per stage

    static Mlp identity() { return {}; }
    static Mlp random(int input, const std::vector<int>& hidden, int output, std::uint64_t seed);

    Tensor apply(const Tensor& x) const;
    int output_dim(int input) const;
};

/// Configuration of the invariant pipeline I = MLP . pool . alpha. The
/// alpha assignment realizes the permutation sharing pattern structurally:
/// layer 1 gets one weight alpha per column and one bias alpha; middle
/// layers one of each per layer; layer L one weight alpha per row and a
/// free bias alpha per row.
struct InvariantPipelineConfig {
    LayerFamily family = LayerFamily::Positive;
    WeightSpaceSpec spec;

    std::vector<AlphaMap> w_first;   // n0 maps on R^{w_1}
    AlphaMap b_first;                // one map on R^{b_1}
    std::vector<AlphaMap> w_mid;     // layers 2..L-1, one map on R^{w_i} each
    std::vector<AlphaMap> b_mid;     // layers 2..L-1, one map on R^{b_i} each
    std::vector<AlphaMap> w_last;    // nL maps on R^{w_L}
    std::vector<AlphaMap> b_last;    // nL maps on R^{b_L}

    PoolMode pool = PoolMode::Mean;
    Mlp mlp;

    InvariantPipelineConfig(LayerFamily family, WeightSpaceSpec spec);

    /// Family-default alphas (NormalizedSquares / AbsValue), mean pooling,
    /// and a fresh random MLP head; hidden empty plus output 0 keeps the
    /// identity read-out.
    static InvariantPipelineConfig make_default(LayerFamily family, const WeightSpaceSpec& spec,
                                                const std::vector<int>& mlp_hidden, int output_dim,
                                                std::uint64_t seed);

    void validate() const;
};

/// Entrywise alpha application, W'(i)_{jk} = alpha^{(i)}_{jk}(W^(i)_{jk})
/// and the same for biases. Scaling-invariant and permutation-equivariant.
WeightSpacePoint apply_alpha_stage(const InvariantPipelineConfig& config,
                                   const WeightSpacePoint& point);

/// Permutation-invariant pooling. Block order: layer-1 weights pooled over
/// rows (one w_1-vector per column), layer-L weights pooled over columns
/// (per row), middle weights pooled over both axes, then bias blocks:
/// b^(L) in full, b^(1)..b^(L-1) pooled over rows.
Tensor pool_stage(const InvariantPipelineConfig& config, const WeightSpacePoint& point);

/// Output length of pool_stage:
/// w1*n0 + wL*nL + sum_{1<i<L} wi + bL*nL + sum_{i<L} bi.
long long pooled_length(const WeightSpaceSpec& spec);

/// The full pipeline MLP(pool(alpha(U))).
Tensor apply_invariant(const InvariantPipelineConfig& config, const WeightSpacePoint& point);

/// Normalize-then-average pooling of a stack of weight tensors: apply
/// NormalizedSquares to every [n_i, n_{i-1}] entry, then average over both
/// channel axes, yielding one w_i-vector per layer.
std::vector<Tensor> normalize_average_pool(const std::vector<Tensor>& weights);

}  // namespace wsym
