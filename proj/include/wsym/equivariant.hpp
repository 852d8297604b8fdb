#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wsym/group.hpp"
#include "wsym/weight_space.hpp"

namespace wsym {

/// The two symmetry families a layer can be equivariant to: positive
/// scalings (the ReLU weight-space symmetry) or sign flips (sin / tanh).
enum class LayerFamily { Positive, SignFlip };

const char* family_name(LayerFamily family);
LayerFamily family_from_name(const std::string& name);
SubgroupKind subgroup_for(LayerFamily family);

/// Coefficients of the equivariant affine layer E : U -> U'. Source and
/// target share L and channel counts; only the per-entry feature dims may
/// differ. The storage *is* the sharing pattern: every index that the
/// equivariance constraints tie across hidden permutations is simply absent
/// from the block key, so the constraints hold by construction.
///
/// Positive family, L >= 2 (blocks mapping R^{w_s}- or R^{b_s}-entries to
/// R^{w_i'}- or R^{b_i'}-entries):
///   W'^(1)_{jk} = sum_q P1[k][q] W^(1)_{jq} + Q1[k] b^(1)_j
///   b'^(1)_j    = sum_q R1[q]   W^(1)_{jq} + S1    b^(1)_j
///   W'^(i)_{jk} = Pmid[i] W^(i)_{jk}          (1 < i < L)
///   b'^(i)_j    = Smid[i] b^(i)_j             (1 < i < L)
///   W'^(L)_{jk} = sum_p PL[j][p] W^(L)_{pk}
///   b'^(L)_j    = sum_p SL[j][p] b^(L)_p + TL[j]
///
/// SignFlip family (L >= 3) adds two cross-layer blocks, legal because
/// sign flips are their own inverses:
///   b'^(L-1)_j += sum_p RLm1[p] W^(L)_{pj}
///   W'^(L)_{jk} += QL[j] b^(L-1)_k
///
/// L == 1: both boundary groups are trivial, so the layer degenerates to an
/// unconstrained affine map on the flattened space, stored densely.
struct EquivariantParams {
    LayerFamily family = LayerFamily::Positive;
    WeightSpaceSpec source;
    WeightSpaceSpec target;

    std::vector<Tensor> p_first;  // n0*n0 blocks, (k,q) -> k*n0+q, each [w1' x w1]
    std::vector<Tensor> q_first;  // n0 blocks (k), each [w1' x b1]
    std::vector<Tensor> r_first;  // n0 blocks (q), each [b1' x w1]
    Tensor s_first;               // [b1' x b1]
    std::vector<Tensor> p_mid;    // layers 2..L-1, each [wi' x wi]
    std::vector<Tensor> s_mid;    // layers 2..L-1, each [bi' x bi]
    std::vector<Tensor> p_last;   // nL*nL blocks, (j,p) -> j*nL+p, each [wL' x wL]
    std::vector<Tensor> s_last;   // nL*nL blocks, (j,p), each [bL' x bL]
    std::vector<Tensor> t_last;   // nL blocks (j), each [bL'] vector

    std::vector<Tensor> r_taps;  // SignFlip only: nL blocks (p), each [b_{L-1}' x wL]
    std::vector<Tensor> q_taps;  // SignFlip only: nL blocks (j), each [wL' x b_{L-1}]

    Tensor dense_a;  // L == 1 only: [dimU' x dimU]
    Tensor dense_c;  // L == 1 only: [dimU']

    EquivariantParams(LayerFamily family, WeightSpaceSpec source, WeightSpaceSpec target);

    static EquivariantParams zeros(LayerFamily family, const WeightSpaceSpec& source,
                                   const WeightSpaceSpec& target);
    /// Identity map; requires target == source.
    static EquivariantParams identity(LayerFamily family, const WeightSpaceSpec& spec);
    /// Blocks i.i.d. Uniform[-1,1] scaled by 1/sqrt(block fan-in).
    static EquivariantParams random(LayerFamily family, const WeightSpaceSpec& source,
                                    const WeightSpaceSpec& target, std::uint64_t seed);

    bool is_dense() const { return source.layers() == 1; }
    long long count() const;  // total stored coefficients
    void for_each_block(const std::function<void(Tensor&)>& fn);
    void for_each_block(const std::function<void(const Tensor&)>& fn) const;
};

WeightSpacePoint apply(const EquivariantParams& params, const WeightSpacePoint& point);

/// Closed-form count of independent coefficients. Positive family:
///   w1'w1 n0^2 + w1'b1 n0 + b1'w1 n0 + b1'b1 + sum_mid (wi'wi + bi'bi)
///   + wL'wL nL^2 + bL'bL nL^2 + bL' nL
/// SignFlip adds b_{L-1}' wL nL + wL' b_{L-1} nL. For L == 1 the layer is a
/// full affine map, dimU' * (dimU + 1).
long long param_count(const WeightSpaceSpec& source, const WeightSpaceSpec& target,
                      LayerFamily family);

/// View of the full (p, q, r, s, t) coefficient tensors implied by the
/// block storage, for verifying the constraint system directly. Indices are
/// 1-based layer numbers and 0-based rows/columns, mirroring the layer map:
///   W'^(i)_{jk} = sum_{spq} p(i,j,k,s,p,q) W^(s)_{pq} + sum_{sp} q(i,j,k,s,p) b^(s)_p + tw(i,j,k)
///   b'^(i)_j    = sum_{spq} r(i,j,s,p,q)   W^(s)_{pq} + sum_{sp} s(i,j,s,p)   b^(s)_p + tb(i,j)
class DenseCoefficients {
public:
    explicit DenseCoefficients(EquivariantParams params);

    Tensor p(int i, int j, int k, int s, int pp, int q) const;  // [wi' x ws]
    Tensor q(int i, int j, int k, int s, int pp) const;         // [wi' x bs]
    Tensor r(int i, int j, int s, int pp, int q) const;         // [bi' x ws]
    Tensor s(int i, int j, int s, int pp) const;                // [bi' x bs]
    Tensor tw(int i, int j, int k) const;                       // [wi']
    Tensor tb(int i, int j) const;                              // [bi']

    const EquivariantParams& params() const { return params_; }

private:
    EquivariantParams params_;
};

DenseCoefficients materialize_dense(const EquivariantParams& params);

/// Brute-force dimension of the space of G-equivariant affine maps U -> U',
/// computed by imposing E(gU) = g E(U) for `samples` sampled group elements
/// on the full dimU' x (dimU + 1) coefficient space and counting the null
/// space (SVD, singular values below 1e-8 * sigma_max treated as zero).
/// Requires dimU * dimU' <= 20000.
long long completeness_dimension(const WeightSpaceSpec& source, const WeightSpaceSpec& target,
                                 LayerFamily family, int samples, std::uint64_t seed);

}  // namespace wsym
