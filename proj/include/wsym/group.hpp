#pragma once

#include <cstdint>
#include <vector>

#include "wsym/tensor.hpp"
#include "wsym/weight_space.hpp"

namespace wsym {

/// Permutation of {0..n-1}, stored as the forward image (source index ->
/// target index). The inverse image is precomputed because the action
/// formulas index through it in every hot loop.
class Permutation {
public:
    explicit Permutation(std::vector<int> image);
    static Permutation identity(int n);

    int size() const { return static_cast<int>(image_.size()); }
    int apply(int i) const { return image_[i]; }
    int apply_inv(int i) const { return inverse_[i]; }
    const std::vector<int>& image() const { return image_; }
    bool is_identity() const;

    bool operator==(const Permutation&) const = default;

private:
    std::vector<int> image_;
    std::vector<int> inverse_;
};

Permutation compose(const Permutation& a, const Permutation& b);  // (a.b)(k) = a(b(k))
Permutation inverse(const Permutation& p);

/// Invertible diagonal matrix diag(d_1,...,d_n), all entries nonzero.
struct DiagonalScaling {
    std::vector<double> d;

    explicit DiagonalScaling(std::vector<double> entries);
    static DiagonalScaling ones(int n) { return DiagonalScaling(std::vector<double>(n, 1.0)); }
    int size() const { return static_cast<int>(d.size()); }
};

/// One monomial (generalized permutation) matrix, held in factored form
/// g = D * P_pi. The matrix has exactly one nonzero per row and column:
/// entry (i, pi^{-1}(i)) equals d_i.
struct MonomialElement {
    DiagonalScaling diag;
    Permutation perm;

    MonomialElement(DiagonalScaling diag_in, Permutation perm_in);
    static MonomialElement identity(int n);

    int size() const { return perm.size(); }
    bool is_identity() const;
};

Tensor to_matrix(const MonomialElement& g);
MonomialElement compose(const MonomialElement& g1, const MonomialElement& g2);
MonomialElement inverse(const MonomialElement& g);

/// result = to_matrix(g) * x, computed in factored form.
Tensor act_vector(const MonomialElement& g, const Tensor& x);

enum class SubgroupKind { Full, Positive, SignFlip, PermOnly, Trivial };

const char* subgroup_name(SubgroupKind kind);
SubgroupKind subgroup_from_name(const std::string& name);

/// One monomial element per network layer, g = (g^(0), ..., g^(L)), with
/// g^(i) of size n_i. Layers are stored in index order 0..L.
struct GroupElement {
    std::vector<MonomialElement> layers;

    static GroupElement identity(const std::vector<int>& channels);
    bool matches(const WeightSpaceSpec& spec) const;
    bool is_identity() const;
};

GroupElement compose(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

/// Scaling spread max |d_i| / min |d_i| over every layer of g; tolerances
/// for numeric checks are scaled by this.
double condition_ratio(const GroupElement& g);

/// (gW)^(i)_{jk} = (d^(i)_j / d^(i-1)_k) * W^(i)_{pi_i^{-1}(j), pi_{i-1}^{-1}(k)}
/// (gb)^(i)_j   =  d^(i)_j * b^(i)_{pi_i^{-1}(j)}
/// The feature axis of each entry is scaled uniformly.
WeightSpacePoint act_weights(const GroupElement& g, const WeightSpacePoint& point);

struct SampleOptions {
    double lo = 0.5;
    double hi = 2.0;
    /// Force g^(0) and g^(L) to the identity; this is the symmetry subgroup
    /// that fixes network inputs and outputs.
    bool boundary_identity = true;
    /// Sample scales log-uniformly instead of uniformly on [lo, hi].
    bool log_uniform = false;
};

/// Positive: d_i ~ Uniform[lo, hi]; SignFlip: d_i ~ Uniform{-1, +1};
/// PermOnly: d = 1; Full: random sign times Uniform[lo, hi]; Trivial:
/// identity. Permutations uniform except where forced to identity.
GroupElement sample_group(SubgroupKind kind, const std::vector<int>& channels, std::uint64_t seed,
                          const SampleOptions& options = {});

}  // namespace wsym
