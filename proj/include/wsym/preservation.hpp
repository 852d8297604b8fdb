#pragma once

#include <cstdint>
#include <optional>

#include "wsym/group.hpp"
#include "wsym/network_eval.hpp"
#include "wsym/tensor.hpp"

namespace wsym {

/// Outcome of the commutation check s(Ax) = A s(x). When the matrix is not
/// preserved, the verdict carries a witness probe whose deviation can be
/// re-evaluated independently.
struct PreservationVerdict {
    struct Witness {
        Tensor matrix;
        Tensor x;
        double deviation = 0.0;
    };
    bool preserved = true;
    std::optional<Witness> witness;
};

/// Sampling-based decision procedure for "A is preserved by the activation".
/// Probes combine `trials` random vectors in [-10,10]^n with the structured
/// family that separates non-members: unit vectors e_j, -e_j, and the
/// two-coordinate probes t*e_j - e_k for t in {1, 10, 100}. Deviations are
/// accepted up to 1e-9 * max|A|. This decides over a finite probe set; it
/// is not a proof of the "for all x" quantifier.
PreservationVerdict is_preserved(const Tensor& a, ActivationKind activation, int trials,
                                 std::uint64_t seed);

struct MonomialClassification {
    bool monomial = false;
    /// Most specific subgroup the nonzero entries satisfy: Trivial
    /// (identity), PermOnly (all ones), Positive, SignFlip, else Full.
    SubgroupKind kind = SubgroupKind::Full;
};

/// Exact structural read-off: one nonzero per row and per column, zero
/// meaning |entry| == 0.
MonomialClassification classify_monomial(const Tensor& a);

}  // namespace wsym
