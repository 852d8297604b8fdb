#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>
#include <string>

#include "wsym/equivariant.hpp"
#include "wsym/rng.hpp"

namespace wsym {

namespace {

/// Matrix of U -> gU in the flatten() basis. The action is linear in U for
/// a fixed g, so columns are the images of basis vectors.
Eigen::MatrixXd action_matrix(const WeightSpaceSpec& spec, const GroupElement& g) {
    const auto dim = static_cast<Eigen::Index>(spec.dimension());
    Eigen::MatrixXd m(dim, dim);
    std::vector<double> basis(static_cast<std::size_t>(dim), 0.0);
    for (Eigen::Index e = 0; e < dim; ++e) {
        basis[static_cast<std::size_t>(e)] = 1.0;
        const std::vector<double> image = flatten(act_weights(g, unflatten(spec, basis)));
        for (Eigen::Index r = 0; r < dim; ++r) m(r, e) = image[static_cast<std::size_t>(r)];
        basis[static_cast<std::size_t>(e)] = 0.0;
    }
    return m;
}

}  // namespace

long long completeness_dimension(const WeightSpaceSpec& source, const WeightSpaceSpec& target,
                                 LayerFamily family, int samples, std::uint64_t seed) {
    if (source.channels != target.channels) {
        throw std::invalid_argument("completeness: source and target must share channel counts");
    }
    if (family == LayerFamily::SignFlip && source.layers() < 3) {
        throw std::invalid_argument("completeness: the sign-flip family needs L >= 3");
    }
    const long long dim_u = source.dimension();
    const long long dim_v = target.dimension();
    if (dim_u * dim_v > 20000) {
        throw std::invalid_argument("completeness: dimU * dimU' = " +
                                    std::to_string(dim_u * dim_v) +
                                    " exceeds the brute-force scale limit 20000");
    }
    if (samples < 1) {
        throw std::invalid_argument("completeness: need at least one sampled group element");
    }

    const auto du = static_cast<Eigen::Index>(dim_u);
    const auto dv = static_cast<Eigen::Index>(dim_v);
    const Eigen::Index n_unknowns = dv * du + dv;  // vec(A) row-major, then c
    const Eigen::Index rows_per_sample = dv * du + dv;

    // Null space of the accumulated constraints, refined one sample at a
    // time: basis columns span the maps equivariant to every g seen so far.
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n_unknowns, n_unknowns);

    SplitMix64 rng(seed);
    SampleOptions opts;  // moderate scales keep the constraints well conditioned
    opts.lo = 0.5;
    opts.hi = 2.0;
    const SubgroupKind kind = subgroup_for(family);

    for (int s = 0; s < samples && basis.cols() > 0; ++s) {
        const GroupElement g = sample_group(kind, source.channels, rng.next(), opts);
        const Eigen::MatrixXd mg = action_matrix(source, g);
        const Eigen::MatrixXd mg_target = action_matrix(target, g);

        Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(rows_per_sample, n_unknowns);
        // A * Mg - Mg' * A = 0, row (r, c) of the residual
        for (Eigen::Index r = 0; r < dv; ++r) {
            for (Eigen::Index c = 0; c < du; ++c) {
                const Eigen::Index row = r * du + c;
                for (Eigen::Index t = 0; t < du; ++t) constraints(row, r * du + t) += mg(t, c);
                for (Eigen::Index t = 0; t < dv; ++t) {
                    constraints(row, t * du + c) -= mg_target(r, t);
                }
            }
        }
        // (Mg' - I) c = 0
        for (Eigen::Index r = 0; r < dv; ++r) {
            const Eigen::Index row = dv * du + r;
            for (Eigen::Index t = 0; t < dv; ++t) {
                constraints(row, dv * du + t) += mg_target(r, t) - (r == t ? 1.0 : 0.0);
            }
        }

        const Eigen::MatrixXd reduced = constraints * basis;
        // JacobiSVD: slower than the divide-and-conquer SVD but dependable
        // on these rank-deficient stacked constraint matrices.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
        // Scale the cutoff by the constraint matrix itself, not only by the
        // reduced product: when the basis already satisfies this sample the
        // product is pure rounding noise and must count as rank zero.
        const double scale = std::max(sigma_max, constraints.cwiseAbs().maxCoeff());
        const double cutoff = 1e-8 * scale;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff && sv(i) > 0.0) ++rank;
        }
        const Eigen::Index nullity = basis.cols() - rank;
        basis = basis * svd.matrixV().rightCols(nullity);
    }
    return static_cast<long long>(basis.cols());
}

}  // namespace wsym
