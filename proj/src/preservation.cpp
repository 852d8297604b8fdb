#include "wsym/preservation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wsym/rng.hpp"

namespace wsym {

namespace {

double probe_deviation(const Tensor& a, Elementwise op, const Tensor& x) {
    const Tensor lhs = elementwise(op, matvec(a, x));
    const Tensor rhs = matvec(a, elementwise(op, x));
    return max_abs(sub(lhs, rhs));
}

}  // namespace

PreservationVerdict is_preserved(const Tensor& a, ActivationKind activation, int trials,
                                 std::uint64_t seed) {
    if (a.rank() != 2 || a.dim(0) != a.dim(1)) {
        throw std::invalid_argument("is_preserved: matrix must be square, got " +
                                    a.shape().str());
    }
    const std::size_t n = a.dim(0);
    if (n > 16) {
        throw std::invalid_argument("is_preserved: checker scale is n <= 16");
    }
    const Elementwise op = elementwise_for(activation);
    const double tol = 1e-9 * max_abs(a);

    std::vector<Tensor> probes;
    for (std::size_t j = 0; j < n; ++j) {
        Tensor e(Shape{n});
        e.at(j) = 1.0;
        probes.push_back(e);
        e.at(j) = -1.0;
        probes.push_back(e);
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (j == k) continue;
            for (double t : {1.0, 10.0, 100.0}) {
                Tensor x(Shape{n});
                x.at(j) = t;
                x.at(k) = -1.0;
                probes.push_back(std::move(x));
            }
        }
    }
    SplitMix64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        Tensor x(Shape{n});
        for (double& v : x.data()) v = rng.uniform(-10.0, 10.0);
        probes.push_back(std::move(x));
    }

    PreservationVerdict verdict;
    for (const Tensor& x : probes) {
        const double dev = probe_deviation(a, op, x);
        if (dev > tol) {
            verdict.preserved = false;
            verdict.witness = PreservationVerdict::Witness{a, x, dev};
            return verdict;
        }
    }
    return verdict;
}

MonomialClassification classify_monomial(const Tensor& a) {
    if (a.rank() != 2 || a.dim(0) != a.dim(1)) {
        throw std::invalid_argument("classify_monomial: matrix must be square, got " +
                                    a.shape().str());
    }
    const std::size_t n = a.dim(0);
    std::vector<int> col_hits(n, 0);
    std::vector<double> entries;
    bool diagonal_identity = true;
    for (std::size_t i = 0; i < n; ++i) {
        int row_hits = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = a.at(i, j);
            if (v != 0.0) {
                ++row_hits;
                ++col_hits[j];
                entries.push_back(v);
                if (i != j || v != 1.0) diagonal_identity = false;
            }
        }
        if (row_hits != 1) return {};
    }
    for (int c : col_hits) {
        if (c != 1) return {};
    }

    MonomialClassification out;
    out.monomial = true;
    if (diagonal_identity) {
        out.kind = SubgroupKind::Trivial;
        return out;
    }
    bool all_one = true, all_positive = true, all_unit = true;
    for (double v : entries) {
        if (v != 1.0) all_one = false;
        if (!(v > 0.0)) all_positive = false;
        if (v != 1.0 && v != -1.0) all_unit = false;
    }
    if (all_one) {
        out.kind = SubgroupKind::PermOnly;
    } else if (all_positive) {
        out.kind = SubgroupKind::Positive;
    } else if (all_unit) {
        out.kind = SubgroupKind::SignFlip;
    } else {
        out.kind = SubgroupKind::Full;
    }
    return out;
}

}  // namespace wsym
