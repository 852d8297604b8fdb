#include "wsym/group.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wsym/rng.hpp"

namespace wsym {

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
    const int n = static_cast<int>(image_.size());
    inverse_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        const int t = image_[i];
        if (t < 0 || t >= n || inverse_[t] != -1) {
            throw std::invalid_argument("Permutation: image is not a bijection of 0.." +
                                        std::to_string(n - 1));
        }
        inverse_[t] = i;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> image(n);
    for (int i = 0; i < n; ++i) image[i] = i;
    return Permutation(std::move(image));
}

bool Permutation::is_identity() const {
    for (int i = 0; i < size(); ++i) {
        if (image_[i] != i) return false;
    }
    return true;
}

Permutation compose(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("Permutation compose: sizes differ");
    }
    std::vector<int> image(a.size());
    for (int i = 0; i < a.size(); ++i) image[i] = a.apply(b.apply(i));
    return Permutation(std::move(image));
}

Permutation inverse(const Permutation& p) {
    std::vector<int> image(p.size());
    for (int i = 0; i < p.size(); ++i) image[i] = p.apply_inv(i);
    return Permutation(std::move(image));
}

DiagonalScaling::DiagonalScaling(std::vector<double> entries) : d(std::move(entries)) {
    for (double v : d) {
        if (v == 0.0 || !std::isfinite(v)) {
            throw std::invalid_argument("DiagonalScaling: entries must be finite and nonzero");
        }
    }
}

MonomialElement::MonomialElement(DiagonalScaling diag_in, Permutation perm_in)
    : diag(std::move(diag_in)), perm(std::move(perm_in)) {
    if (diag.size() != perm.size()) {
        throw std::invalid_argument("MonomialElement: diagonal size " +
                                    std::to_string(diag.size()) + " vs permutation size " +
                                    std::to_string(perm.size()));
    }
}

MonomialElement MonomialElement::identity(int n) {
    return MonomialElement(DiagonalScaling::ones(n), Permutation::identity(n));
}

bool MonomialElement::is_identity() const {
    if (!perm.is_identity()) return false;
    for (double v : diag.d) {
        if (v != 1.0) return false;
    }
    return true;
}

Tensor to_matrix(const MonomialElement& g) {
    const int n = g.size();
    Tensor m(Shape{static_cast<std::size_t>(n), static_cast<std::size_t>(n)});
    for (int i = 0; i < n; ++i) {
        m.at(i, g.perm.apply_inv(i)) = g.diag.d[i];
    }
    return m;
}

// (D1 P1)(D2 P2) = (D1 * P1 D2 P1^{-1}) (P1 P2), and P1 D2 P1^{-1} has
// diagonal d2_{pi1^{-1}(i)}.
MonomialElement compose(const MonomialElement& g1, const MonomialElement& g2) {
    if (g1.size() != g2.size()) {
        throw std::invalid_argument("MonomialElement compose: sizes differ");
    }
    const int n = g1.size();
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
        d[i] = g1.diag.d[i] * g2.diag.d[g1.perm.apply_inv(i)];
    }
    return MonomialElement(DiagonalScaling(std::move(d)), compose(g1.perm, g2.perm));
}

// (DP)^{-1} = diag(1/d_{pi(i)}) * P_{pi^{-1}}.
MonomialElement inverse(const MonomialElement& g) {
    const int n = g.size();
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = 1.0 / g.diag.d[g.perm.apply(i)];
    return MonomialElement(DiagonalScaling(std::move(d)), inverse(g.perm));
}

Tensor act_vector(const MonomialElement& g, const Tensor& x) {
    if (x.rank() != 1 || static_cast<int>(x.dim(0)) != g.size()) {
        throw std::invalid_argument("act_vector: vector shape " + x.shape().str() +
                                    " does not match element size " + std::to_string(g.size()));
    }
    Tensor y(Shape{x.dim(0)});
    for (int i = 0; i < g.size(); ++i) {
        y.at(i) = g.diag.d[i] * x.at(g.perm.apply_inv(i));
    }
    return y;
}

const char* subgroup_name(SubgroupKind kind) {
    switch (kind) {
        case SubgroupKind::Full: return "full";
        case SubgroupKind::Positive: return "positive";
        case SubgroupKind::SignFlip: return "signflip";
        case SubgroupKind::PermOnly: return "permonly";
        case SubgroupKind::Trivial: return "trivial";
    }
    return "?";
}

SubgroupKind subgroup_from_name(const std::string& name) {
    if (name == "full") return SubgroupKind::Full;
    if (name == "positive") return SubgroupKind::Positive;
    if (name == "signflip") return SubgroupKind::SignFlip;
    if (name == "permonly") return SubgroupKind::PermOnly;
    if (name == "trivial") return SubgroupKind::Trivial;
    throw std::invalid_argument("unknown subgroup '" + name + "'");
}

GroupElement GroupElement::identity(const std::vector<int>& channels) {
    GroupElement g;
    g.layers.reserve(channels.size());
    for (int n : channels) g.layers.push_back(MonomialElement::identity(n));
    return g;
}

bool GroupElement::matches(const WeightSpaceSpec& spec) const {
    if (layers.size() != spec.channels.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].size() != spec.channels[i]) return false;
    }
    return true;
}

bool GroupElement::is_identity() const {
    return std::all_of(layers.begin(), layers.end(),
                       [](const MonomialElement& g) { return g.is_identity(); });
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
    if (g.layers.size() != h.layers.size()) {
        throw std::invalid_argument("GroupElement compose: layer counts differ");
    }
    GroupElement out;
    out.layers.reserve(g.layers.size());
    for (std::size_t i = 0; i < g.layers.size(); ++i) {
        out.layers.push_back(compose(g.layers[i], h.layers[i]));
    }
    return out;
}

GroupElement inverse(const GroupElement& g) {
    GroupElement out;
    out.layers.reserve(g.layers.size());
    for (const MonomialElement& layer : g.layers) out.layers.push_back(inverse(layer));
    return out;
}

double condition_ratio(const GroupElement& g) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const MonomialElement& layer : g.layers) {
        for (double v : layer.diag.d) {
            lo = std::min(lo, std::fabs(v));
            hi = std::max(hi, std::fabs(v));
        }
    }
    return hi / lo;
}

WeightSpacePoint act_weights(const GroupElement& g, const WeightSpacePoint& point) {
    const WeightSpaceSpec& spec = point.spec;
    if (!g.matches(spec)) {
        throw std::invalid_argument("act_weights: group element does not match spec channels");
    }
    WeightSpacePoint out = WeightSpacePoint::zeros(spec);
    for (int i = 1; i <= spec.layers(); ++i) {
        const MonomialElement& gi = g.layers[i];
        const MonomialElement& gprev = g.layers[i - 1];
        const Tensor& w = point.weights[i - 1];
        const Tensor& b = point.biases[i - 1];
        Tensor& wout = out.weights[i - 1];
        Tensor& bout = out.biases[i - 1];
        const std::size_t rows = w.dim(0), cols = w.dim(1), feat = w.dim(2);
        for (std::size_t j = 0; j < rows; ++j) {
            const std::size_t js = gi.perm.apply_inv(static_cast<int>(j));
            for (std::size_t k = 0; k < cols; ++k) {
                const std::size_t ks = gprev.perm.apply_inv(static_cast<int>(k));
                const double factor = gi.diag.d[j] / gprev.diag.d[k];
                for (std::size_t f = 0; f < feat; ++f) {
                    wout.at(j, k, f) = factor * w.at(js, ks, f);
                }
            }
        }
        const std::size_t bfeat = b.dim(1);
        for (std::size_t j = 0; j < rows; ++j) {
            const std::size_t js = gi.perm.apply_inv(static_cast<int>(j));
            for (std::size_t f = 0; f < bfeat; ++f) {
                bout.at(j, f) = gi.diag.d[j] * b.at(js, f);
            }
        }
    }
    return out;
}

GroupElement sample_group(SubgroupKind kind, const std::vector<int>& channels, std::uint64_t seed,
                          const SampleOptions& options) {
    if (kind == SubgroupKind::Positive || kind == SubgroupKind::Full) {
        if (!(0.0 < options.lo && options.lo <= options.hi)) {
            throw std::invalid_argument("sample_group: need 0 < lo <= hi for scale sampling");
        }
    }
    SplitMix64 rng(seed);
    GroupElement g;
    const int L = static_cast<int>(channels.size()) - 1;
    for (int i = 0; i <= L; ++i) {
        const int n = channels[i];
        const bool boundary = options.boundary_identity && (i == 0 || i == L);
        if (boundary || kind == SubgroupKind::Trivial) {
            g.layers.push_back(MonomialElement::identity(n));
            continue;
        }
        std::vector<double> d(n, 1.0);
        switch (kind) {
            case SubgroupKind::Positive:
                for (double& v : d) {
                    v = options.log_uniform
                            ? std::exp(rng.uniform(std::log(options.lo), std::log(options.hi)))
                            : rng.uniform(options.lo, options.hi);
                }
                break;
            case SubgroupKind::Full:
                for (double& v : d) {
                    const double mag =
                        options.log_uniform
                            ? std::exp(rng.uniform(std::log(options.lo), std::log(options.hi)))
                            : rng.uniform(options.lo, options.hi);
                    v = rng.pick_sign() * mag;
                }
                break;
            case SubgroupKind::SignFlip:
                for (double& v : d) v = rng.pick_sign();
                break;
            case SubgroupKind::PermOnly:
                break;
            case SubgroupKind::Trivial:
                break;  // handled above
        }
        g.layers.push_back(
            MonomialElement(DiagonalScaling(std::move(d)), Permutation(random_permutation(n, rng))));
    }
    return g;
}

}  // namespace wsym
