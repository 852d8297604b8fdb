#include "wsym/invariant.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wsym/rng.hpp"

namespace wsym {

AlphaMap AlphaMap::composed(AlphaBase base, Tensor scale, Tensor shift) {
    if (!(scale.shape() == shift.shape()) || scale.rank() != 1) {
        throw std::invalid_argument("AlphaMap: head scale/shift must be equal-length vectors");
    }
    return {base, true, std::move(scale), std::move(shift)};
}

Tensor AlphaMap::operator()(const Tensor& x) const {
    Tensor y(x.shape());
    switch (base) {
        case AlphaBase::NormalizedSquares: {
            double denom = 0.0;
            for (double v : x.data()) denom += v * v;
            if (denom != 0.0) {
                for (std::size_t i = 0; i < x.numel(); ++i) y[i] = x[i] * x[i] / denom;
            }
            break;
        }
        case AlphaBase::AbsValue:
            for (std::size_t i = 0; i < x.numel(); ++i) y[i] = std::fabs(x[i]);
            break;
    }
    if (has_head) {
        if (head_scale.numel() != y.numel()) {
            throw std::invalid_argument("AlphaMap: head length " +
                                        std::to_string(head_scale.numel()) +
                                        " does not match entry length " +
                                        std::to_string(y.numel()));
        }
        for (std::size_t i = 0; i < y.numel(); ++i) {
            y[i] = head_scale[i] * y[i] + head_shift[i];
        }
    }
    return y;
}

bool alpha_fits_family(const AlphaMap& alpha, LayerFamily family) {
    if (family == LayerFamily::Positive) return alpha.base == AlphaBase::NormalizedSquares;
    return true;  // both bases are even
}

Mlp Mlp::random(int input, const std::vector<int>& hidden, int output, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Mlp mlp;
    int in = input;
    std::vector<int> dims = hidden;
    dims.push_back(output);
    for (int out : dims) {
        const double bound = std::sqrt(1.0 / in);
        Tensor w(Shape{static_cast<std::size_t>(out), static_cast<std::size_t>(in)});
        for (double& v : w.data()) v = rng.uniform(-bound, bound);
        Tensor b(Shape{static_cast<std::size_t>(out)});
        for (double& v : b.data()) v = rng.uniform(-bound, bound);
        mlp.weights.push_back(std::move(w));
        mlp.biases.push_back(std::move(b));
        in = out;
    }
    return mlp;
}

Tensor Mlp::apply(const Tensor& x) const {
    Tensor signal = x;
    for (std::size_t stage = 0; stage < weights.size(); ++stage) {
        signal = add(matvec(weights[stage], signal), biases[stage]);
        if (stage + 1 < weights.size()) signal = elementwise(Elementwise::Relu, signal);
    }
    return signal;
}

int Mlp::output_dim(int input) const {
    return weights.empty() ? input : static_cast<int>(weights.back().dim(0));
}

InvariantPipelineConfig::InvariantPipelineConfig(LayerFamily family_in, WeightSpaceSpec spec_in)
    : family(family_in), spec(std::move(spec_in)) {
    if (spec.layers() < 2) {
        throw std::invalid_argument(
            "invariant pipeline: needs L >= 2 (a single layer is first and last at once)");
    }
    const AlphaBase base =
        family == LayerFamily::Positive ? AlphaBase::NormalizedSquares : AlphaBase::AbsValue;
    const int L = spec.layers();
    w_first.assign(spec.channels[0], AlphaMap::plain(base));
    b_first = AlphaMap::plain(base);
    w_mid.assign(L >= 2 ? L - 2 : 0, AlphaMap::plain(base));
    b_mid.assign(L >= 2 ? L - 2 : 0, AlphaMap::plain(base));
    w_last.assign(spec.channels[L], AlphaMap::plain(base));
    b_last.assign(spec.channels[L], AlphaMap::plain(base));
}

InvariantPipelineConfig InvariantPipelineConfig::make_default(LayerFamily family,
                                                              const WeightSpaceSpec& spec,
                                                              const std::vector<int>& mlp_hidden,
                                                              int output_dim, std::uint64_t seed) {
    InvariantPipelineConfig config(family, spec);
    if (output_dim > 0) {
        config.mlp = Mlp::random(static_cast<int>(pooled_length(spec)), mlp_hidden, output_dim,
                                 seed);
    }
    return config;
}

void InvariantPipelineConfig::validate() const {
    const int L = spec.layers();
    if (static_cast<int>(w_first.size()) != spec.channels[0] ||
        static_cast<int>(w_last.size()) != spec.channels[L] ||
        static_cast<int>(b_last.size()) != spec.channels[L] ||
        static_cast<int>(w_mid.size()) != L - 2 || static_cast<int>(b_mid.size()) != L - 2) {
        throw std::invalid_argument("invariant pipeline: alpha assignment does not match spec");
    }
    auto check = [this](const AlphaMap& alpha) {
        if (!alpha_fits_family(alpha, family)) {
            throw std::invalid_argument(
                "invariant pipeline: alpha base does not fit the family (Positive needs "
                "NormalizedSquares)");
        }
    };
    for (const AlphaMap& a : w_first) check(a);
    check(b_first);
    for (const AlphaMap& a : w_mid) check(a);
    for (const AlphaMap& a : b_mid) check(a);
    for (const AlphaMap& a : w_last) check(a);
    for (const AlphaMap& a : b_last) check(a);
}

namespace {

Tensor entry_slice(const Tensor& w, std::size_t j, std::size_t k) {
    Tensor e(Shape{w.dim(2)});
    for (std::size_t f = 0; f < w.dim(2); ++f) e.at(f) = w.at(j, k, f);
    return e;
}

Tensor bias_slice(const Tensor& b, std::size_t j) {
    Tensor e(Shape{b.dim(1)});
    for (std::size_t f = 0; f < b.dim(1); ++f) e.at(f) = b.at(j, f);
    return e;
}

}  // namespace

WeightSpacePoint apply_alpha_stage(const InvariantPipelineConfig& config,
                                   const WeightSpacePoint& point) {
    point.validate();
    if (!(point.spec == config.spec)) {
        throw std::invalid_argument("invariant pipeline: point does not conform to config spec");
    }
    config.validate();
    const int L = config.spec.layers();
    WeightSpacePoint out = point;
    for (int i = 1; i <= L; ++i) {
        const Tensor& w = point.weights[i - 1];
        Tensor& wo = out.weights[i - 1];
        for (std::size_t j = 0; j < w.dim(0); ++j) {
            for (std::size_t k = 0; k < w.dim(1); ++k) {
                const AlphaMap& alpha = i == 1   ? config.w_first[k]
                                        : i == L ? config.w_last[j]
                                                 : config.w_mid[i - 2];
                const Tensor mapped = alpha(entry_slice(w, j, k));
                for (std::size_t f = 0; f < w.dim(2); ++f) wo.at(j, k, f) = mapped.at(f);
            }
        }
        const Tensor& b = point.biases[i - 1];
        Tensor& bo = out.biases[i - 1];
        for (std::size_t j = 0; j < b.dim(0); ++j) {
            const AlphaMap& alpha = i == L   ? config.b_last[j]
                                    : i == 1 ? config.b_first
                                             : config.b_mid[i - 2];
            const Tensor mapped = alpha(bias_slice(b, j));
            for (std::size_t f = 0; f < b.dim(1); ++f) bo.at(j, f) = mapped.at(f);
        }
    }
    return out;
}

long long pooled_length(const WeightSpaceSpec& spec) {
    const int L = spec.layers();
    long long total = static_cast<long long>(spec.weight_dims[0]) * spec.channels[0];
    total += static_cast<long long>(spec.weight_dims[L - 1]) * spec.channels[L];
    for (int i = 2; i <= L - 1; ++i) total += spec.weight_dims[i - 1];
    total += static_cast<long long>(spec.bias_dims[L - 1]) * spec.channels[L];
    for (int i = 1; i <= L - 1; ++i) total += spec.bias_dims[i - 1];
    return total;
}

Tensor pool_stage(const InvariantPipelineConfig& config, const WeightSpacePoint& point) {
    if (!(point.spec == config.spec)) {
        throw std::invalid_argument("invariant pipeline: point does not conform to config spec");
    }
    const WeightSpaceSpec& spec = config.spec;
    const int L = spec.layers();
    Tensor out(Shape{static_cast<std::size_t>(pooled_length(spec))});
    std::size_t pos = 0;
    const bool mean = config.pool == PoolMode::Mean;

    // layer-1 weights, pooled over rows: one w_1-vector per column k
    {
        const Tensor& w = point.weights[0];
        for (std::size_t k = 0; k < w.dim(1); ++k) {
            for (std::size_t f = 0; f < w.dim(2); ++f) {
                double acc = 0.0;
                for (std::size_t j = 0; j < w.dim(0); ++j) acc += w.at(j, k, f);
                out.at(pos++) = mean ? acc / static_cast<double>(w.dim(0)) : acc;
            }
        }
    }
    // layer-L weights, pooled over columns: one w_L-vector per row j
    {
        const Tensor& w = point.weights[L - 1];
        for (std::size_t j = 0; j < w.dim(0); ++j) {
            for (std::size_t f = 0; f < w.dim(2); ++f) {
                double acc = 0.0;
                for (std::size_t k = 0; k < w.dim(1); ++k) acc += w.at(j, k, f);
                out.at(pos++) = mean ? acc / static_cast<double>(w.dim(1)) : acc;
            }
        }
    }
    // middle weights, pooled over both axes
    for (int i = 2; i <= L - 1; ++i) {
        const Tensor& w = point.weights[i - 1];
        const double slots = static_cast<double>(w.dim(0) * w.dim(1));
        for (std::size_t f = 0; f < w.dim(2); ++f) {
            double acc = 0.0;
            for (std::size_t j = 0; j < w.dim(0); ++j) {
                for (std::size_t k = 0; k < w.dim(1); ++k) acc += w.at(j, k, f);
            }
            out.at(pos++) = mean ? acc / slots : acc;
        }
    }
    // layer-L bias, in full
    {
        const Tensor& b = point.biases[L - 1];
        for (std::size_t j = 0; j < b.dim(0); ++j) {
            for (std::size_t f = 0; f < b.dim(1); ++f) out.at(pos++) = b.at(j, f);
        }
    }
    // remaining biases, pooled over rows
    for (int i = 1; i <= L - 1; ++i) {
        const Tensor& b = point.biases[i - 1];
        for (std::size_t f = 0; f < b.dim(1); ++f) {
            double acc = 0.0;
            for (std::size_t j = 0; j < b.dim(0); ++j) acc += b.at(j, f);
            out.at(pos++) = mean ? acc / static_cast<double>(b.dim(0)) : acc;
        }
    }
    return out;
}

Tensor apply_invariant(const InvariantPipelineConfig& config, const WeightSpacePoint& point) {
    return config.mlp.apply(pool_stage(config, apply_alpha_stage(config, point)));
}

std::vector<Tensor> normalize_average_pool(const std::vector<Tensor>& weights) {
    const AlphaMap alpha = AlphaMap::plain(AlphaBase::NormalizedSquares);
    std::vector<Tensor> pooled;
    pooled.reserve(weights.size());
    for (const Tensor& w : weights) {
        if (w.rank() != 3) {
            throw std::invalid_argument("normalize_average_pool: expected [rows, cols, w] "
                                        "tensors, got " +
                                        w.shape().str());
        }
        Tensor acc(Shape{w.dim(2)});
        for (std::size_t j = 0; j < w.dim(0); ++j) {
            for (std::size_t k = 0; k < w.dim(1); ++k) {
                acc = add(acc, alpha(entry_slice(w, j, k)));
            }
        }
        pooled.push_back(scale(acc, 1.0 / static_cast<double>(w.dim(0) * w.dim(1))));
    }
    return pooled;
}

}  // namespace wsym
