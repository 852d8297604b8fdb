#include "wsym/equivariant.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wsym/rng.hpp"

namespace wsym {

const char* family_name(LayerFamily family) {
    return family == LayerFamily::Positive ? "relu" : "sintanh";
}

LayerFamily family_from_name(const std::string& name) {
    if (name == "relu" || name == "positive") return LayerFamily::Positive;
    if (name == "sintanh" || name == "signflip") return LayerFamily::SignFlip;
    throw std::invalid_argument("unknown layer family '" + name + "'");
}

SubgroupKind subgroup_for(LayerFamily family) {
    return family == LayerFamily::Positive ? SubgroupKind::Positive : SubgroupKind::SignFlip;
}

namespace {

void validate_pair(const WeightSpaceSpec& source, const WeightSpaceSpec& target,
                   LayerFamily family) {
    if (source.channels != target.channels) {
        throw std::invalid_argument(
            "equivariant layer: source and target must share channel counts");
    }
    if (family == LayerFamily::SignFlip && source.layers() < 3) {
        throw std::invalid_argument(
            "equivariant layer: the sign-flip family needs L >= 3, got L = " +
            std::to_string(source.layers()));
    }
}

Shape block_shape(int rows, int cols) {
    return Shape{static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)};
}

/// out[0..rows) += M * in[0..cols)
void axpy_block(double* out, const Tensor& m, const double* in) {
    const std::size_t rows = m.dim(0), cols = m.dim(1);
    const double* md = m.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += md[r * cols + c] * in[c];
        out[r] += acc;
    }
}

}  // namespace

EquivariantParams::EquivariantParams(LayerFamily family_in, WeightSpaceSpec source_in,
                                     WeightSpaceSpec target_in)
    : family(family_in), source(std::move(source_in)), target(std::move(target_in)) {
    validate_pair(source, target, family);
    const int L = source.layers();
    if (L == 1) {
        dense_a = Tensor(Shape{static_cast<std::size_t>(target.dimension()),
                               static_cast<std::size_t>(source.dimension())});
        dense_c = Tensor(Shape{static_cast<std::size_t>(target.dimension())});
        return;
    }
    const int n0 = source.channels[0], nL = source.channels[L];
    const int w1 = source.weight_dims[0], b1 = source.bias_dims[0];
    const int w1t = target.weight_dims[0], b1t = target.bias_dims[0];
    const int wL = source.weight_dims[L - 1], bL = source.bias_dims[L - 1];
    const int wLt = target.weight_dims[L - 1], bLt = target.bias_dims[L - 1];

    p_first.assign(static_cast<std::size_t>(n0) * n0, Tensor(block_shape(w1t, w1)));
    q_first.assign(n0, Tensor(block_shape(w1t, b1)));
    r_first.assign(n0, Tensor(block_shape(b1t, w1)));
    s_first = Tensor(block_shape(b1t, b1));
    for (int i = 2; i <= L - 1; ++i) {
        p_mid.emplace_back(block_shape(target.weight_dims[i - 1], source.weight_dims[i - 1]));
        s_mid.emplace_back(block_shape(target.bias_dims[i - 1], source.bias_dims[i - 1]));
    }
    p_last.assign(static_cast<std::size_t>(nL) * nL, Tensor(block_shape(wLt, wL)));
    s_last.assign(static_cast<std::size_t>(nL) * nL, Tensor(block_shape(bLt, bL)));
    t_last.assign(nL, Tensor(Shape{static_cast<std::size_t>(bLt)}));
    if (family == LayerFamily::SignFlip) {
        r_taps.assign(nL, Tensor(block_shape(target.bias_dims[L - 2], wL)));
        q_taps.assign(nL, Tensor(block_shape(wLt, source.bias_dims[L - 2])));
    }
}

EquivariantParams EquivariantParams::zeros(LayerFamily family, const WeightSpaceSpec& source,
                                           const WeightSpaceSpec& target) {
    return EquivariantParams(family, source, target);
}

EquivariantParams EquivariantParams::identity(LayerFamily family, const WeightSpaceSpec& spec) {
    EquivariantParams params(family, spec, spec);
    const int L = spec.layers();
    if (L == 1) {
        params.dense_a = Tensor::identity(static_cast<std::size_t>(spec.dimension()));
        return params;
    }
    const int n0 = spec.channels[0], nL = spec.channels[L];
    for (int k = 0; k < n0; ++k) {
        params.p_first[static_cast<std::size_t>(k) * n0 + k] =
            Tensor::identity(spec.weight_dims[0]);
    }
    params.s_first = Tensor::identity(spec.bias_dims[0]);
    for (int i = 2; i <= L - 1; ++i) {
        params.p_mid[i - 2] = Tensor::identity(spec.weight_dims[i - 1]);
        params.s_mid[i - 2] = Tensor::identity(spec.bias_dims[i - 1]);
    }
    for (int j = 0; j < nL; ++j) {
        params.p_last[static_cast<std::size_t>(j) * nL + j] =
            Tensor::identity(spec.weight_dims[L - 1]);
        params.s_last[static_cast<std::size_t>(j) * nL + j] =
            Tensor::identity(spec.bias_dims[L - 1]);
    }
    return params;
}

EquivariantParams EquivariantParams::random(LayerFamily family, const WeightSpaceSpec& source,
                                            const WeightSpaceSpec& target, std::uint64_t seed) {
    EquivariantParams params(family, source, target);
    SplitMix64 rng(seed);
    params.for_each_block([&rng](Tensor& block) {
        const double fan_in =
            block.rank() == 2 ? static_cast<double>(block.dim(1)) : 1.0;
        const double bound = 1.0 / std::sqrt(fan_in);
        for (double& v : block.data()) v = rng.uniform(-bound, bound);
    });
    return params;
}

long long EquivariantParams::count() const {
    long long total = 0;
    for_each_block([&total](const Tensor& block) { total += static_cast<long long>(block.numel()); });
    return total;
}

void EquivariantParams::for_each_block(const std::function<void(Tensor&)>& fn) {
    if (is_dense()) {
        fn(dense_a);
        fn(dense_c);
        return;
    }
    for (Tensor& t : p_first) fn(t);
    for (Tensor& t : q_first) fn(t);
    for (Tensor& t : r_first) fn(t);
    fn(s_first);
    for (Tensor& t : p_mid) fn(t);
    for (Tensor& t : s_mid) fn(t);
    for (Tensor& t : p_last) fn(t);
    for (Tensor& t : s_last) fn(t);
    for (Tensor& t : t_last) fn(t);
    for (Tensor& t : r_taps) fn(t);
    for (Tensor& t : q_taps) fn(t);
}

void EquivariantParams::for_each_block(const std::function<void(const Tensor&)>& fn) const {
    const_cast<EquivariantParams*>(this)->for_each_block(
        [&fn](Tensor& t) { fn(static_cast<const Tensor&>(t)); });
}

WeightSpacePoint apply(const EquivariantParams& params, const WeightSpacePoint& point) {
    point.validate();
    if (!(point.spec == params.source)) {
        throw std::invalid_argument("equivariant layer: point does not conform to source spec");
    }
    const WeightSpaceSpec& src = params.source;
    const WeightSpaceSpec& tgt = params.target;
    const int L = src.layers();

    if (params.is_dense()) {
        const std::vector<double> u = flatten(point);
        std::vector<double> y(params.dense_c.data().begin(), params.dense_c.data().end());
        for (std::size_t r = 0; r < y.size(); ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < u.size(); ++c) acc += params.dense_a.at(r, c) * u[c];
            y[r] += acc;
        }
        return unflatten(tgt, y);
    }

    WeightSpacePoint out = WeightSpacePoint::zeros(tgt);
    const int n0 = src.channels[0], n1 = src.channels[1];
    const int nL = src.channels[L], nLm1 = src.channels[L - 1];

    // layer 1
    for (int j = 0; j < n1; ++j) {
        const double* bj = &point.biases[0].at(j, 0);
        for (int k = 0; k < n0; ++k) {
            double* dest = &out.weights[0].at(j, k, 0);
            for (int q = 0; q < n0; ++q) {
                axpy_block(dest, params.p_first[static_cast<std::size_t>(k) * n0 + q],
                           &point.weights[0].at(j, q, 0));
            }
            axpy_block(dest, params.q_first[k], bj);
        }
        double* bdest = &out.biases[0].at(j, 0);
        for (int q = 0; q < n0; ++q) {
            axpy_block(bdest, params.r_first[q], &point.weights[0].at(j, q, 0));
        }
        axpy_block(bdest, params.s_first, bj);
    }

    // middle layers
    for (int i = 2; i <= L - 1; ++i) {
        const Tensor& pm = params.p_mid[i - 2];
        const Tensor& sm = params.s_mid[i - 2];
        const int rows = src.channels[i], cols = src.channels[i - 1];
        for (int j = 0; j < rows; ++j) {
            for (int k = 0; k < cols; ++k) {
                axpy_block(&out.weights[i - 1].at(j, k, 0), pm, &point.weights[i - 1].at(j, k, 0));
            }
            axpy_block(&out.biases[i - 1].at(j, 0), sm, &point.biases[i - 1].at(j, 0));
        }
    }

    // layer L
    const bool cross = params.family == LayerFamily::SignFlip;
    for (int j = 0; j < nL; ++j) {
        for (int k = 0; k < nLm1; ++k) {
            double* dest = &out.weights[L - 1].at(j, k, 0);
            for (int p = 0; p < nL; ++p) {
                axpy_block(dest, params.p_last[static_cast<std::size_t>(j) * nL + p],
                           &point.weights[L - 1].at(p, k, 0));
            }
            if (cross) axpy_block(dest, params.q_taps[j], &point.biases[L - 2].at(k, 0));
        }
        double* bdest = &out.biases[L - 1].at(j, 0);
        for (int p = 0; p < nL; ++p) {
            axpy_block(bdest, params.s_last[static_cast<std::size_t>(j) * nL + p],
                       &point.biases[L - 1].at(p, 0));
        }
        const Tensor& offset = params.t_last[j];
        for (std::size_t f = 0; f < offset.numel(); ++f) bdest[f] += offset[f];
    }
    if (cross) {
        for (int j = 0; j < nLm1; ++j) {
            double* bdest = &out.biases[L - 2].at(j, 0);
            for (int p = 0; p < nL; ++p) {
                axpy_block(bdest, params.r_taps[p], &point.weights[L - 1].at(p, j, 0));
            }
        }
    }
    return out;
}

long long param_count(const WeightSpaceSpec& source, const WeightSpaceSpec& target,
                      LayerFamily family) {
    validate_pair(source, target, family);
    const int L = source.layers();
    if (L == 1) {
        return target.dimension() * (source.dimension() + 1);
    }
    const long long n0 = source.channels[0], nL = source.channels[L];
    const long long w1 = source.weight_dims[0], b1 = source.bias_dims[0];
    const long long w1t = target.weight_dims[0], b1t = target.bias_dims[0];
    const long long wL = source.weight_dims[L - 1], bL = source.bias_dims[L - 1];
    const long long wLt = target.weight_dims[L - 1], bLt = target.bias_dims[L - 1];

    long long total = w1t * w1 * n0 * n0 + w1t * b1 * n0 + b1t * w1 * n0 + b1t * b1;
    for (int i = 2; i <= L - 1; ++i) {
        total += static_cast<long long>(target.weight_dims[i - 1]) * source.weight_dims[i - 1];
        total += static_cast<long long>(target.bias_dims[i - 1]) * source.bias_dims[i - 1];
    }
    total += wLt * wL * nL * nL + bLt * bL * nL * nL + bLt * nL;
    if (family == LayerFamily::SignFlip) {
        const long long bLm1 = source.bias_dims[L - 2];
        const long long bLm1t = target.bias_dims[L - 2];
        total += bLm1t * wL * nL + wLt * bLm1 * nL;
    }
    return total;
}

DenseCoefficients::DenseCoefficients(EquivariantParams params) : params_(std::move(params)) {}

DenseCoefficients materialize_dense(const EquivariantParams& params) {
    return DenseCoefficients(params);
}

Tensor DenseCoefficients::p(int i, int j, int k, int s, int pp, int q) const {
    const WeightSpaceSpec& src = params_.source;
    const WeightSpaceSpec& tgt = params_.target;
    const int L = src.layers();
    if (L == 1) {
        Tensor block(block_shape(tgt.weight_dims[0], src.weight_dims[0]));
        for (int fo = 0; fo < tgt.weight_dims[0]; ++fo) {
            for (int fi = 0; fi < src.weight_dims[0]; ++fi) {
                block.at(fo, fi) = params_.dense_a.at(flat_weight_index(tgt, 1, j, k, fo),
                                                      flat_weight_index(src, 1, pp, q, fi));
            }
        }
        return block;
    }
    if (i == 1 && s == 1 && pp == j) {
        return params_.p_first[static_cast<std::size_t>(k) * src.channels[0] + q];
    }
    if (i == L && s == L && q == k) {
        return params_.p_last[static_cast<std::size_t>(j) * src.channels[L] + pp];
    }
    if (i == s && 1 < i && i < L && pp == j && q == k) {
        return params_.p_mid[i - 2];
    }
    return Tensor(block_shape(tgt.weight_dims[i - 1], src.weight_dims[s - 1]));
}

Tensor DenseCoefficients::q(int i, int j, int k, int s, int pp) const {
    const WeightSpaceSpec& src = params_.source;
    const WeightSpaceSpec& tgt = params_.target;
    const int L = src.layers();
    if (L == 1) {
        Tensor block(block_shape(tgt.weight_dims[0], src.bias_dims[0]));
        for (int fo = 0; fo < tgt.weight_dims[0]; ++fo) {
            for (int fi = 0; fi < src.bias_dims[0]; ++fi) {
                block.at(fo, fi) = params_.dense_a.at(flat_weight_index(tgt, 1, j, k, fo),
                                                      flat_bias_index(src, 1, pp, fi));
            }
        }
        return block;
    }
    if (i == 1 && s == 1 && pp == j) return params_.q_first[k];
    if (params_.family == LayerFamily::SignFlip && i == L && s == L - 1 && pp == k) {
        return params_.q_taps[j];
    }
    return Tensor(block_shape(tgt.weight_dims[i - 1], src.bias_dims[s - 1]));
}

Tensor DenseCoefficients::r(int i, int j, int s, int pp, int q) const {
    const WeightSpaceSpec& src = params_.source;
    const WeightSpaceSpec& tgt = params_.target;
    const int L = src.layers();
    if (L == 1) {
        Tensor block(block_shape(tgt.bias_dims[0], src.weight_dims[0]));
        for (int fo = 0; fo < tgt.bias_dims[0]; ++fo) {
            for (int fi = 0; fi < src.weight_dims[0]; ++fi) {
                block.at(fo, fi) = params_.dense_a.at(flat_bias_index(tgt, 1, j, fo),
                                                      flat_weight_index(src, 1, pp, q, fi));
            }
        }
        return block;
    }
    if (i == 1 && s == 1 && pp == j) return params_.r_first[q];
    if (params_.family == LayerFamily::SignFlip && i == L - 1 && s == L && q == j) {
        return params_.r_taps[pp];
    }
    return Tensor(block_shape(tgt.bias_dims[i - 1], src.weight_dims[s - 1]));
}

Tensor DenseCoefficients::s(int i, int j, int s_layer, int pp) const {
    const WeightSpaceSpec& src = params_.source;
    const WeightSpaceSpec& tgt = params_.target;
    const int L = src.layers();
    if (L == 1) {
        Tensor block(block_shape(tgt.bias_dims[0], src.bias_dims[0]));
        for (int fo = 0; fo < tgt.bias_dims[0]; ++fo) {
            for (int fi = 0; fi < src.bias_dims[0]; ++fi) {
                block.at(fo, fi) = params_.dense_a.at(flat_bias_index(tgt, 1, j, fo),
                                                      flat_bias_index(src, 1, pp, fi));
            }
        }
        return block;
    }
    if (i == 1 && s_layer == 1 && pp == j) return params_.s_first;
    if (i == s_layer && 1 < i && i < L && pp == j) return params_.s_mid[i - 2];
    if (i == L && s_layer == L) {
        return params_.s_last[static_cast<std::size_t>(j) * src.channels[L] + pp];
    }
    return Tensor(block_shape(tgt.bias_dims[i - 1], src.bias_dims[s_layer - 1]));
}

Tensor DenseCoefficients::tw(int i, int j, int k) const {
    const WeightSpaceSpec& tgt = params_.target;
    if (params_.source.layers() == 1) {
        Tensor block(Shape{static_cast<std::size_t>(tgt.weight_dims[0])});
        for (int fo = 0; fo < tgt.weight_dims[0]; ++fo) {
            block.at(fo) = params_.dense_c.at(flat_weight_index(tgt, 1, j, k, fo));
        }
        return block;
    }
    return Tensor(Shape{static_cast<std::size_t>(tgt.weight_dims[i - 1])});
}

Tensor DenseCoefficients::tb(int i, int j) const {
    const WeightSpaceSpec& tgt = params_.target;
    if (params_.source.layers() == 1) {
        Tensor block(Shape{static_cast<std::size_t>(tgt.bias_dims[0])});
        for (int fo = 0; fo < tgt.bias_dims[0]; ++fo) {
            block.at(fo) = params_.dense_c.at(flat_bias_index(tgt, 1, j, fo));
        }
        return block;
    }
    if (i == params_.source.layers()) return params_.t_last[j];
    return Tensor(Shape{static_cast<std::size_t>(tgt.bias_dims[i - 1])});
}

}  // namespace wsym
