#include "wsym/weight_space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wsym/rng.hpp"

namespace wsym {

WeightSpaceSpec::WeightSpaceSpec(std::vector<int> channels_in, std::vector<int> weight_dims_in,
                                 std::vector<int> bias_dims_in)
    : channels(std::move(channels_in)),
      weight_dims(std::move(weight_dims_in)),
      bias_dims(std::move(bias_dims_in)) {
    if (channels.size() < 2) {
        throw std::invalid_argument("spec: need at least one layer (channels has " +
                                    std::to_string(channels.size()) + " entries)");
    }
    const std::size_t L = channels.size() - 1;
    if (weight_dims.size() != L || bias_dims.size() != L) {
        throw std::invalid_argument("spec: expected " + std::to_string(L) +
                                    " weight/bias dims for " + std::to_string(L) + " layers, got " +
                                    std::to_string(weight_dims.size()) + "/" +
                                    std::to_string(bias_dims.size()));
    }
    for (int n : channels) {
        if (n < 1) throw std::invalid_argument("spec: channel counts must be positive");
    }
    for (std::size_t i = 0; i < L; ++i) {
        if (weight_dims[i] < 1 || bias_dims[i] < 1) {
            throw std::invalid_argument("spec: weight/bias dims must be positive at layer " +
                                        std::to_string(i + 1));
        }
    }
}

WeightSpaceSpec WeightSpaceSpec::fcnn(std::vector<int> channels_in) {
    const std::size_t L = channels_in.size() - 1;
    return WeightSpaceSpec(std::move(channels_in), std::vector<int>(L, 1), std::vector<int>(L, 1));
}

bool WeightSpaceSpec::is_fcnn() const {
    for (int w : weight_dims) {
        if (w != 1) return false;
    }
    for (int b : bias_dims) {
        if (b != 1) return false;
    }
    return true;
}

long long WeightSpaceSpec::dimension() const {
    long long total = 0;
    for (int i = 1; i <= layers(); ++i) {
        total += static_cast<long long>(weight_dims[i - 1]) * channels[i] * channels[i - 1];
        total += static_cast<long long>(bias_dims[i - 1]) * channels[i];
    }
    return total;
}

WeightSpacePoint WeightSpacePoint::zeros(const WeightSpaceSpec& spec) {
    WeightSpacePoint point{spec, {}, {}};
    for (int i = 1; i <= spec.layers(); ++i) {
        point.weights.emplace_back(Shape{static_cast<std::size_t>(spec.channels[i]),
                                         static_cast<std::size_t>(spec.channels[i - 1]),
                                         static_cast<std::size_t>(spec.weight_dims[i - 1])});
        point.biases.emplace_back(Shape{static_cast<std::size_t>(spec.channels[i]),
                                        static_cast<std::size_t>(spec.bias_dims[i - 1])});
    }
    return point;
}

void WeightSpacePoint::validate() const {
    const int L = spec.layers();
    if (static_cast<int>(weights.size()) != L || static_cast<int>(biases.size()) != L) {
        throw std::invalid_argument("point: expected " + std::to_string(L) + " layers, got " +
                                    std::to_string(weights.size()) + " weight / " +
                                    std::to_string(biases.size()) + " bias tensors");
    }
    for (int i = 1; i <= L; ++i) {
        const Shape want_w{static_cast<std::size_t>(spec.channels[i]),
                           static_cast<std::size_t>(spec.channels[i - 1]),
                           static_cast<std::size_t>(spec.weight_dims[i - 1])};
        const Shape want_b{static_cast<std::size_t>(spec.channels[i]),
                           static_cast<std::size_t>(spec.bias_dims[i - 1])};
        if (!(weights[i - 1].shape() == want_w)) {
            throw std::invalid_argument("layer " + std::to_string(i) + ": weight shape " +
                                        weights[i - 1].shape().str() + " does not match spec " +
                                        want_w.str());
        }
        if (!(biases[i - 1].shape() == want_b)) {
            throw std::invalid_argument("layer " + std::to_string(i) + ": bias shape " +
                                        biases[i - 1].shape().str() + " does not match spec " +
                                        want_b.str());
        }
        if (!weights[i - 1].all_finite() || !biases[i - 1].all_finite()) {
            throw std::invalid_argument("layer " + std::to_string(i) + ": non-finite entry");
        }
    }
}

WeightSpacePoint random_point(const WeightSpaceSpec& spec, std::uint64_t seed, double scale) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("random_point: scale must be > 0");
    }
    SplitMix64 rng(seed);
    WeightSpacePoint point = WeightSpacePoint::zeros(spec);
    for (Tensor& w : point.weights) {
        for (double& v : w.data()) v = rng.uniform(-scale, scale);
    }
    for (Tensor& b : point.biases) {
        for (double& v : b.data()) v = rng.uniform(-scale, scale);
    }
    return point;
}

std::vector<double> flatten(const WeightSpacePoint& point) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(point.spec.dimension()));
    for (const Tensor& w : point.weights) out.insert(out.end(), w.data().begin(), w.data().end());
    for (const Tensor& b : point.biases) out.insert(out.end(), b.data().begin(), b.data().end());
    return out;
}

WeightSpacePoint unflatten(const WeightSpaceSpec& spec, std::span<const double> values) {
    if (static_cast<long long>(values.size()) != spec.dimension()) {
        throw std::invalid_argument("unflatten: got " + std::to_string(values.size()) +
                                    " values for a space of dimension " +
                                    std::to_string(spec.dimension()));
    }
    WeightSpacePoint point = WeightSpacePoint::zeros(spec);
    std::size_t pos = 0;
    for (Tensor& w : point.weights) {
        for (double& v : w.data()) v = values[pos++];
    }
    for (Tensor& b : point.biases) {
        for (double& v : b.data()) v = values[pos++];
    }
    return point;
}

std::size_t flat_weight_index(const WeightSpaceSpec& spec, int layer, int j, int k, int f) {
    std::size_t base = 0;
    for (int l = 1; l < layer; ++l) {
        base += static_cast<std::size_t>(spec.channels[l]) * spec.channels[l - 1] *
                spec.weight_dims[l - 1];
    }
    return base + (static_cast<std::size_t>(j) * spec.channels[layer - 1] + k) *
                      spec.weight_dims[layer - 1] +
           f;
}

std::size_t flat_bias_index(const WeightSpaceSpec& spec, int layer, int j, int f) {
    std::size_t base = 0;
    for (int l = 1; l <= spec.layers(); ++l) {
        base += static_cast<std::size_t>(spec.channels[l]) * spec.channels[l - 1] *
                spec.weight_dims[l - 1];
    }
    for (int l = 1; l < layer; ++l) {
        base += static_cast<std::size_t>(spec.channels[l]) * spec.bias_dims[l - 1];
    }
    return base + static_cast<std::size_t>(j) * spec.bias_dims[layer - 1] + f;
}

WeightSpacePoint lincomb(double a, const WeightSpacePoint& u, double b,
                         const WeightSpacePoint& v) {
    if (!(u.spec == v.spec)) {
        throw std::invalid_argument("lincomb: points live in different weight spaces");
    }
    WeightSpacePoint out = u;
    for (std::size_t i = 0; i < out.weights.size(); ++i) {
        for (std::size_t e = 0; e < out.weights[i].numel(); ++e) {
            out.weights[i][e] = a * u.weights[i][e] + b * v.weights[i][e];
        }
        for (std::size_t e = 0; e < out.biases[i].numel(); ++e) {
            out.biases[i][e] = a * u.biases[i][e] + b * v.biases[i][e];
        }
    }
    return out;
}

double max_abs(const WeightSpacePoint& point) {
    double m = 0.0;
    for (const Tensor& w : point.weights) m = std::max(m, max_abs(w));
    for (const Tensor& b : point.biases) m = std::max(m, max_abs(b));
    return m;
}

double max_abs_diff(const WeightSpacePoint& u, const WeightSpacePoint& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.weights.size(); ++i) {
        for (std::size_t e = 0; e < u.weights[i].numel(); ++e) {
            m = std::max(m, std::fabs(u.weights[i][e] - v.weights[i][e]));
        }
        for (std::size_t e = 0; e < u.biases[i].numel(); ++e) {
            m = std::max(m, std::fabs(u.biases[i][e] - v.biases[i][e]));
        }
    }
    return m;
}

}  // namespace wsym
