#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wsym/tensor.hpp"

namespace wsym {

/// Architecture signature of a weight space: L layers, channel counts
/// (n_0,...,n_L), per-entry weight dims (w_1,...,w_L) and bias dims
/// (b_1,...,b_L). A fully connected network is the special case
/// w_i = b_i = 1; a convolutional network has b_i = 1 and w_i = kernel size.
struct WeightSpaceSpec {
    std::vector<int> channels;     // n_0 .. n_L
    std::vector<int> weight_dims;  // w_1 .. w_L
    std::vector<int> bias_dims;    // b_1 .. b_L

    WeightSpaceSpec(std::vector<int> channels_in, std::vector<int> weight_dims_in,
                    std::vector<int> bias_dims_in);

    /// All weight and bias dims equal to 1.
    static WeightSpaceSpec fcnn(std::vector<int> channels_in);

    int layers() const { return static_cast<int>(channels.size()) - 1; }
    bool is_fcnn() const;

    /// dim U = sum_i (w_i * n_i * n_{i-1} + b_i * n_i).
    long long dimension() const;

    bool operator==(const WeightSpaceSpec&) const = default;
};

/// A concrete element U = (W, b): per layer i (1-based in the math, 0-based
/// in storage) a weight tensor of shape [n_i, n_{i-1}, w_i] and a bias
/// tensor of shape [n_i, b_i]. The group action permutes and scales the
/// first two weight axes only; the feature axis rides along.
struct WeightSpacePoint {
    WeightSpaceSpec spec;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    static WeightSpacePoint zeros(const WeightSpaceSpec& spec);

    /// Throws if a shape disagrees with the spec or an entry is not finite.
    void validate() const;
};

/// Entries i.i.d. uniform in [-scale, scale]; deterministic in the seed.
WeightSpacePoint random_point(const WeightSpaceSpec& spec, std::uint64_t seed, double scale);

/// Fixed linear order on U: weights layer by layer (row, column, feature),
/// then biases layer by layer (row, feature). dimension() entries total.
std::vector<double> flatten(const WeightSpacePoint& point);
WeightSpacePoint unflatten(const WeightSpaceSpec& spec, std::span<const double> values);

/// Positions in the flatten() order; layer is 1-based, j/k/f 0-based.
std::size_t flat_weight_index(const WeightSpaceSpec& spec, int layer, int j, int k, int f);
std::size_t flat_bias_index(const WeightSpaceSpec& spec, int layer, int j, int f);

WeightSpacePoint lincomb(double a, const WeightSpacePoint& u, double b, const WeightSpacePoint& v);
double max_abs(const WeightSpacePoint& point);
double max_abs_diff(const WeightSpacePoint& u, const WeightSpacePoint& v);

}  // namespace wsym
