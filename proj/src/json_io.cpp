#include "wsym/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wsym {

using nlohmann::json;

namespace {

const json& require_field(const json& j, const char* name, const char* where) {
    auto it = j.find(name);
    if (it == j.end()) {
        throw std::runtime_error(std::string(where) + ": missing field '" + name + "'");
    }
    return *it;
}

std::vector<int> int_list(const json& j, const char* name, const char* where) {
    const json& field = require_field(j, name, where);
    if (!field.is_array()) {
        throw std::runtime_error(std::string(where) + ": field '" + name + "' must be an array");
    }
    return field.get<std::vector<int>>();
}

}  // namespace

json tensor_to_json(const Tensor& t) {
    switch (t.rank()) {
        case 1: {
            json arr = json::array();
            for (std::size_t i = 0; i < t.dim(0); ++i) arr.push_back(t.at(i));
            return arr;
        }
        case 2: {
            json arr = json::array();
            for (std::size_t i = 0; i < t.dim(0); ++i) {
                json row = json::array();
                for (std::size_t j = 0; j < t.dim(1); ++j) row.push_back(t.at(i, j));
                arr.push_back(std::move(row));
            }
            return arr;
        }
        case 3: {
            json arr = json::array();
            for (std::size_t i = 0; i < t.dim(0); ++i) {
                json plane = json::array();
                for (std::size_t j = 0; j < t.dim(1); ++j) {
                    json row = json::array();
                    for (std::size_t k = 0; k < t.dim(2); ++k) row.push_back(t.at(i, j, k));
                    plane.push_back(std::move(row));
                }
                arr.push_back(std::move(plane));
            }
            return arr;
        }
        default:
            throw std::runtime_error("tensor_to_json: only ranks 1..3 are serialized");
    }
}

Tensor tensor_from_json(const json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::runtime_error("tensor: expected a non-empty array");
    }
    // determine nesting depth
    int depth = 1;
    const json* probe = &j;
    while (probe->at(0).is_array()) {
        probe = &probe->at(0);
        ++depth;
        if (depth > 3) throw std::runtime_error("tensor: nesting deeper than rank 3");
    }
    std::vector<std::size_t> dims;
    const json* level = &j;
    for (int d = 0; d < depth; ++d) {
        dims.push_back(level->size());
        if (d + 1 < depth) level = &level->at(0);
    }
    Tensor t{Shape(dims)};
    if (depth == 1) {
        for (std::size_t i = 0; i < dims[0]; ++i) t.at(i) = j.at(i).get<double>();
    } else if (depth == 2) {
        for (std::size_t i = 0; i < dims[0]; ++i) {
            const json& row = j.at(i);
            if (row.size() != dims[1]) throw std::runtime_error("tensor: ragged rows");
            for (std::size_t k = 0; k < dims[1]; ++k) t.at(i, k) = row.at(k).get<double>();
        }
    } else {
        for (std::size_t i = 0; i < dims[0]; ++i) {
            const json& plane = j.at(i);
            if (plane.size() != dims[1]) throw std::runtime_error("tensor: ragged rows");
            for (std::size_t k = 0; k < dims[1]; ++k) {
                const json& row = plane.at(k);
                if (row.size() != dims[2]) throw std::runtime_error("tensor: ragged rows");
                for (std::size_t f = 0; f < dims[2]; ++f) {
                    t.at(i, k, f) = row.at(f).get<double>();
                }
            }
        }
    }
    return t;
}

json spec_to_json(const WeightSpaceSpec& spec) {
    return json{{"layers", spec.layers()},
                {"channels", spec.channels},
                {"weight_dim", spec.weight_dims},
                {"bias_dim", spec.bias_dims}};
}

WeightSpaceSpec spec_from_json(const json& j) {
    const auto channels = int_list(j, "channels", "spec");
    const auto weight_dims = int_list(j, "weight_dim", "spec");
    const auto bias_dims = int_list(j, "bias_dim", "spec");
    const int layers = require_field(j, "layers", "spec").get<int>();
    WeightSpaceSpec spec(channels, weight_dims, bias_dims);
    if (spec.layers() != layers) {
        throw std::runtime_error("spec: 'layers' = " + std::to_string(layers) +
                                 " disagrees with channels length " +
                                 std::to_string(channels.size()));
    }
    return spec;
}

json point_to_json(const WeightSpacePoint& point) {
    point.validate();
    json weights = json::array();
    json biases = json::array();
    for (const Tensor& w : point.weights) weights.push_back(tensor_to_json(w));
    for (const Tensor& b : point.biases) biases.push_back(tensor_to_json(b));
    return json{{"spec", spec_to_json(point.spec)},
                {"weights", std::move(weights)},
                {"biases", std::move(biases)}};
}

WeightSpacePoint point_from_json(const json& j) {
    const WeightSpaceSpec spec = spec_from_json(require_field(j, "spec", "weights file"));
    const json& weights = require_field(j, "weights", "weights file");
    const json& biases = require_field(j, "biases", "weights file");
    if (static_cast<int>(weights.size()) != spec.layers() ||
        static_cast<int>(biases.size()) != spec.layers()) {
        throw std::runtime_error("weights file: expected " + std::to_string(spec.layers()) +
                                 " per-layer entries, got " + std::to_string(weights.size()) +
                                 " weights / " + std::to_string(biases.size()) + " biases");
    }
    WeightSpacePoint point = WeightSpacePoint::zeros(spec);
    for (int i = 1; i <= spec.layers(); ++i) {
        Tensor w = tensor_from_json(weights.at(i - 1));
        Tensor b = tensor_from_json(biases.at(i - 1));
        if (!(w.shape() == point.weights[i - 1].shape())) {
            throw std::runtime_error("layer " + std::to_string(i) + ": weight shape " +
                                     w.shape().str() + " does not match spec " +
                                     point.weights[i - 1].shape().str());
        }
        if (!(b.shape() == point.biases[i - 1].shape())) {
            throw std::runtime_error("layer " + std::to_string(i) + ": bias shape " +
                                     b.shape().str() + " does not match spec " +
                                     point.biases[i - 1].shape().str());
        }
        point.weights[i - 1] = std::move(w);
        point.biases[i - 1] = std::move(b);
    }
    point.validate();
    return point;
}

std::string serialize(const WeightSpacePoint& point) { return point_to_json(point).dump(2); }

WeightSpacePoint deserialize(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("weights file: ") + e.what());
    }
    return point_from_json(j);
}

json group_to_json(const GroupElement& g) {
    json layers = json::array();
    for (const MonomialElement& layer : g.layers) {
        layers.push_back(json{{"perm", layer.perm.image()}, {"diag", layer.diag.d}});
    }
    return json{{"layers", std::move(layers)}};
}

GroupElement group_from_json(const json& j) {
    const json& layers = require_field(j, "layers", "group file");
    GroupElement g;
    for (const json& layer : layers) {
        const auto image = require_field(layer, "perm", "group file").get<std::vector<int>>();
        const auto diag = require_field(layer, "diag", "group file").get<std::vector<double>>();
        g.layers.emplace_back(DiagonalScaling(diag), Permutation(image));
    }
    return g;
}

namespace {

json block_list_to_json(const std::vector<Tensor>& blocks) {
    json arr = json::array();
    for (const Tensor& b : blocks) arr.push_back(tensor_to_json(b));
    return arr;
}

void block_list_from_json(const json& j, std::vector<Tensor>& blocks, const char* name) {
    if (!j.is_array() || j.size() != blocks.size()) {
        throw std::runtime_error(std::string("params: field '") + name + "' must hold " +
                                 std::to_string(blocks.size()) + " blocks");
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        Tensor t = tensor_from_json(j.at(i));
        if (!(t.shape() == blocks[i].shape())) {
            throw std::runtime_error(std::string("params: block ") + name + "[" +
                                     std::to_string(i) + "] has shape " + t.shape().str() +
                                     ", expected " + blocks[i].shape().str());
        }
        blocks[i] = std::move(t);
    }
}

}  // namespace

json params_to_json(const EquivariantParams& params) {
    json j{{"family", family_name(params.family)},
           {"source", spec_to_json(params.source)},
           {"target", spec_to_json(params.target)}};
    if (params.is_dense()) {
        j["dense_a"] = tensor_to_json(params.dense_a);
        j["dense_c"] = tensor_to_json(params.dense_c);
        return j;
    }
    j["P1"] = block_list_to_json(params.p_first);
    j["Q1"] = block_list_to_json(params.q_first);
    j["R1"] = block_list_to_json(params.r_first);
    j["S1"] = tensor_to_json(params.s_first);
    j["Pmid"] = block_list_to_json(params.p_mid);
    j["Smid"] = block_list_to_json(params.s_mid);
    j["PL"] = block_list_to_json(params.p_last);
    j["SL"] = block_list_to_json(params.s_last);
    j["TL"] = block_list_to_json(params.t_last);
    if (params.family == LayerFamily::SignFlip) {
        j["RLm1"] = block_list_to_json(params.r_taps);
        j["QL"] = block_list_to_json(params.q_taps);
    }
    return j;
}

EquivariantParams params_from_json(const json& j) {
    const LayerFamily family =
        family_from_name(require_field(j, "family", "params").get<std::string>());
    const WeightSpaceSpec source = spec_from_json(require_field(j, "source", "params"));
    const WeightSpaceSpec target = spec_from_json(require_field(j, "target", "params"));
    EquivariantParams params(family, source, target);
    if (params.is_dense()) {
        Tensor a = tensor_from_json(require_field(j, "dense_a", "params"));
        Tensor c = tensor_from_json(require_field(j, "dense_c", "params"));
        if (!(a.shape() == params.dense_a.shape()) || !(c.shape() == params.dense_c.shape())) {
            throw std::runtime_error("params: dense block shapes do not match the specs");
        }
        params.dense_a = std::move(a);
        params.dense_c = std::move(c);
        return params;
    }
    block_list_from_json(require_field(j, "P1", "params"), params.p_first, "P1");
    block_list_from_json(require_field(j, "Q1", "params"), params.q_first, "Q1");
    block_list_from_json(require_field(j, "R1", "params"), params.r_first, "R1");
    Tensor s1 = tensor_from_json(require_field(j, "S1", "params"));
    if (!(s1.shape() == params.s_first.shape())) {
        throw std::runtime_error("params: block S1 has the wrong shape");
    }
    params.s_first = std::move(s1);
    block_list_from_json(require_field(j, "Pmid", "params"), params.p_mid, "Pmid");
    block_list_from_json(require_field(j, "Smid", "params"), params.s_mid, "Smid");
    block_list_from_json(require_field(j, "PL", "params"), params.p_last, "PL");
    block_list_from_json(require_field(j, "SL", "params"), params.s_last, "SL");
    block_list_from_json(require_field(j, "TL", "params"), params.t_last, "TL");
    if (family == LayerFamily::SignFlip) {
        block_list_from_json(require_field(j, "RLm1", "params"), params.r_taps, "RLm1");
        block_list_from_json(require_field(j, "QL", "params"), params.q_taps, "QL");
    }
    return params;
}

namespace {

json alpha_to_json(const AlphaMap& alpha) {
    json j{{"base", alpha.base == AlphaBase::NormalizedSquares ? "normalized_squares" : "abs"}};
    if (alpha.has_head) {
        j["head_scale"] = tensor_to_json(alpha.head_scale);
        j["head_shift"] = tensor_to_json(alpha.head_shift);
    }
    return j;
}

AlphaMap alpha_from_json(const json& j) {
    const std::string base = require_field(j, "base", "alpha").get<std::string>();
    AlphaBase kind;
    if (base == "normalized_squares") {
        kind = AlphaBase::NormalizedSquares;
    } else if (base == "abs") {
        kind = AlphaBase::AbsValue;
    } else {
        throw std::runtime_error("alpha: unknown base '" + base + "'");
    }
    if (j.contains("head_scale")) {
        return AlphaMap::composed(kind, tensor_from_json(j.at("head_scale")),
                                  tensor_from_json(require_field(j, "head_shift", "alpha")));
    }
    return AlphaMap::plain(kind);
}

json alpha_list_to_json(const std::vector<AlphaMap>& alphas) {
    json arr = json::array();
    for (const AlphaMap& a : alphas) arr.push_back(alpha_to_json(a));
    return arr;
}

std::vector<AlphaMap> alpha_list_from_json(const json& j) {
    std::vector<AlphaMap> out;
    for (const json& a : j) out.push_back(alpha_from_json(a));
    return out;
}

}  // namespace

json invariant_config_to_json(const InvariantPipelineConfig& config) {
    json mlp{{"weights", json::array()}, {"biases", json::array()}};
    for (const Tensor& w : config.mlp.weights) mlp["weights"].push_back(tensor_to_json(w));
    for (const Tensor& b : config.mlp.biases) mlp["biases"].push_back(tensor_to_json(b));
    return json{{"family", family_name(config.family)},
                {"spec", spec_to_json(config.spec)},
                {"pool", config.pool == PoolMode::Mean ? "mean" : "sum"},
                {"pooled_block_order", "v1"},
                {"alpha",
                 json{{"w_first", alpha_list_to_json(config.w_first)},
                      {"b_first", alpha_to_json(config.b_first)},
                      {"w_mid", alpha_list_to_json(config.w_mid)},
                      {"b_mid", alpha_list_to_json(config.b_mid)},
                      {"w_last", alpha_list_to_json(config.w_last)},
                      {"b_last", alpha_list_to_json(config.b_last)}}},
                {"mlp", std::move(mlp)}};
}

InvariantPipelineConfig invariant_config_from_json(const json& j) {
    const LayerFamily family =
        family_from_name(require_field(j, "family", "invariant config").get<std::string>());
    const WeightSpaceSpec spec = spec_from_json(require_field(j, "spec", "invariant config"));
    InvariantPipelineConfig config(family, spec);
    const std::string pool = require_field(j, "pool", "invariant config").get<std::string>();
    if (pool == "mean") {
        config.pool = PoolMode::Mean;
    } else if (pool == "sum") {
        config.pool = PoolMode::Sum;
    } else {
        throw std::runtime_error("invariant config: unknown pool '" + pool + "'");
    }
    const json& alpha = require_field(j, "alpha", "invariant config");
    config.w_first = alpha_list_from_json(require_field(alpha, "w_first", "invariant config"));
    config.b_first = alpha_from_json(require_field(alpha, "b_first", "invariant config"));
    config.w_mid = alpha_list_from_json(require_field(alpha, "w_mid", "invariant config"));
    config.b_mid = alpha_list_from_json(require_field(alpha, "b_mid", "invariant config"));
    config.w_last = alpha_list_from_json(require_field(alpha, "w_last", "invariant config"));
    config.b_last = alpha_list_from_json(require_field(alpha, "b_last", "invariant config"));
    const json& mlp = require_field(j, "mlp", "invariant config");
    config.mlp.weights.clear();
    config.mlp.biases.clear();
    for (const json& w : require_field(mlp, "weights", "invariant config")) {
        config.mlp.weights.push_back(tensor_from_json(w));
    }
    for (const json& b : require_field(mlp, "biases", "invariant config")) {
        config.mlp.biases.push_back(tensor_from_json(b));
    }
    config.validate();
    return config;
}

Tensor matrix_from_json(const json& j) {
    const json& m = j.is_object() ? require_field(j, "matrix", "matrix file") : j;
    Tensor t = tensor_from_json(m);
    if (t.rank() != 2) {
        throw std::runtime_error("matrix file: expected a 2-D array, got " + t.shape().str());
    }
    return t;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace wsym
