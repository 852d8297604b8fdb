#pragma once

#include <string>

#include <json.hpp>

#include "wsym/equivariant.hpp"
#include "wsym/group.hpp"
#include "wsym/invariant.hpp"
#include "wsym/weight_space.hpp"

namespace wsym {

/// Weights file layout:
///   { "spec": { "layers": L, "channels": [...], "weight_dim": [...],
///               "bias_dim": [...] },
///     "weights": [ per layer, axes [row][col][feature] ],
///     "biases":  [ per layer, axes [row][feature] ] }
/// Floats are written as shortest round-trip decimals, so a parse-print
/// cycle preserves every entry exactly.
nlohmann::json spec_to_json(const WeightSpaceSpec& spec);
WeightSpaceSpec spec_from_json(const nlohmann::json& j);

nlohmann::json point_to_json(const WeightSpacePoint& point);
WeightSpacePoint point_from_json(const nlohmann::json& j);

std::string serialize(const WeightSpacePoint& point);
WeightSpacePoint deserialize(const std::string& text);

/// Group elements: { "layers": [ { "perm": [...], "diag": [...] }, ... ] }
/// in layer index order 0..L.
nlohmann::json group_to_json(const GroupElement& g);
GroupElement group_from_json(const nlohmann::json& j);

/// Equivariant layer blocks keyed by name: P1, Q1, R1, S1, Pmid, Smid, PL,
/// SL, TL and, for the sign-flip family, RLm1 and QL. The L == 1 dense form
/// uses dense_a / dense_c.
nlohmann::json params_to_json(const EquivariantParams& params);
EquivariantParams params_from_json(const nlohmann::json& j);

nlohmann::json invariant_config_to_json(const InvariantPipelineConfig& config);
InvariantPipelineConfig invariant_config_from_json(const nlohmann::json& j);

/// A square matrix, either a bare nested array or { "matrix": [[...]] }.
Tensor matrix_from_json(const nlohmann::json& j);

nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);  // rank inferred from nesting

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace wsym
