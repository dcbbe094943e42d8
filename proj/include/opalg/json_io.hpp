#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "opalg/algebra.hpp"
#include "opalg/linmap.hpp"
#include "opalg/separability.hpp"
#include "opalg/uhf_tower.hpp"

namespace opalg {

/// Reports use ordered keys so identical runs serialize to identical bytes.
using Json = nlohmann::ordered_json;

// Matrix format: {"rows": n, "cols": m, "dims": [dA, dB] | null,
//                 "data": [[re, im], ...]} row-major.
Json matrix_to_json(const Mat& m, std::optional<Dims> dims = std::nullopt);

struct MatrixRecord {
  Mat mat;
  std::optional<Dims> dims;
};
MatrixRecord matrix_from_json(const Json& j);

Json linmap_to_json(const LinMap& m);
LinMap linmap_from_json(const Json& j);

Json functional_to_json(const Functional& f);
Functional functional_from_json(const Json& j);

Json algebra_to_json(const StarAlgebra& a);
StarAlgebra algebra_from_json(const Json& j);

Json sep_verdict_to_json(const SepVerdict& v);

Json tower_state_to_json(const TowerState& s);
TowerState tower_state_from_json(const Json& j);

/// Parse with a ValidationError (not a nlohmann exception) on bad input.
Json parse_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace opalg
