#ifndef NCD_SERIALIZE_HPP
#define NCD_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "ncd/common.hpp"
#include "ncd/hmm_mlp.hpp"
#include "ncd/mlp.hpp"

namespace ncd {

using Json = nlohmann::json;

/// Current on-disk schema version, stamped into every JSON artifact.
inline constexpr int kFormatVersion = 1;

Json matrix_to_json(const Matrix& values);
Matrix matrix_from_json(const Json& j);

Json mlp_to_json(const MlpParams& params);
MlpParams mlp_from_json(const Json& j);

Json hmm_to_json(const HmmMlpParams& params);
HmmMlpParams hmm_from_json(const Json& j);

/// Parses text into JSON, mapping parse failures to InvalidInput.
Json parse_json(const std::string& text, const std::string& origin);

/// Canonical artifact text: sorted keys, two-space indent, trailing newline.
/// Identical values always produce identical bytes.
std::string dump_artifact(const Json& j);

} // namespace ncd

#endif
