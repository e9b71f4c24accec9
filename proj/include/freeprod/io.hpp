#pragma once

#include "freeprod/cumulant_calculus.hpp"
#include "freeprod/free_product.hpp"
#include "freeprod/moment_space.hpp"
#include "freeprod/verification.hpp"

#include <json.hpp>

#include <string>

namespace freeprod::io {

using json = nlohmann::ordered_json;

/// Parse failures name the file and byte offset.
json read_json_file(const std::string& path);
json parse_json(const std::string& text, const std::string& source = "<input>");

/// Accepts a string ("1/2", "1/2+1/3 i") or a plain JSON number.
Complex scalar_from_json(const json& j, const std::string& where);
json scalar_to_json(const Complex& z);

std::vector<GeneratorSymbol> generators_from_json(const json& j, const std::string& where);
json generators_to_json(const std::vector<GeneratorSymbol>& generators);

/// {"factor": name, "degree_bound": N, "generators": [...], "moments": {"a a": "1", ...}}
FactorState factor_from_json(const json& j, FactorIndex index, const std::string& where = "");
json factor_to_json(const FactorState& state);

/// {"degree_bound": N, "factors": [factor spec, ...]}; a single factor spec is
/// read as a product of one factor.
ProductSpace product_from_json(const json& j);

/// A product spec whose top level also carries "moments" for mixed words: a
/// joint distribution to be tested rather than a free product.
bool is_joint_spec(const json& j);
JointState joint_from_json(const json& j);

/// {"moments": [m_1, ..., m_N]} and {"cumulants": [k_1, ..., k_N]}
bool is_sequence_spec(const json& j, const char* key);
MomentSequence moment_sequence_from_json(const json& j);
CumulantSequence cumulant_sequence_from_json(const json& j);
json to_json(const MomentSequence& m);
json to_json(const CumulantSequence& k);

/// Joint cumulants of every letter tuple up to the degree bound, keyed like
/// moment tables: {"factor", "degree_bound", "generators", "cumulants": {"a b": ...}}.
json cumulant_table_to_json(const FactorState& state);
/// Inverse of the above: rebuilds the factor state from its cumulants.
FactorState factor_from_cumulants_json(const json& j, FactorIndex index = 0);

json to_json(const FreenessReport& report);
json to_json(const PsdResult& psd, const GramMatrix& gram);

} // namespace freeprod::io
