#pragma once

#include <string>

#include "json.hpp"
#include "nsais/model.hpp"

namespace nsais {

// Model files. Spaces may be a single set for every time or an array of
// per-time sets under "per_time"; maps are either tables of entries
// ({"t"?, "x", "u", "w", "next"} etc.; entries without "t" apply at every
// time) or named rules with parameters. See README for the full schema.
SystemModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const SystemModel& sys);

SystemModel load_model_file(const std::string& path);

// Reads a JSON document, raising SchemaError on parse failure.
nlohmann::json read_json_file(const std::string& path);

}  // namespace nsais
