#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace compop::cli {

using json = nlohmann::json;

struct ExperimentDescriptor {
  std::string name;
  std::string summary;
  json schema;
  json example;  // a config that validates against `schema`
};

/// The six experiment kinds in a fixed order.
const std::vector<ExperimentDescriptor>& list_experiments();
json catalog_json();

/// Small JSON-schema subset: type, properties, required, enum, items,
/// minimum, maximum, minItems, additionalProperties (boolean only).
/// Returns one message per violation; empty means valid.
std::vector<std::string> validate(const json& schema, const json& value);

}  // namespace compop::cli
