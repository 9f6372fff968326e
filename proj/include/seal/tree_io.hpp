#pragma once

#include <string>

#include <json.hpp>

#include "seal/hierarchy.hpp"

namespace seal {

// JSON tree schema:
//   { "K": int, "M": int, "A1": [[...]], "A2": [[...]], "w": [...],
//     "observed_names": [...], "latent_names": [...] }
// Names are optional on input and always written on output.
HierarchySpec tree_from_json(const nlohmann::json& j);
nlohmann::json tree_to_json(const HierarchySpec& spec);

HierarchySpec load_tree(const std::string& path);
void save_tree(const HierarchySpec& spec, const std::string& path);

// DOT rendering of a hard tree: directed parent->child edges, observed
// leaves drawn as boxes, edge labels carrying the child's weight.
std::string tree_to_dot(const HierarchySpec& spec);

}  // namespace seal
