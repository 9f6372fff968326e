#include "seal/tree_io.hpp"

#include <fstream>
#include <sstream>

namespace seal {

namespace {

Matrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array())
    throw ValidationError("tree json: " + field + " must be an array of rows");
  std::vector<Vec> rows;
  for (const auto& row : j) {
    if (!row.is_array())
      throw ValidationError("tree json: " + field + " rows must be arrays");
    Vec r;
    for (const auto& x : row) r.push_back(x.get<double>());
    if (!rows.empty() && r.size() != rows[0].size())
      throw ValidationError("tree json: ragged rows in " + field);
    rows.push_back(std::move(r));
  }
  return Matrix::from_rows(rows);
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m.to_rows()) rows.push_back(row);
  return rows;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string format_weight(double w) {
  std::ostringstream out;
  out << w;
  return out.str();
}

}  // namespace

HierarchySpec tree_from_json(const nlohmann::json& j) {
  for (const char* field : {"K", "M", "A1", "A2", "w"})
    if (!j.contains(field))
      throw ValidationError(std::string("tree json: missing field \"") +
                            field + "\"");

  HierarchySpec spec;
  spec.num_observed = j.at("K").get<int>();
  spec.num_latent = j.at("M").get<int>();
  spec.a1 = matrix_from_json(j.at("A1"), "A1");
  spec.a2 = matrix_from_json(j.at("A2"), "A2");
  spec.weights = j.at("w").get<Vec>();
  if (j.contains("observed_names"))
    spec.observed_names = j.at("observed_names").get<std::vector<std::string>>();
  if (j.contains("latent_names"))
    spec.latent_names = j.at("latent_names").get<std::vector<std::string>>();
  return spec;
}

nlohmann::json tree_to_json(const HierarchySpec& spec) {
  nlohmann::json j;
  j["K"] = spec.num_observed;
  j["M"] = spec.num_latent;
  j["A1"] = matrix_to_json(spec.a1);
  j["A2"] = matrix_to_json(spec.a2);
  j["w"] = spec.weights;
  nlohmann::json obs = nlohmann::json::array();
  for (int r = 0; r < spec.num_observed; ++r) obs.push_back(spec.observed_name(r));
  nlohmann::json lat = nlohmann::json::array();
  for (int s = 0; s < spec.num_latent; ++s) lat.push_back(spec.latent_name(s));
  j["observed_names"] = obs;
  j["latent_names"] = lat;
  return j;
}

HierarchySpec load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("tree json parse error in " + path + ": " +
                          e.what());
  }
  return tree_from_json(j);
}

void save_tree(const HierarchySpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tree file: " + path);
  out << tree_to_json(spec).dump(2) << "\n";
}

std::string tree_to_dot(const HierarchySpec& spec) {
  if (!spec.is_hard())
    throw ValidationError("tree_to_dot requires a hard spec (harden first)",
                          {{"mode", -1, -1, "spec is soft"}});
  const int m = spec.num_latent;
  const std::vector<int> parent = parent_of(spec);

  std::ostringstream out;
  out << "digraph hierarchy {\n";
  out << "  rankdir=TB;\n";
  for (int s = 0; s < m; ++s)
    out << "  n" << s << " [label=\"" << dot_escape(spec.latent_name(s))
        << "\"];\n";
  for (int r = 0; r < spec.num_observed; ++r)
    out << "  n" << m + r << " [label=\"" << dot_escape(spec.observed_name(r))
        << "\" shape=box];\n";
  for (int v = 1; v < spec.total_nodes(); ++v) {
    if (parent[v] < 0) continue;
    out << "  n" << parent[v] << " -> n" << v << " [label=\""
        << format_weight(spec.weights[v]) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace seal
