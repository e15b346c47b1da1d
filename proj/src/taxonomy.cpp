#include "graspaff/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "graspaff/error.hpp"

namespace graspaff {

std::string normalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (const char raw : name) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

GraspTaxonomy::GraspTaxonomy(std::string version, std::vector<std::string> class_names)
    : version_(std::move(version)), names_(std::move(class_names)) {
  if (names_.size() < 2) {
    throw Error(ErrorCode::InvalidTaxonomy, "a taxonomy needs at least 2 classes");
  }
  for (ClassIndex i = 0; i < names_.size(); ++i) {
    auto key = normalize_name(names_[i]);
    if (key.empty()) throw Error(ErrorCode::InvalidTaxonomy, "empty class name at index " + std::to_string(i));
    if (!index_.emplace(key, i).second) {
      throw Error(ErrorCode::InvalidTaxonomy, "duplicate class name '" + key + "'");
    }
  }
}

std::optional<ClassIndex> GraspTaxonomy::find(std::string_view name) const {
  const auto it = index_.find(normalize_name(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ClassIndex GraspTaxonomy::index_of(std::string_view name) const {
  if (auto idx = find(name)) return *idx;
  throw Error(ErrorCode::UnknownLabel, "grasp type '" + std::string(name) + "' is not in taxonomy " + version_);
}

GraspTaxonomy GraspTaxonomy::without(const std::vector<std::string>& dropped, std::string version) const {
  std::vector<std::string> kept;
  for (const auto& n : names_) {
    const bool drop = std::any_of(dropped.begin(), dropped.end(),
                                  [&](const std::string& d) { return normalize_name(d) == normalize_name(n); });
    if (!drop) kept.push_back(n);
  }
  return GraspTaxonomy(std::move(version), std::move(kept));
}

nlohmann::json GraspTaxonomy::to_json() const {
  return nlohmann::json{{"version", version_}, {"classes", names_}};
}

GraspTaxonomy GraspTaxonomy::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version") || !j.contains("classes") || !j["version"].is_string() ||
      !j["classes"].is_array()) {
    throw Error(ErrorCode::SchemaViolation, "taxonomy must be {\"version\": string, \"classes\": [string, ...]}");
  }
  std::vector<std::string> names;
  for (const auto& c : j["classes"]) {
    if (!c.is_string()) throw Error(ErrorCode::SchemaViolation, "taxonomy class names must be strings");
    names.push_back(c.get<std::string>());
  }
  return GraspTaxonomy(j["version"].get<std::string>(), std::move(names));
}

GraspTaxonomy GraspTaxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
  return from_json(j);
}

void GraspTaxonomy::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

GraspTaxonomy GraspTaxonomy::default_taxonomy() {
  return GraspTaxonomy("grasp13-reconstructed",
                       {"large diameter", "small diameter", "medium wrap", "adducted thumb", "light tool",
                        "power sphere", "precision sphere", "tripod", "palmar pinch", "lateral pinch",
                        "prismatic 2 finger", "prismatic 4 finger", "parallel extension"});
}

}  // namespace graspaff
