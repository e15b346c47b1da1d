#include "graspaff/affordance.hpp"

#include <cmath>
#include <fstream>

#include "graspaff/error.hpp"

namespace graspaff {

std::string_view to_string(AffordanceKind kind) noexcept {
  return kind == AffordanceKind::Varied ? "varied" : "uniform";
}

AffordanceKind parse_affordance_kind(std::string_view s) {
  if (s == "varied") return AffordanceKind::Varied;
  if (s == "uniform") return AffordanceKind::Uniform;
  throw Error(ErrorCode::SchemaViolation, "kind must be \"varied\" or \"uniform\", got \"" + std::string(s) + "\"");
}

std::vector<ClassIndex> AffordanceVector::support() const {
  std::vector<ClassIndex> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0) out.push_back(static_cast<ClassIndex>(i));
  }
  return out;
}

Distribution flatten(const Distribution& values) {
  const VectorXd mask = (values.values().array() > 0.0).cast<double>();
  return normalize(mask);
}

namespace {

void check_entry(const AffordanceVector& e, AffordanceKind kind, std::size_t k) {
  if (e.values.size() != static_cast<Eigen::Index>(k)) {
    throw Error(ErrorCode::DimensionMismatch, "object '" + e.object_name + "' has " +
                                                  std::to_string(e.values.size()) + " entries, taxonomy has " +
                                                  std::to_string(k));
  }
  if (e.kind != kind) throw Error(ErrorCode::SchemaViolation, "object '" + e.object_name + "' has mixed kind");
  if (kind == AffordanceKind::Uniform) {
    const auto& v = e.values.values();
    const double hi = v.maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) > 0.0 && std::abs(v(i) - hi) > 1e-12) {
        throw Error(ErrorCode::SchemaViolation, "uniform entry '" + e.object_name + "' has unequal support values");
      }
    }
  }
}

}  // namespace

AffordanceDatabase::AffordanceDatabase(GraspTaxonomy taxonomy, AffordanceKind kind,
                                       std::vector<AffordanceVector> entries)
    : taxonomy_(std::move(taxonomy)), kind_(kind) {
  for (auto& e : entries) {
    e.object_name = normalize_name(e.object_name);
    if (e.object_name.empty()) throw Error(ErrorCode::SchemaViolation, "empty object name");
    check_entry(e, kind_, taxonomy_.size());
    const auto name = e.object_name;
    if (!entries_.try_emplace(name, std::move(e)).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate object '" + name + "'");
    }
  }
}

AffordanceVector AffordanceDatabase::lookup(std::string_view object_name, bool fallback_uniform) const {
  const auto key = normalize_name(object_name);
  if (const auto it = entries_.find(key); it != entries_.end()) return it->second;
  if (!fallback_uniform) throw Error(ErrorCode::ObjectNotFound, "'" + key + "'");
  const auto k = static_cast<Eigen::Index>(taxonomy_.size());
  return AffordanceVector{key, normalize(VectorXd::Ones(k)), AffordanceKind::Uniform};
}

bool AffordanceDatabase::contains(std::string_view object_name) const {
  return entries_.find(normalize_name(object_name)) != entries_.end();
}

nlohmann::json AffordanceDatabase::to_json() const {
  nlohmann::json objects = nlohmann::json::object();
  for (const auto& [name, e] : entries_) {
    const auto& v = e.values.values();
    objects[name] = std::vector<double>(v.data(), v.data() + v.size());
  }
  return nlohmann::json{{"taxonomy", taxonomy_.to_json()}, {"kind", to_string(kind_)}, {"objects", objects}};
}

AffordanceDatabase AffordanceDatabase::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("taxonomy") || !j.contains("kind") || !j.contains("objects") ||
      !j["kind"].is_string() || !j["objects"].is_object()) {
    throw Error(ErrorCode::SchemaViolation,
                "affordance database must be {\"taxonomy\": {...}, \"kind\": ..., \"objects\": {...}}");
  }
  auto taxonomy = GraspTaxonomy::from_json(j["taxonomy"]);
  const auto kind = parse_affordance_kind(j["kind"].get<std::string>());
  const auto k = static_cast<Eigen::Index>(taxonomy.size());
  std::vector<AffordanceVector> entries;
  for (const auto& [name, arr] : j["objects"].items()) {
    if (!arr.is_array()) throw Error(ErrorCode::SchemaViolation, "object '" + name + "' must map to an array");
    VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) throw Error(ErrorCode::SchemaViolation, "object '" + name + "' has a non-number");
      v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    try {
      entries.push_back({name, from_normalized(v, k), kind});
    } catch (const Error& e) {
      throw Error(e.code(), "object '" + name + "': " + e.what());
    }
  }
  return AffordanceDatabase(std::move(taxonomy), kind, std::move(entries));
}

void AffordanceDatabase::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

AffordanceDatabase AffordanceDatabase::load(const std::filesystem::path& path) {
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

AffordanceDatabase build_varied(const DatasetManifest& manifest) {
  if (manifest.empty()) throw Error(ErrorCode::EmptyManifest, "manifest '" + manifest.name() + "' has no records");
  const auto k = static_cast<Eigen::Index>(manifest.taxonomy().size());
  std::map<std::string, VectorXd> counts;
  for (const auto& r : manifest.records()) {
    auto [it, fresh] = counts.try_emplace(r.object_name, VectorXd::Zero(k));
    it->second(static_cast<Eigen::Index>(r.grasp_label)) += 1.0;
  }
  std::vector<AffordanceVector> entries;
  for (const auto& [name, c] : counts) {
    entries.push_back({name, normalize(c / c.sum()), AffordanceKind::Varied});
  }
  return AffordanceDatabase(manifest.taxonomy(), AffordanceKind::Varied, std::move(entries));
}

AffordanceDatabase to_uniform(const AffordanceDatabase& db) {
  std::vector<AffordanceVector> entries;
  for (const auto& [name, e] : db.entries()) entries.push_back({name, flatten(e.values), AffordanceKind::Uniform});
  return AffordanceDatabase(db.taxonomy(), AffordanceKind::Uniform, std::move(entries));
}

std::vector<std::string> validate(const AffordanceDatabase& db) {
  std::vector<std::string> problems;
  if (db.empty()) problems.push_back("database has no objects");
  const auto k = static_cast<Eigen::Index>(db.taxonomy().size());
  for (const auto& [name, e] : db.entries()) {
    const auto& v = e.values.values();
    if (v.size() != k) problems.push_back(name + ": wrong dimension");
    if ((v.array() < 0.0).any()) problems.push_back(name + ": negative entry");
    if (!(v.array() > 0.0).any()) problems.push_back(name + ": empty support");
    if (std::abs(v.sum() - 1.0) > 1e-9) problems.push_back(name + ": entries do not sum to 1");
    if (db.kind() == AffordanceKind::Uniform) {
      const double hi = v.maxCoeff();
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) > 0.0 && std::abs(v(i) - hi) > 1e-12) {
          problems.push_back(name + ": uniform entry has unequal values");
          break;
        }
      }
    }
  }
  return problems;
}

std::vector<std::string> AffordanceDatabase::object_names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

std::vector<std::string> validate_file(const std::filesystem::path& path) {
  try {
    return validate(AffordanceDatabase::load(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    return {e.what()};
  }
}

AffordanceDatabase restrict_objects(const AffordanceDatabase& db, const std::vector<std::string>& objects) {
  std::vector<AffordanceVector> entries;
  for (const auto& o : objects) entries.push_back(db.lookup(o));
  return AffordanceDatabase(db.taxonomy(), db.kind(), std::move(entries));
}

}  // namespace graspaff
