#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspaff/distribution.hpp"
#include "graspaff/manifest.hpp"
#include "graspaff/taxonomy.hpp"

namespace graspaff {

enum class AffordanceKind { Varied, Uniform };

std::string_view to_string(AffordanceKind kind) noexcept;
AffordanceKind parse_affordance_kind(std::string_view s);

/// Per-object prior p(g|o) over a taxonomy. The support (non-zero entries) is
/// never empty; a uniform-kind vector has equal values on its support.
struct AffordanceVector {
  std::string object_name;
  Distribution values;
  AffordanceKind kind = AffordanceKind::Varied;

  std::vector<ClassIndex> support() const;
  bool in_support(ClassIndex g) const { return values[static_cast<Eigen::Index>(g)] > 0.0; }
};

/// Uniform distribution over `support` (entries 1/m there, 0 elsewhere).
Distribution flatten(const Distribution& values);

/// Object-name keyed affordance priors sharing one taxonomy. Immutable once built.
class AffordanceDatabase {
 public:
  AffordanceDatabase(GraspTaxonomy taxonomy, AffordanceKind kind, std::vector<AffordanceVector> entries);

  const GraspTaxonomy& taxonomy() const noexcept { return taxonomy_; }
  AffordanceKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  /// Entries keyed by normalized object name (lexicographic order).
  const std::map<std::string, AffordanceVector, std::less<>>& entries() const noexcept { return entries_; }
  std::vector<std::string> object_names() const;

  /// Exact match after name normalization. Throws ObjectNotFound with the
  /// normalized query unless `fallback_uniform` is set, in which case an unknown
  /// object maps to the uniform vector over all K classes.
  AffordanceVector lookup(std::string_view object_name, bool fallback_uniform = false) const;
  bool contains(std::string_view object_name) const;

  nlohmann::json to_json() const;
  static AffordanceDatabase from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static AffordanceDatabase load(const std::filesystem::path& path);

 private:
  GraspTaxonomy taxonomy_;
  AffordanceKind kind_;
  std::map<std::string, AffordanceVector, std::less<>> entries_;
};

/// Normalized per-object histogram of grasp labels.
AffordanceDatabase build_varied(const DatasetManifest& manifest);

/// Flattens every entry to 1/m over its support.
AffordanceDatabase to_uniform(const AffordanceDatabase& db);

/// Re-checks every invariant of a (possibly hand-edited) database and returns
/// human-readable problems; an empty result means the database is valid.
std::vector<std::string> validate(const AffordanceDatabase& db);

/// Parses and validates a database file without throwing on invariant problems.
std::vector<std::string> validate_file(const std::filesystem::path& path);

/// Database restricted to the given objects (all of which must exist).
AffordanceDatabase restrict_objects(const AffordanceDatabase& db, const std::vector<std::string>& objects);

}  // namespace graspaff
