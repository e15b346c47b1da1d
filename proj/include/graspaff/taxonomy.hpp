#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace graspaff {

using ClassIndex = std::size_t;

/// Case-folds (ASCII), trims, and collapses internal whitespace runs to one space.
std::string normalize_name(std::string_view name);

/// Ordered set of grasp-type classes. Class order is the canonical index order
/// and decides argmax tie-breaking, so it never changes after construction.
class GraspTaxonomy {
 public:
  GraspTaxonomy(std::string version, std::vector<std::string> class_names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& version() const noexcept { return version_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(ClassIndex index) const { return names_.at(index); }

  /// Index of the class whose normalized name matches; nullopt if absent.
  std::optional<ClassIndex> find(std::string_view name) const;
  /// Like find() but throws UnknownLabel.
  ClassIndex index_of(std::string_view name) const;

  /// Copy of this taxonomy without the named classes (order of the rest kept).
  GraspTaxonomy without(const std::vector<std::string>& dropped, std::string version) const;

  nlohmann::json to_json() const;
  static GraspTaxonomy from_json(const nlohmann::json& j);
  static GraspTaxonomy load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// 13 common grasp types used by the bundled synthetic scenarios. The class list
  /// is a reconstruction; replace it with a taxonomy file where exact names matter.
  static GraspTaxonomy default_taxonomy();

  bool operator==(const GraspTaxonomy& other) const { return version_ == other.version_ && names_ == other.names_; }

 private:
  std::string version_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassIndex> index_;
};

}  // namespace graspaff
