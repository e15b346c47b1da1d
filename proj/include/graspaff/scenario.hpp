#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspaff/manifest.hpp"
#include "graspaff/random.hpp"
#include "graspaff/simulator.hpp"
#include "graspaff/taxonomy.hpp"

namespace graspaff {

/// Which grasp types each object admits, plus the simulator preset that stands in
/// for the classifier. A scenario is data: the reduced scenario differs from the
/// full one only in its exclusion rules and preset.
struct ScenarioConfig {
  std::string name;
  GraspTaxonomy taxonomy;
  std::vector<std::pair<std::string, std::vector<ClassIndex>>> objects;  // in declaration order
  std::string preset = "real_objects";

  std::vector<std::string> object_names() const;

  nlohmann::json to_json() const;
  /// Accepts an optional "exclude" block {"classes": [...], "objects": [...],
  /// "single_grasp_objects": bool} that is applied on load.
  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

struct ExclusionRules {
  std::vector<std::string> classes;
  std::vector<std::string> objects;
  bool single_grasp_objects = false;
};

/// Drops classes (re-indexing the taxonomy), then objects by name, then, if
/// requested, objects left with fewer than two grasp types.
ScenarioConfig apply_exclusions(const ScenarioConfig& config, const ExclusionRules& rules, std::string name,
                                std::string preset);

/// 21 household objects over the default taxonomy with real-object grasping.
/// The grasp assignment is a plausible reconstruction, not measured data.
ScenarioConfig scenario_real_objects();

/// The mimed-grasp scenario: "small diameter" dropped, objects without 3D models or
/// that cannot be rendered dropped, single-grasp objects dropped, mimed preset.
ScenarioConfig scenario_mimed();

ExclusionRules mimed_exclusions();

/// Manifest with exactly `images_per_pair` records for every admitted
/// (object, grasp type) pair. Image ids are "<prefix>/<object>/<grasp>/<n>".
DatasetManifest synthesize_manifest(const ScenarioConfig& config, std::size_t images_per_pair, Split split,
                                    const std::string& id_prefix);

/// Manifest with `per_object` records per object whose label counts follow the
/// object's weights (largest-remainder rounding). Weights are indexed by class and
/// must be zero outside the object's admitted grasps.
DatasetManifest synthesize_weighted(const ScenarioConfig& config, const std::vector<VectorXd>& weights,
                                    std::size_t per_object, Split split, const std::string& id_prefix);

/// Per-object label weights with graded skew: w_j proportional to exp(spread * skew * z_j)
/// with z_j standard normal from `stream`; skew = 0 gives equal weights.
std::vector<VectorXd> skewed_weights(const ScenarioConfig& config, double skew, SeedStream& stream,
                                     double spread = 2.0);

/// Knobs of a support-aware confusion model.
struct PresetParams {
  double accuracy = 0.65;
  double concentration = 8.0;
  double commitment = 0.9;
  double out_of_support_share = 0.5;  // expected confusable mass outside the imaged object's grasps
  double group_bonus = 1.0;           // extra weight for classes in the same similarity group
  double sphere_bonus = 0.0;          // extra weight between power sphere and precision sphere
};

/// Confusion weights for each true class t: classes that share an object with t
/// form one pool (weighted by similarity times the number of shared objects), the
/// rest another (weighted by similarity). The
/// pools are mixed so that, averaged over all admitted (object, grasp) pairs, a
/// share `out_of_support_share` of the confusable mass lands outside the imaged
/// object's grasps. Classes whose co-occurring pool is mostly outside the object
/// anyway get more, the others less.
ConfusionModel support_aware_model(const ScenarioConfig& scenario, const PresetParams& params, std::string name);

/// "real_objects" or "mimed"; throws UnknownPreset otherwise.
PresetParams preset_params(std::string_view name);
ConfusionModel scenario_preset(std::string_view name, const ScenarioConfig& scenario);

}  // namespace graspaff
