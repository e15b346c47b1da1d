#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspaff/distribution.hpp"
#include "graspaff/manifest.hpp"
#include "graspaff/random.hpp"
#include "graspaff/taxonomy.hpp"

namespace graspaff {

/// Additive floor applied to every class before normalization.
inline constexpr double kSimulatorNoiseFloor = 1e-6;

struct Confusion {
  ClassIndex target = 0;
  double weight = 0.0;
};

/// Synthetic stand-in for an image classifier. For an image of true class t the
/// expected output is m[t] = accuracy and m[c] = (1 - accuracy) * weight(t -> c)
/// over t's confusable classes; per-image outputs scatter around m with
/// sharpness `concentration`. `commitment` is the share of the concentration
/// spent on one perceived class per image (0 gives a plain Dirichlet around m;
/// values near 1 give confident, occasionally wrong outputs).
struct ConfusionModel {
  std::string name = "custom";
  std::size_t k = 0;
  double accuracy = 1.0;
  double concentration = 1.0;
  double commitment = 0.0;
  std::vector<std::vector<Confusion>> confusable;  // one list per true class

  /// Throws InvalidModel unless accuracy in (0, 1], concentration > 0, weights
  /// non-negative and summing to one per class, and no class lists itself.
  void validate() const;

  VectorXd mean(ClassIndex true_class) const;

  nlohmann::json to_json() const;
  static ConfusionModel from_json(const nlohmann::json& j);
  static ConfusionModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// Draws one p(g|i) in two stages:
///   1. a perceived class c ~ Categorical(m), from one uniform draw;
///   2. x_j ~ Gamma(concentration * (commitment * [j == c] + (1 - commitment) * m_j))
///      for positive shapes (0 otherwise), x_j += kSimulatorNoiseFloor, normalize.
/// Without the floor, stage 2 is a Dirichlet whose mean is
/// commitment * e_c + (1 - commitment) * m, so the overall mean is m.
Distribution simulate(ClassIndex true_class, const ConfusionModel& model, SeedStream& stream);
Distribution simulate(const SampleRecord& record, const ConfusionModel& model, SeedStream& stream);

/// Simulates every record of the manifest on the stream "simulate/<image_id>",
/// so the output for an image does not depend on evaluation order.
DatasetManifest simulate_manifest(const DatasetManifest& manifest, const ConfusionModel& model,
                                  std::uint64_t master_seed, std::string_view stream_prefix = "simulate");

/// Copy of `model` whose accuracy follows a saturating learning curve in the
/// number of training images per grasp type:
/// accuracy(n) = floor + (model.accuracy - floor) * (1 - exp(-n / scale)).
ConfusionModel at_training_size(const ConfusionModel& model, std::size_t images_per_grasp, double floor = 0.2,
                                double scale = 150.0);

}  // namespace graspaff
