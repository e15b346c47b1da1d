#pragma once

#include <cstdint>

#include "graspaff/evaluation.hpp"
#include "graspaff/scenario.hpp"
#include "graspaff/simulator.hpp"

namespace graspaff {

/// Simulated image pool for a scenario: `per_object` records per object with
/// label weights from skewed_weights(skew, spread) on stream "pool-weights", and
/// p(g|i) drawn from `model` on "simulate/<image_id>".
DatasetManifest synthetic_pool(const ScenarioConfig& scenario, const ConfusionModel& model, std::size_t per_object,
                               double skew, std::uint64_t master_seed, double spread = 2.0);

struct GradedSkewStudy {
  std::size_t databases = 100;
  std::size_t per_object = 100;
  double max_skew = 1.0;  // database d uses skew max_skew * d / (databases - 1)
  double spread = 2.0;
  std::uint64_t master_seed = 0;
  PriorSource prior = PriorSource::Uniform;
  unsigned threads = 1;
};

/// One simulated test set per skew level, each with varied/uniform databases built
/// from its own labels (weights on "skew-weights/<d>"), evaluated with all five
/// methods. The report's per-trial h spans the skew range.
EvaluationReport run_graded_skew_study(const ScenarioConfig& scenario, const ConfusionModel& model,
                                       const GradedSkewStudy& study);

}  // namespace graspaff
