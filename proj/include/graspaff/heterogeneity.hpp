#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "graspaff/affordance.hpp"

namespace graspaff {

/// Grasp-type heterogeneity h: the unweighted mean over objects of the population
/// standard deviation of each object's non-zero affordance values.
struct HeterogeneityReport {
  double h = 0.0;
  std::map<std::string, double> per_object;
  std::size_t object_count = 0;
  /// Which standard deviation was used; always "population" (divide by m).
  std::string std_variant = "population";

  nlohmann::json to_json() const;
};

/// Throws EmptyDatabase for a database without objects.
HeterogeneityReport heterogeneity(const AffordanceDatabase& db);

}  // namespace graspaff
