#include "graspaff/heterogeneity.hpp"

#include "graspaff/error.hpp"

namespace graspaff {

nlohmann::json HeterogeneityReport::to_json() const {
  return nlohmann::json{{"h", h}, {"N", object_count}, {"std_variant", std_variant}, {"per_object", per_object}};
}

HeterogeneityReport heterogeneity(const AffordanceDatabase& db) {
  if (db.empty()) throw Error(ErrorCode::EmptyDatabase, "heterogeneity of an empty database");
  HeterogeneityReport report;
  double total = 0.0;
  for (const auto& [name, entry] : db.entries()) {
    const double s = nonzero_std(entry.values.values());
    report.per_object.emplace(name, s);
    total += s;
  }
  report.object_count = db.size();
  report.h = total / static_cast<double>(db.size());
  return report;
}

}  // namespace graspaff
