#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "graspaff/affordance.hpp"
#include "graspaff/distribution.hpp"
#include "graspaff/error.hpp"
#include "graspaff/manifest.hpp"
#include "graspaff/taxonomy.hpp"

namespace fixtures {

/// Code of the graspaff::Error thrown by f; std::logic_error when nothing is thrown.
template <typename F>
graspaff::ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const graspaff::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected a graspaff::Error");
}

inline graspaff::GraspTaxonomy taxonomy(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("g" + std::to_string(i));
  return graspaff::GraspTaxonomy("test-" + std::to_string(k), names);
}

inline graspaff::VectorXd vec(std::initializer_list<double> xs) {
  graspaff::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline std::vector<double> to_std(const graspaff::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline graspaff::AffordanceVector affordance(std::string name, std::initializer_list<double> xs,
                                             graspaff::AffordanceKind kind = graspaff::AffordanceKind::Varied) {
  return {std::move(name), graspaff::normalize(vec(xs)), kind};
}

/// records[i] = (object, label); ids "r<i>"
inline graspaff::DatasetManifest manifest(const graspaff::GraspTaxonomy& tax,
                                          const std::vector<std::pair<std::string, std::size_t>>& rows,
                                          graspaff::Split split = graspaff::Split::Test) {
  std::vector<graspaff::SampleRecord> records;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    records.push_back({"r" + std::to_string(i), rows[i].first, rows[i].second, split, std::nullopt});
  }
  return graspaff::DatasetManifest(tax, "fixture", std::move(records));
}

}  // namespace fixtures
