#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "graspaff/heterogeneity.hpp"
#include "oracles.hpp"

using namespace graspaff;
using fixtures::error_of;

TEST_CASE("worked examples") {
  const auto tax3 = fixtures::taxonomy(3);
  const AffordanceDatabase one(tax3, AffordanceKind::Varied, {fixtures::affordance("o", {0.2, 0.8, 0})});
  CHECK(std::abs(heterogeneity(one).h - 0.3) <= 1e-12);

  const AffordanceDatabase two(tax3, AffordanceKind::Varied,
                               {fixtures::affordance("a", {0.5, 0.5, 0}), fixtures::affordance("b", {0.1, 0.9, 0})});
  const auto r = heterogeneity(two);
  CHECK(std::abs(r.h - 0.2) <= 1e-12);
  CHECK(r.object_count == 2);
  CHECK(r.per_object.at("a") == 0.0);
  CHECK(std::abs(r.per_object.at("b") - 0.4) <= 1e-12);
  CHECK(r.std_variant == "population");
}

TEST_CASE("empty database") {
  const AffordanceDatabase db(fixtures::taxonomy(3), AffordanceKind::Varied, {});
  CHECK(error_of([&] { heterogeneity(db); }) == ErrorCode::EmptyDatabase);
}

TEST_CASE("random databases: oracle, uniform zero, bounds, permutation invariance") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 2 + rng() % 15;
    const auto tax = fixtures::taxonomy(k);
    std::vector<AffordanceVector> entries;
    std::vector<std::vector<double>> raw;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int o = 0; o < n; ++o) {
      VectorXd v = VectorXd::Zero(static_cast<Eigen::Index>(k));
      const int draws = 1 + static_cast<int>(rng() % 30);
      for (int d = 0; d < draws; ++d) v(static_cast<Eigen::Index>(rng() % k)) += 1.0;
      entries.push_back({"obj" + std::to_string(o), normalize(v), AffordanceKind::Varied});
      raw.push_back(fixtures::to_std(entries.back().values.values()));
    }
    const AffordanceDatabase db(tax, AffordanceKind::Varied, entries);
    const auto r = heterogeneity(db);

    double expect = 0.0;
    for (const auto& v : raw) expect += oracle::population_std_nonzero(v);
    expect /= static_cast<double>(raw.size());
    CHECK(std::abs(r.h - expect) <= 1e-12);
    for (const auto& [name, s] : r.per_object) {
      CHECK(s >= 0.0);
      CHECK(s <= 0.5);
    }
    CHECK(heterogeneity(to_uniform(db)).h == 0.0);

    // shuffle classes and objects
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<AffordanceVector> shuffled;
    for (const auto& e : entries) {
      VectorXd v(static_cast<Eigen::Index>(k));
      for (std::size_t g = 0; g < k; ++g) v(static_cast<Eigen::Index>(perm[g])) = e.values[static_cast<Eigen::Index>(g)];
      shuffled.push_back({e.object_name, normalize(v), AffordanceKind::Varied});
    }
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(std::abs(heterogeneity(AffordanceDatabase(tax, AffordanceKind::Varied, shuffled)).h - r.h) <= 1e-12);
  }
}

TEST_CASE("singleton support contributes zero") {
  const AffordanceDatabase db(fixtures::taxonomy(4), AffordanceKind::Varied,
                              {fixtures::affordance("pitcher", {0, 0, 1, 0}), fixtures::affordance("x", {0.25, 0.75, 0, 0})});
  const auto r = heterogeneity(db);
  CHECK(r.per_object.at("pitcher") == 0.0);
  CHECK(std::abs(r.h - 0.125) <= 1e-12);
}

TEST_CASE("report JSON names the std variant") {
  const AffordanceDatabase db(fixtures::taxonomy(3), AffordanceKind::Varied, {fixtures::affordance("o", {0.2, 0.8, 0})});
  const auto j = heterogeneity(db).to_json();
  CHECK(j.at("std_variant") == "population");
  CHECK(j.at("N") == 1);
}
