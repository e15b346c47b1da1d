#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "graspaff/scenario.hpp"

using namespace graspaff;
using fixtures::error_of;

TEST_CASE("real-object scenario") {
  const auto sc = scenario_real_objects();
  CHECK(sc.objects.size() == 21);
  CHECK(sc.taxonomy.size() == 13);
  CHECK(sc.preset == "real_objects");
}

TEST_CASE("mimed scenario applies the exclusion rules") {
  const auto sc = scenario_mimed();
  CHECK(sc.taxonomy.size() == 12);
  CHECK_FALSE(sc.taxonomy.find("small diameter").has_value());
  CHECK(sc.preset == "mimed");
  const auto names = sc.object_names();
  for (const auto* gone : {"glass cleaner", "wine glass", "abrasive sponge", "pitcher", "cooking skillet"}) {
    CHECK(std::find(names.begin(), names.end(), gone) == names.end());
  }
  CHECK(names.size() == 16);
  for (const auto& [o, gs] : sc.objects) CHECK(gs.size() >= 2);
}

TEST_CASE("scenario files with an exclude block") {
  auto j = scenario_real_objects().to_json();
  j["name"] = "mimed";
  j["preset"] = "mimed";
  j["exclude"] = {{"classes", {"small diameter"}},
                  {"objects", {"glass cleaner", "wine glass", "abrasive sponge"}},
                  {"single_grasp_objects", true}};
  const auto path = std::filesystem::temp_directory_path() / "graspaff_scenario.json";
  std::ofstream(path) << j.dump(2);
  const auto loaded = ScenarioConfig::load(path);
  const auto built = scenario_mimed();
  CHECK(loaded.to_json() == built.to_json());
  std::filesystem::remove(path);

  auto bad = scenario_real_objects().to_json();
  bad["objects"][0]["grasps"] = {"unicorn grip"};
  CHECK(error_of([&] { ScenarioConfig::from_json(bad); }) == ErrorCode::UnknownLabel);
}

TEST_CASE("weighted synthesis hits the requested per-object counts") {
  const auto sc = scenario_real_objects();
  SeedStream ws(3);
  const auto weights = skewed_weights(sc, 1.0, ws);
  const auto m = synthesize_weighted(sc, weights, 100, Split::Test, "w");
  CHECK(m.size() == 2100);
  const auto db_counts = m.pair_counts();
  for (std::size_t o = 0; o < sc.objects.size(); ++o) {
    const auto& [name, grasps] = sc.objects[o];
    std::size_t total = 0;
    for (const auto g : grasps) {
      const auto it = db_counts.find({name, g});
      const std::size_t n = it == db_counts.end() ? 0 : it->second;
      total += n;
      CHECK(std::abs(static_cast<double>(n) - 100 * weights[o](static_cast<Eigen::Index>(g))) <= 1.0);
    }
    CHECK(total == 100);
  }
  SeedStream flat(3);
  for (const auto& w : skewed_weights(sc, 0.0, flat)) {
    const double top = w.maxCoeff();
    for (Eigen::Index i = 0; i < w.size(); ++i) CHECK((w(i) == 0.0 || w(i) == top));
  }
}

TEST_CASE("shipped data files match the built-in configuration") {
  const std::filesystem::path dir = GRASPAFF_DATA_DIR;
  CHECK(GraspTaxonomy::load(dir / "taxonomy_default.json").to_json() == GraspTaxonomy::default_taxonomy().to_json());
  CHECK(ScenarioConfig::load(dir / "scenario_real_objects.json").to_json() == scenario_real_objects().to_json());
  CHECK(ScenarioConfig::load(dir / "scenario_mimed.json").to_json() == scenario_mimed().to_json());
  CHECK(ConfusionModel::load(dir / "model_real_objects.json").to_json() ==
        scenario_preset("real_objects", scenario_real_objects()).to_json());
  CHECK(ConfusionModel::load(dir / "model_mimed.json").to_json() == scenario_preset("mimed", scenario_mimed()).to_json());
}
