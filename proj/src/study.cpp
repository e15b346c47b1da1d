#include "graspaff/study.hpp"

#include "graspaff/error.hpp"

namespace graspaff {

DatasetManifest synthetic_pool(const ScenarioConfig& scenario, const ConfusionModel& model, std::size_t per_object,
                               double skew, std::uint64_t master_seed, double spread) {
  SeedStream weights(derive_seed(master_seed, "pool-weights"));
  auto pool = synthesize_weighted(scenario, skewed_weights(scenario, skew, weights, spread), per_object, Split::Test,
                                  scenario.name + "-pool");
  return simulate_manifest(pool, model, master_seed);
}

EvaluationReport run_graded_skew_study(const ScenarioConfig& scenario, const ConfusionModel& model,
                                       const GradedSkewStudy& study) {
  if (study.databases == 0) throw Error(ErrorCode::InsufficientImages, "graded skew study needs databases > 0");
  std::vector<TrialInput> inputs;
  inputs.reserve(study.databases);
  for (std::size_t d = 0; d < study.databases; ++d) {
    const double skew =
        study.databases == 1 ? 0.0 : study.max_skew * static_cast<double>(d) / static_cast<double>(study.databases - 1);
    SeedStream ws(derive_seed(study.master_seed, "skew-weights/" + std::to_string(d)));
    auto test = synthesize_weighted(scenario, skewed_weights(scenario, skew, ws, study.spread), study.per_object,
                                    Split::Test, "skew" + std::to_string(d));
    test = simulate_manifest(test, model, study.master_seed);
    auto varied = build_varied(test);
    auto uniform = to_uniform(varied);
    inputs.push_back({std::move(test), std::move(varied), std::move(uniform)});
  }
  const auto prior = make_prior(study.prior, scenario.taxonomy.size(), &inputs.front().test_set);
  nlohmann::json config{{"protocol", "graded skew"},
                        {"scenario", scenario.name},
                        {"classifier", "synthetic:" + model.name},
                        {"databases", study.databases},
                        {"per_object", study.per_object},
                        {"max_skew", study.max_skew},
                        {"spread", study.spread},
                        {"affordance", "test-set"}};
  return run_comparison(inputs, prior, study.master_seed, study.threads, std::move(config));
}

}  // namespace graspaff
