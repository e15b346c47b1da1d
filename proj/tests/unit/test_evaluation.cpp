#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "graspaff/evaluation.hpp"
#include "graspaff/heterogeneity.hpp"
#include "graspaff/scenario.hpp"
#include "graspaff/study.hpp"
#include "oracles.hpp"

using namespace graspaff;
using fixtures::error_of;

namespace {

DatasetManifest with_constant_distributions(const DatasetManifest& m, const std::function<VectorXd(const SampleRecord&)>& f) {
  std::vector<Distribution> ds;
  for (const auto& r : m.records()) ds.push_back(normalize(f(r)));
  return m.with_distributions(std::move(ds));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("graspaff_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("perfect classifier on a two-class taxonomy") {
  const auto tax = fixtures::taxonomy(2);
  std::vector<std::pair<std::string, std::size_t>> rows;
  for (int i = 0; i < 30; ++i) rows.emplace_back("a", 0);
  for (int i = 0; i < 30; ++i) rows.emplace_back("b", 1);
  const auto pool = with_constant_distributions(fixtures::manifest(tax, rows), [](const SampleRecord& r) {
    VectorXd v = VectorXd::Zero(2);
    v(static_cast<Eigen::Index>(r.grasp_label)) = 1.0;
    return v;
  });
  ComparisonProtocol p;
  p.trials = 5;
  p.per_object = 20;
  const auto rep = run_comparison_protocol(pool, p);
  for (const auto m : {Method::CnnOnly, Method::VariedOnly, Method::CnnUniform, Method::CnnVaried}) {
    CHECK(rep.summary(m).mean == 1.0);
  }
}

TEST_CASE("a constant classifier makes cnn_varied equal varied_only") {
  const auto sc = scenario_real_objects();
  SeedStream ws(1);
  const auto base = synthesize_weighted(sc, skewed_weights(sc, 1.0, ws), 120, Split::Test, "c");
  const auto pool = with_constant_distributions(base, [](const SampleRecord&) { return VectorXd::Ones(13); });
  ComparisonProtocol p;
  p.trials = 10;
  const auto rep = run_comparison_protocol(pool, p);
  for (std::size_t t = 0; t < rep.trial_count; ++t) {
    CHECK(rep.result(t, Method::CnnVaried).decisions == rep.result(t, Method::VariedOnly).decisions);
    CHECK(rep.accuracy(t, Method::CnnVaried) == rep.accuracy(t, Method::VariedOnly));
  }
}

TEST_CASE("accuracy and aggregates are recomputable from the trial table") {
  const auto sc = scenario_real_objects();
  const auto pool = synthetic_pool(sc, scenario_preset("real_objects", sc), 150, 0.5, 3);
  ComparisonProtocol p;
  p.trials = 6;
  p.master_seed = 3;
  const auto rep = run_comparison_protocol(pool, p);
  CHECK(rep.trials.size() == 6 * kAllMethods.size());
  for (const auto m : kAllMethods) {
    double sum = 0;
    for (std::size_t t = 0; t < rep.trial_count; ++t) {
      const auto& r = rep.result(t, m);
      CHECK(r.accuracy() == static_cast<double>(r.correct) / static_cast<double>(r.total));
      CHECK(r.decisions.size() == r.total);
      sum += r.accuracy();
    }
    CHECK(std::abs(rep.summary(m).mean - sum / 6) <= 1e-12);
  }
  CHECK(rep.result(2, Method::UniformOnly).seed_purpose == "uniform-only/2");
  CHECK(rep.total_exclusion_violations() == 0);

  // JSON round trip keeps the table
  const auto back = EvaluationReport::from_json(rep.to_json());
  CHECK(back.to_json() == rep.to_json());
  CHECK(trials_csv(back) == trials_csv(rep));
}

TEST_CASE("every method sees the same records") {
  const auto sc = scenario_real_objects();
  const auto pool = synthetic_pool(sc, scenario_preset("real_objects", sc), 120, 0.0, 8);
  const auto test = test_sample(pool, 100, 8, 0);
  const auto varied = build_varied(test);
  const auto uniform = to_uniform(varied);
  const auto rep = run_comparison({TrialInput{test, varied, uniform}}, uniform_prior(13), 8);
  // cnn_only decisions are the argmax of the stored distributions, in record order
  const auto& cnn = rep.result(0, Method::CnnOnly).decisions;
  for (std::size_t i = 0; i < test.size(); ++i) {
    CHECK(cnn[i] == static_cast<ClassIndex>(argmax(*test.records()[i].distribution)));
  }
  // and the fused decisions agree with the oracle on those same values
  const auto& fused = rep.result(0, Method::CnnVaried).decisions;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& r = test.records()[i];
    const auto expect = oracle::fuse(fixtures::to_std(r.distribution->values()),
                                     fixtures::to_std(varied.lookup(r.object_name).values.values()),
                                     std::vector<double>(13, 1.0 / 13));
    CHECK(fused[i] == oracle::first_max(expect));
  }
}

TEST_CASE("reports do not depend on threading") {
  const auto sc = scenario_real_objects();
  const auto pool = synthetic_pool(sc, scenario_preset("real_objects", sc), 150, 0.5, 4);
  ComparisonProtocol p;
  p.trials = 12;
  p.master_seed = 4;
  const auto serial = run_comparison_protocol(pool, p);
  p.threads = 4;
  const auto threaded = run_comparison_protocol(pool, p);
  CHECK(serial.to_json(true).dump() == threaded.to_json(true).dump());
}

TEST_CASE("evaluation never falls back silently") {
  const auto tax = fixtures::taxonomy(3);
  const auto bare = fixtures::manifest(tax, {{"a", 0}, {"a", 1}, {"b", 2}});
  ComparisonProtocol p;
  p.trials = 1;
  p.per_object = 1;
  CHECK(error_of([&] { run_comparison_protocol(bare, p); }) == ErrorCode::MissingDistribution);

  const auto pool = with_constant_distributions(bare, [](const SampleRecord&) { return VectorXd::Ones(3); });
  const auto varied = build_varied(pool.subset({0, 1}, "a-only"));
  CHECK(error_of([&] { run_comparison({pool}, varied, to_uniform(varied), uniform_prior(3), 1); }) ==
        ErrorCode::ObjectNotFound);
}

TEST_CASE("rank correlation matches the naive Spearman oracle") {
  SeedStream rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x, y;
    const auto n = 3 + rng.uniform_below(40);
    for (std::uint64_t i = 0; i < n; ++i) {
      x.push_back(static_cast<double>(rng.uniform_below(6)));  // plenty of ties
      y.push_back(x.back() * 0.3 + rng.standard_normal());
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    CHECK(std::abs(rank_correlation(x, y) - oracle::spearman(x, y)) <= 1e-12);
  }
  CHECK(rank_correlation({1, 2, 3}, {5, 5, 5}) == 0.0);
  CHECK(rank_correlation({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0));
  CHECK(error_of([] { rank_correlation({1, 2}, {1}); }) == ErrorCode::MismatchedTrialCount);
}

TEST_CASE("heterogeneity analysis") {
  const auto sc = scenario_real_objects();
  GradedSkewStudy st;
  st.databases = 8;
  st.per_object = 60;
  st.master_seed = 2;
  const auto rep = run_graded_skew_study(sc, scenario_preset("real_objects", sc), st);
  CHECK(rep.heterogeneity.size() == 8);
  CHECK(rep.heterogeneity[0] == 0.0);  // skew 0: equal label counts
  const auto scatter = run_heterogeneity_analysis(rep);
  CHECK(scatter.points.size() == 8);
  for (std::size_t t = 0; t < 8; ++t) {
    CHECK(scatter.points[t].h == rep.heterogeneity[t]);
    CHECK(scatter.points[t].improvement == rep.improvement()[t]);
  }
  CHECK(error_of([&] { run_heterogeneity_analysis(rep, {}); }) == ErrorCode::MismatchedTrialCount);
}

TEST_CASE("dataset size study with a simulated learning curve") {
  const auto sc = scenario_real_objects();
  const auto train = synthesize_manifest(sc, 200, Split::Train, "train");
  const auto nested = nested_subsample(train, {10, 50, 100, 200}, 1);
  const auto pool = synthesize_manifest(sc, 100, Split::Test, "test");
  std::vector<DatasetManifest> tests;
  for (std::size_t t = 0; t < 10; ++t) tests.push_back(test_sample_per_grasp(pool, 100, 1, t));
  const SimulatedLearningCurve source(scenario_preset("real_objects", sc), 1);
  const auto rep = run_dataset_size_study(nested, tests, source);
  CHECK(rep.sizes == std::vector<std::size_t>{10, 50, 100, 200});
  CHECK(rep.accuracies.size() == 4);
  CHECK(rep.accuracies[0].size() == 10);
  CHECK(rep.summary(0).mean < rep.summary(3).mean);
  const auto back = SizeStudyReport::from_json(rep.to_json());
  CHECK(back.to_json() == rep.to_json());

  // external per-size distributions
  std::vector<DatasetManifest> per_size;
  for (std::size_t s = 0; s < 4; ++s) per_size.push_back(simulate_manifest(pool, scenario_preset("real_objects", sc), s));
  const ExternalDistributions ext(per_size);
  const auto ext_rep = run_dataset_size_study(nested, tests, ext);
  CHECK(ext_rep.source == "external");
  CHECK(error_of([&] {
          run_dataset_size_study(nested, tests, ExternalDistributions({per_size[0]}));
        }) == ErrorCode::MissingDistribution);
}

TEST_CASE("emit writes deterministic files") {
  const auto sc = scenario_real_objects();
  const auto pool = synthetic_pool(sc, scenario_preset("real_objects", sc), 120, 0.5, 6);
  ComparisonProtocol p;
  p.trials = 4;
  p.master_seed = 6;
  const auto rep = run_comparison_protocol(pool, p);
  const auto a = scratch_dir("emit_a"), b = scratch_dir("emit_b");
  for (const auto fmt : {EmitFormat::Csv, EmitFormat::Json, EmitFormat::Svg}) {
    const auto pa = emit(rep, fmt, a);
    const auto pb = emit(rep, fmt, b);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].filename() == pb[i].filename());
      CHECK(slurp(pa[i]) == slurp(pb[i]));
      CHECK_FALSE(slurp(pa[i]).empty());
    }
  }
  const auto csv = slurp(a / "trials.csv");
  CHECK(csv.rfind("trial,h,cnn_only,uniform_only,varied_only,cnn_uniform,cnn_varied,improvement", 0) == 0);
  const auto svg = slurp(a / "heterogeneity.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("heterogeneity h") != std::string::npos);

  const auto scatter = run_heterogeneity_analysis(rep);
  CHECK_FALSE(emit(scatter, EmitFormat::Csv, a).empty());
  CHECK(parse_emit_format("svg_plot") == EmitFormat::Svg);
  CHECK(error_of([] { parse_emit_format("pdf"); }) == ErrorCode::SchemaViolation);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
