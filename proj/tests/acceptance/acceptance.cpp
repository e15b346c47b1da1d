// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "graspaff/error.hpp"
#include "graspaff/evaluation.hpp"
#include "graspaff/fusion.hpp"
#include "graspaff/heterogeneity.hpp"
#include "graspaff/scenario.hpp"
#include "graspaff/study.hpp"
#include "oracles.hpp"

#ifndef GRASPAFF_DATA_DIR
#define GRASPAFF_DATA_DIR "data"
#endif

using namespace graspaff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

VectorXd random_simplex(SeedStream& rng, Eigen::Index k, double zero_prob) {
  VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) v(i) = rng.uniform01() < zero_prob ? 0.0 : rng.gamma(1.0);
  if (v.sum() == 0.0) v(static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(k)))) = 1.0;
  return v;
}

std::vector<double> as_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

constexpr std::uint64_t kSeed = 20240601;

// The full synthetic evaluation shared by criteria 3 and 4.
struct FullRun {
  EvaluationReport report;
  double seconds = 0;
};

FullRun full_run(const ScenarioConfig& scenario) {
  const auto t0 = Clock::now();
  const auto model = scenario_preset(scenario.preset, scenario);
  const auto pool = synthetic_pool(scenario, model, 1000, 0.5, kSeed);
  ComparisonProtocol p;
  p.trials = 100;
  p.per_object = 100;
  p.master_seed = kSeed;
  p.classifier = "synthetic:" + model.name;
  FullRun out{run_comparison_protocol(pool, p), 0};
  out.seconds = seconds_since(t0);
  return out;
}

Outcome ordering(const EvaluationReport& r) {
  const double cv = r.summary(Method::CnnVaried).mean;
  const double cu = r.summary(Method::CnnUniform).mean;
  const double co = r.summary(Method::CnnOnly).mean;
  const double uo = r.summary(Method::UniformOnly).mean;
  const bool pass = cv >= cu && cu - co > 0.02 && co - uo > 0.02;
  char buf[256];
  std::snprintf(buf, sizeof buf, "cnn_varied %.4f >= cnn_uniform %.4f >(2pp) cnn_only %.4f >(2pp) uniform_only %.4f", cv,
                cu, co, uo);
  return {pass, buf};
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  SeedStream rng(kSeed, "acceptance/1");
  double worst = 0.0;
  bool decisions_agree = true;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index k = 2 + i % 32;
    const auto cnn = normalize(random_simplex(rng, k, 0.1));
    const AffordanceVector aff{"o", normalize(random_simplex(rng, k, 0.4)), AffordanceKind::Varied};
    const ClassPrior prior{normalize((random_simplex(rng, k, 0.0).array() + 1e-3).matrix()), PriorSource::Empirical};
    const auto r = fuse(cnn, aff, prior);
    const auto expect = oracle::fuse(as_std(cnn.values()), as_std(aff.values.values()), as_std(prior.values.values()));
    if (expect.empty()) {
      decisions_agree &= r.fallback_used && r.decision == oracle::first_max(as_std(aff.values.values()));
      continue;
    }
    for (Eigen::Index g = 0; g < k; ++g) worst = std::max(worst, std::abs(r.posterior[g] - expect[static_cast<std::size_t>(g)]));
    decisions_agree &= r.decision == oracle::first_max(expect) || expect[r.decision] == expect[oracle::first_max(expect)];
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && decisions_agree && secs < 5.0,
          fmt("max |fuse - oracle| = %.3g", worst) + fmt(", %.3f s (limit 5 s)", secs)};
}

Outcome criterion2() {
  SeedStream rng(kSeed, "acceptance/2");
  int agree = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.uniform_below(32));
    const auto cnn = normalize(random_simplex(rng, k, 0.0));
    const AffordanceVector full{"o", normalize(VectorXd::Ones(k)), AffordanceKind::Uniform};
    const auto prior = uniform_prior(static_cast<std::size_t>(k));
    const DecisionInputs in{&cnn, &full, &full, &prior, nullptr};
    agree += decide(Method::CnnVaried, in).decision == decide(Method::CnnOnly, in).decision;
  }
  return {agree == n, std::to_string(agree) + "/" + std::to_string(n) + " decisions agree"};
}

Outcome criterion3(const FullRun& run) {
  const auto& r = run.report;
  std::size_t violations = 0, fallbacks = 0, decisions = 0;
  for (const auto m : {Method::CnnUniform, Method::CnnVaried}) {
    fallbacks += r.total_fallbacks(m);
    for (std::size_t t = 0; t < r.trial_count; ++t) decisions += r.result(t, m).total;
  }
  violations = r.total_exclusion_violations();
  const bool shape = r.trial_count == 100 && r.config.at("objects") == 21 && r.config.at("classes") == 13 &&
                     r.result(0, Method::CnnOnly).total == 2100;
  return {violations == 0 && shape && run.seconds < 60.0,
          std::to_string(violations) + " out-of-support decisions in " + std::to_string(decisions) + " fused (" +
              std::to_string(fallbacks) + " flagged fallbacks)" + fmt(", %.2f s (limit 60 s)", run.seconds)};
}

Outcome criterion5() {
  const auto sc = scenario_real_objects();
  GradedSkewStudy st;
  st.databases = 100;
  st.per_object = 100;
  st.master_seed = kSeed;
  const auto report = run_graded_skew_study(sc, scenario_preset("real_objects", sc), st);
  const auto scatter = run_heterogeneity_analysis(report);
  const double lo = *std::min_element(report.heterogeneity.begin(), report.heterogeneity.end());
  const double hi = *std::max_element(report.heterogeneity.begin(), report.heterogeneity.end());
  return {scatter.rank_correlation > 0.3,
          fmt("rank correlation %.3f (need > 0.3)", scatter.rank_correlation) + fmt(", h from %.3f", lo) +
              fmt(" to %.3f", hi)};
}

Outcome criterion6() {
  bool uniform_zero = true;
  SeedStream rng(kSeed, "acceptance/6");
  const auto sc = scenario_real_objects();
  for (int rep = 0; rep < 20; ++rep) {
    SeedStream ws(rng.next_u64());
    const auto m = synthesize_weighted(sc, skewed_weights(sc, 1.0, ws), 50, Split::Train, "h");
    uniform_zero &= heterogeneity(to_uniform(build_varied(m))).h == 0.0;
  }

  const GraspTaxonomy tax3("h3", {"a", "b", "c"});
  const AffordanceDatabase fixture(tax3, AffordanceKind::Varied,
                                   {{"o", normalize((VectorXd(3) << 0.2, 0.8, 0.0).finished()), AffordanceKind::Varied}});
  const double h_fixture = heterogeneity(fixture).h;

  // permutation invariance over shuffled classes and objects
  const auto varied = build_varied(synthesize_weighted(sc, skewed_weights(sc, 1.0, rng), 100, Split::Train, "p"));
  const double h0 = heterogeneity(varied).h;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::size_t> perm(13);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
    std::vector<std::string> names(13);
    for (std::size_t g = 0; g < 13; ++g) names[perm[g]] = varied.taxonomy().name(g);
    std::vector<AffordanceVector> entries;
    for (const auto& [name, e] : varied.entries()) {
      VectorXd v(13);
      for (std::size_t g = 0; g < 13; ++g) v(static_cast<Eigen::Index>(perm[g])) = e.values[static_cast<Eigen::Index>(g)];
      entries.push_back({name, normalize(v), AffordanceKind::Varied});
    }
    for (std::size_t i = entries.size() - 1; i > 0; --i) std::swap(entries[i], entries[rng.uniform_below(i + 1)]);
    const AffordanceDatabase shuffled(GraspTaxonomy("perm", names), AffordanceKind::Varied, entries);
    worst = std::max(worst, std::abs(heterogeneity(shuffled).h - h0));
  }
  return {uniform_zero && std::abs(h_fixture - 0.3) <= 1e-12 && worst <= 1e-12,
          std::string("uniform h = 0: ") + (uniform_zero ? "yes" : "no") + fmt(", fixture h = %.15g", h_fixture) +
              fmt(", max permutation drift %.3g", worst)};
}

Outcome criterion7() {
  const auto sc = scenario_real_objects();
  const auto train = synthesize_manifest(sc, 1000, Split::Train, "train");
  const std::vector<std::size_t> sizes = {10, 50, 100, 500, 1000};
  const auto a = nested_subsample(train, sizes, kSeed);
  const auto b = nested_subsample(train, sizes, kSeed);
  const auto c = nested_subsample(train, sizes, kSeed, 4);

  bool nested = true, counts = true, identical = true;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const auto csv = manifest_to_csv(a[s]);
    identical &= csv == manifest_to_csv(b[s]) && csv == manifest_to_csv(c[s]);
    const auto lc = a[s].label_counts();
    for (const auto n : lc) counts &= n == sizes[s];
    if (s == 0) continue;
    // strictly nested per grasp type
    for (std::size_t g = 0; g < 13; ++g) {
      std::set<std::string> small, large;
      for (const auto& r : a[s - 1].records()) {
        if (r.grasp_label == g) small.insert(r.image_id);
      }
      for (const auto& r : a[s].records()) {
        if (r.grasp_label == g) large.insert(r.image_id);
      }
      nested &= small.size() < large.size() && std::includes(large.begin(), large.end(), small.begin(), small.end());
    }
  }
  return {nested && counts && identical, std::string("nested: ") + (nested ? "yes" : "no") +
                                             ", exact counts: " + (counts ? "yes" : "no") +
                                             ", byte-identical (rerun, 4 threads): " + (identical ? "yes" : "no")};
}

Outcome criterion8(const FullRun& real) {
  const auto mimed = ScenarioConfig::load(std::string(GRASPAFF_DATA_DIR) + "/scenario_mimed.json");
  const bool reduced = mimed.taxonomy.size() == 12 && !mimed.taxonomy.find("small diameter") && mimed.objects.size() == 16;
  const auto run = full_run(mimed);
  const auto order = ordering(run.report);
  const double m = run.report.summary(Method::CnnOnly).mean;
  const double r = real.report.summary(Method::CnnOnly).mean;
  return {reduced && order.pass && m < r && run.report.total_exclusion_violations() == 0,
          std::string(reduced ? "12 classes, 16 objects; " : "unexpected reduced configuration; ") + order.detail +
              fmt("; cnn_only mimed %.4f", m) + fmt(" < real %.4f", r)};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] criterion %d  %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "fusion matches the naive oracle", criterion1);
  report(2, "identity with full-support uniform affordance", criterion2);
  FullRun real;
  bool have_real = false;
  report(3, "excluding effect over a full evaluation", [&] {
    real = full_run(scenario_real_objects());
    have_real = true;
    return criterion3(real);
  });
  report(4, "method ordering under the real_objects preset", [&] {
    if (!have_real) return Outcome{false, "full evaluation unavailable"};
    return ordering(real.report);
  });
  report(5, "improvement rises with heterogeneity", criterion5);
  report(6, "heterogeneity exactness", criterion6);
  report(7, "nested sampling protocol", criterion7);
  report(8, "reduced mimed scenario", [&] {
    if (!have_real) return Outcome{false, "full evaluation unavailable"};
    return criterion8(real);
  });
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
