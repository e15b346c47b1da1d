#include "graspaff/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "graspaff/error.hpp"
#include "graspaff/heterogeneity.hpp"
#include "svg.hpp"
#include "text_format.hpp"

namespace graspaff {

using detail::format_double;

namespace {

std::size_t method_slot(Method m) {
  return static_cast<std::size_t>(std::find(kAllMethods.begin(), kAllMethods.end(), m) - kAllMethods.begin());
}

MethodSummary summarize(const std::vector<double>& xs) {
  MethodSummary s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

/// Runs body(i) for i in [0, n) on up to `threads` workers; rethrows the first
/// exception by lowest index so failures are deterministic too.
template <typename Body>
void for_each_index(std::size_t n, unsigned threads, Body body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<TrialResult> evaluate_trial(std::size_t t, const TrialInput& in, const ClassPrior& prior,
                                        std::uint64_t master_seed) {
  const auto& records = in.test_set.records();
  struct Priors {
    AffordanceVector varied;
    AffordanceVector uniform;
  };
  std::unordered_map<std::string, Priors> by_object;
  for (const auto& r : records) {
    if (!r.distribution) {
      throw Error(ErrorCode::MissingDistribution, "trial " + std::to_string(t) + ": image '" + r.image_id + "'");
    }
    if (!by_object.count(r.object_name)) {
      by_object.emplace(r.object_name, Priors{in.varied.lookup(r.object_name), in.uniform.lookup(r.object_name)});
    }
  }

  const std::string uniform_purpose = "uniform-only/" + std::to_string(t);
  SeedStream uniform_stream(master_seed, uniform_purpose);

  std::vector<TrialResult> results;
  for (const auto method : kAllMethods) {
    TrialResult res;
    res.trial_index = t;
    res.method = method;
    res.total = records.size();
    res.seed_purpose = method == Method::UniformOnly ? uniform_purpose : "";
    res.decisions.reserve(records.size());
    for (const auto& r : records) {
      const auto& p = by_object.at(r.object_name);
      const DecisionInputs inputs{&*r.distribution, &p.varied, &p.uniform, &prior, &uniform_stream};
      const auto out = decide(method, inputs);
      res.decisions.push_back(out.decision);
      if (out.decision == r.grasp_label) ++res.correct;
      if (out.fallback_used) ++res.fallback_count;
      const bool fused = method == Method::CnnUniform || method == Method::CnnVaried;
      const auto& used = method == Method::CnnUniform ? p.uniform : p.varied;
      if (fused && !out.fallback_used && !used.in_support(out.decision)) ++res.excluded_violations;
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace

const TrialResult& EvaluationReport::result(std::size_t trial, Method method) const {
  return trials.at(trial * kAllMethods.size() + method_slot(method));
}

std::vector<double> EvaluationReport::improvement() const {
  std::vector<double> out;
  for (std::size_t t = 0; t < trial_count; ++t) {
    out.push_back(accuracy(t, Method::CnnVaried) - accuracy(t, Method::CnnUniform));
  }
  return out;
}

MethodSummary EvaluationReport::summary(Method method) const {
  std::vector<double> xs;
  for (std::size_t t = 0; t < trial_count; ++t) xs.push_back(accuracy(t, method));
  return summarize(xs);
}

std::size_t EvaluationReport::total_fallbacks(Method method) const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < trial_count; ++t) n += result(t, method).fallback_count;
  return n;
}

std::size_t EvaluationReport::total_exclusion_violations() const {
  std::size_t n = 0;
  for (const auto& r : trials) n += r.excluded_violations;
  return n;
}

nlohmann::json EvaluationReport::to_json(bool with_decisions) const {
  nlohmann::json summary_j = nlohmann::json::object();
  for (const auto m : kAllMethods) {
    const auto s = summary(m);
    summary_j[std::string(to_string(m))] = {{"mean", s.mean}, {"std", s.std}};
  }
  nlohmann::json rows = nlohmann::json::array();
  const auto imp = improvement();
  for (std::size_t t = 0; t < trial_count; ++t) {
    nlohmann::json results = nlohmann::json::object();
    for (const auto m : kAllMethods) {
      const auto& r = result(t, m);
      nlohmann::json rj{{"accuracy", r.accuracy()},
                        {"correct", r.correct},
                        {"total", r.total},
                        {"fallback_count", r.fallback_count},
                        {"excluded_violations", r.excluded_violations},
                        {"seed", r.seed_purpose}};
      if (with_decisions) rj["decisions"] = r.decisions;
      results[std::string(to_string(m))] = std::move(rj);
    }
    nlohmann::json row{{"trial", t}, {"improvement", imp[t]}, {"results", std::move(results)}};
    if (t < heterogeneity.size()) row["h"] = heterogeneity[t];
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"kind", "comparison"},
                        {"config", config},
                        {"trial_count", trial_count},
                        {"summary", summary_j},
                        {"trials", rows}};
}

EvaluationReport EvaluationReport::from_json(const nlohmann::json& j) {
  EvaluationReport report;
  try {
    report.config = j.value("config", nlohmann::json::object());
    report.trial_count = j.at("trial_count").get<std::size_t>();
    const auto& rows = j.at("trials");
    if (rows.size() != report.trial_count) throw Error(ErrorCode::SchemaViolation, "trial_count disagrees with rows");
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto& row = rows[t];
      if (row.contains("h")) report.heterogeneity.push_back(row["h"].get<double>());
      for (const auto m : kAllMethods) {
        const auto& rj = row.at("results").at(std::string(to_string(m)));
        TrialResult r;
        r.trial_index = t;
        r.method = m;
        r.correct = rj.at("correct").get<std::size_t>();
        r.total = rj.at("total").get<std::size_t>();
        r.fallback_count = rj.value("fallback_count", std::size_t{0});
        r.excluded_violations = rj.value("excluded_violations", std::size_t{0});
        r.seed_purpose = rj.value("seed", std::string());
        if (rj.contains("decisions")) r.decisions = rj["decisions"].get<std::vector<ClassIndex>>();
        report.trials.push_back(std::move(r));
      }
    }
    if (!report.heterogeneity.empty() && report.heterogeneity.size() != report.trial_count) {
      throw Error(ErrorCode::SchemaViolation, "h missing on some trials");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("report: ") + e.what());
  }
  return report;
}

EvaluationReport run_comparison(const std::vector<TrialInput>& trials, const ClassPrior& prior,
                                std::uint64_t master_seed, unsigned threads, nlohmann::json config) {
  std::vector<std::vector<TrialResult>> per_trial(trials.size());
  std::vector<double> h(trials.size());
  for_each_index(trials.size(), threads, [&](std::size_t t) {
    per_trial[t] = evaluate_trial(t, trials[t], prior, master_seed);
    h[t] = heterogeneity(trials[t].varied).h;
  });

  EvaluationReport report;
  config["master_seed"] = master_seed;
  config["prior"] = to_string(prior.source);
  report.config = std::move(config);
  report.trial_count = trials.size();
  report.heterogeneity = std::move(h);
  for (auto& rs : per_trial) {
    for (auto& r : rs) report.trials.push_back(std::move(r));
  }
  return report;
}

EvaluationReport run_comparison(const std::vector<DatasetManifest>& test_sets, const AffordanceDatabase& varied,
                                const AffordanceDatabase& uniform, const ClassPrior& prior,
                                std::uint64_t master_seed, unsigned threads) {
  std::vector<TrialInput> inputs;
  inputs.reserve(test_sets.size());
  for (const auto& ts : test_sets) inputs.push_back({ts, varied, uniform});
  return run_comparison(inputs, prior, master_seed, threads, {{"affordance", "fixed"}});
}

EvaluationReport run_comparison_protocol(const DatasetManifest& pool, const ComparisonProtocol& protocol,
                                         const DatasetManifest* training) {
  if (!pool.has_all_distributions()) {
    throw Error(ErrorCode::MissingDistribution, "test pool '" + pool.name() + "' lacks distributions");
  }
  const DatasetManifest& train = training != nullptr ? *training : pool;
  const auto prior = make_prior(protocol.prior, pool.taxonomy().size(), &train);

  std::optional<AffordanceDatabase> fixed_varied;
  std::optional<AffordanceDatabase> fixed_uniform;
  if (protocol.affordance == AffordanceSource::Training) {
    fixed_varied = build_varied(train);
    fixed_uniform = to_uniform(*fixed_varied);
  }

  std::vector<std::optional<TrialInput>> slots(protocol.trials);
  for_each_index(protocol.trials, protocol.threads, [&](std::size_t t) {
    auto test = test_sample(pool, protocol.per_object, protocol.master_seed, t);
    if (fixed_varied) {
      slots[t].emplace(TrialInput{std::move(test), *fixed_varied, *fixed_uniform});
    } else {
      auto varied = build_varied(test);
      auto uniform = to_uniform(varied);
      slots[t].emplace(TrialInput{std::move(test), std::move(varied), std::move(uniform)});
    }
  });
  std::vector<TrialInput> inputs;
  inputs.reserve(slots.size());
  for (auto& s : slots) inputs.push_back(std::move(*s));

  nlohmann::json config{{"protocol", "five-method comparison"},
                        {"pool", pool.name()},
                        {"trials", protocol.trials},
                        {"per_object", protocol.per_object},
                        {"affordance", protocol.affordance == AffordanceSource::TestSet ? "test-set" : "training"},
                        {"objects", pool.objects().size()},
                        {"classes", pool.taxonomy().size()},
                        {"taxonomy", pool.taxonomy().version()},
                        {"classifier", protocol.classifier}};
  return run_comparison(inputs, prior, protocol.master_seed, protocol.threads, std::move(config));
}

ExternalDistributions::ExternalDistributions(std::vector<DatasetManifest> per_size) : per_size_(std::move(per_size)) {}

Distribution ExternalDistributions::distribution(const SampleRecord& record, std::size_t size_index,
                                                 std::size_t) const {
  if (size_index >= per_size_.size()) {
    throw Error(ErrorCode::MissingDistribution, "no distributions for training size #" + std::to_string(size_index));
  }
  const auto& m = per_size_[size_index];
  const auto pos = m.find(record.image_id);
  if (!pos || !m.records()[*pos].distribution) {
    throw Error(ErrorCode::MissingDistribution, "image '" + record.image_id + "' at training size #" +
                                                    std::to_string(size_index));
  }
  return *m.records()[*pos].distribution;
}

Distribution SimulatedLearningCurve::distribution(const SampleRecord& record, std::size_t,
                                                  std::size_t images_per_grasp) const {
  const auto model = at_training_size(model_, images_per_grasp);
  SeedStream stream(seed_, "simulate/n" + std::to_string(images_per_grasp) + "/" + record.image_id);
  return simulate(record, model, stream);
}

MethodSummary SizeStudyReport::summary(std::size_t size_index) const { return summarize(accuracies.at(size_index)); }

nlohmann::json SizeStudyReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const auto sm = summary(s);
    rows.push_back({{"images_per_grasp", sizes[s]}, {"mean", sm.mean}, {"std", sm.std}, {"accuracies", accuracies[s]}});
  }
  return nlohmann::json{{"kind", "size-study"}, {"source", source}, {"rows", rows}};
}

SizeStudyReport SizeStudyReport::from_json(const nlohmann::json& j) {
  SizeStudyReport r;
  try {
    r.source = j.at("source").get<std::string>();
    for (const auto& row : j.at("rows")) {
      r.sizes.push_back(row.at("images_per_grasp").get<std::size_t>());
      r.accuracies.push_back(row.at("accuracies").get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("size study: ") + e.what());
  }
  return r;
}

SizeStudyReport run_dataset_size_study(const std::vector<DatasetManifest>& nested_training_sets,
                                       const std::vector<DatasetManifest>& test_sets,
                                       const DistributionSource& source) {
  SizeStudyReport report;
  report.source = source.describe();
  for (std::size_t s = 0; s < nested_training_sets.size(); ++s) {
    const auto counts = nested_training_sets[s].label_counts();
    const auto n = *std::max_element(counts.begin(), counts.end());
    report.sizes.push_back(n);
    std::vector<double> accs;
    for (const auto& test : test_sets) {
      std::size_t correct = 0;
      for (const auto& r : test.records()) {
        if (static_cast<ClassIndex>(argmax(source.distribution(r, s, n))) == r.grasp_label) ++correct;
      }
      accs.push_back(test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size()));
    }
    report.accuracies.push_back(std::move(accs));
  }
  return report;
}

nlohmann::json HeterogeneityScatter::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) pts.push_back({{"trial", p.trial_index}, {"h", p.h}, {"improvement", p.improvement}});
  return nlohmann::json{{"kind", "heterogeneity"}, {"rank_correlation", rank_correlation}, {"points", pts}};
}

HeterogeneityScatter HeterogeneityScatter::from_json(const nlohmann::json& j) {
  HeterogeneityScatter out;
  try {
    out.rank_correlation = j.at("rank_correlation").get<double>();
    for (const auto& p : j.at("points")) {
      out.points.push_back({p.at("trial").get<std::size_t>(), p.at("h").get<double>(), p.at("improvement").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("heterogeneity scatter: ") + e.what());
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double rank_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::MismatchedTrialCount, "rank correlation of unequal lengths");
  if (x.size() < 2) return 0.0;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

HeterogeneityScatter run_heterogeneity_analysis(const EvaluationReport& report,
                                                const std::vector<AffordanceDatabase>& varied_dbs) {
  if (varied_dbs.size() != report.trial_count) {
    throw Error(ErrorCode::MismatchedTrialCount, std::to_string(varied_dbs.size()) + " databases for " +
                                                     std::to_string(report.trial_count) + " trials");
  }
  HeterogeneityScatter out;
  const auto imp = report.improvement();
  std::vector<double> hs;
  for (std::size_t t = 0; t < report.trial_count; ++t) {
    const double h = heterogeneity(varied_dbs[t]).h;
    out.points.push_back({t, h, imp[t]});
    hs.push_back(h);
  }
  out.rank_correlation = rank_correlation(hs, imp);
  return out;
}

HeterogeneityScatter run_heterogeneity_analysis(const EvaluationReport& report) {
  if (report.heterogeneity.size() != report.trial_count) {
    throw Error(ErrorCode::MismatchedTrialCount, "report carries " + std::to_string(report.heterogeneity.size()) +
                                                     " h values for " + std::to_string(report.trial_count) +
                                                     " trials");
  }
  HeterogeneityScatter out;
  const auto imp = report.improvement();
  for (std::size_t t = 0; t < report.trial_count; ++t) out.points.push_back({t, report.heterogeneity[t], imp[t]});
  out.rank_correlation = rank_correlation(report.heterogeneity, imp);
  return out;
}

EmitFormat parse_emit_format(std::string_view s) {
  if (s == "csv") return EmitFormat::Csv;
  if (s == "json") return EmitFormat::Json;
  if (s == "svg" || s == "svg_plot") return EmitFormat::Svg;
  throw Error(ErrorCode::SchemaViolation, "format must be csv, json or svg, got '" + std::string(s) + "'");
}

std::string trials_csv(const EvaluationReport& report) {
  std::ostringstream os;
  os << "trial,h";
  for (const auto m : kAllMethods) os << ',' << to_string(m);
  os << ",improvement,fallbacks_cnn_uniform,fallbacks_cnn_varied\n";
  const auto imp = report.improvement();
  for (std::size_t t = 0; t < report.trial_count; ++t) {
    os << t << ',' << (t < report.heterogeneity.size() ? format_double(report.heterogeneity[t]) : "");
    for (const auto m : kAllMethods) os << ',' << format_double(report.accuracy(t, m));
    os << ',' << format_double(imp[t]) << ',' << report.result(t, Method::CnnUniform).fallback_count << ','
       << report.result(t, Method::CnnVaried).fallback_count << '\n';
  }
  return os.str();
}

std::string summary_csv(const EvaluationReport& report) {
  std::ostringstream os;
  os << "method,mean_accuracy,std_accuracy,trials\n";
  for (const auto m : kAllMethods) {
    const auto s = report.summary(m);
    os << to_string(m) << ',' << format_double(s.mean) << ',' << format_double(s.std) << ',' << report.trial_count
       << '\n';
  }
  return os.str();
}

std::vector<std::filesystem::path> emit(const EvaluationReport& report, EmitFormat format,
                                        const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    written.push_back(out_dir / name);
    write_file(written.back(), content);
  };
  switch (format) {
    case EmitFormat::Csv:
      put("trials.csv", trials_csv(report));
      put("summary.csv", summary_csv(report));
      break;
    case EmitFormat::Json:
      put("report.json", report.to_json().dump(2) + "\n");
      break;
    case EmitFormat::Svg: {
      const auto classifier = report.config.value("classifier", std::string());
      const std::string tag = classifier.rfind("synthetic", 0) == 0 ? " (synthetic)" : "";
      std::vector<detail::Bar> bars;
      for (const auto m : kAllMethods) {
        const auto s = report.summary(m);
        bars.push_back({std::string(to_string(m)), s.mean, s.std});
      }
      put("methods.svg", detail::svg_bar_chart("Recognition accuracy by method" + tag, "accuracy", bars, 0.0, 1.0));
      if (report.heterogeneity.size() == report.trial_count) {
        const auto scatter = run_heterogeneity_analysis(report);
        std::vector<detail::Point> pts;
        for (const auto& p : scatter.points) pts.push_back({p.h, p.improvement});
        put("heterogeneity.svg", detail::svg_scatter("Varied minus uniform accuracy vs. heterogeneity" + tag,
                                                     "grasp-type heterogeneity h", "acc(cnn_varied) - acc(cnn_uniform)",
                                                     pts));
      }
      break;
    }
  }
  return written;
}

std::vector<std::filesystem::path> emit(const SizeStudyReport& report, EmitFormat format,
                                        const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    written.push_back(out_dir / name);
    write_file(written.back(), content);
  };
  switch (format) {
    case EmitFormat::Csv: {
      std::ostringstream os;
      os << "images_per_grasp,mean_accuracy,std_accuracy,test_sets\n";
      for (std::size_t s = 0; s < report.sizes.size(); ++s) {
        const auto sm = report.summary(s);
        os << report.sizes[s] << ',' << format_double(sm.mean) << ',' << format_double(sm.std) << ','
           << report.accuracies[s].size() << '\n';
      }
      put("size_study.csv", os.str());
      break;
    }
    case EmitFormat::Json:
      put("size_study.json", report.to_json().dump(2) + "\n");
      break;
    case EmitFormat::Svg: {
      std::vector<detail::Point> pts;
      std::vector<double> errs;
      for (std::size_t s = 0; s < report.sizes.size(); ++s) {
        const auto sm = report.summary(s);
        pts.push_back({static_cast<double>(report.sizes[s]), sm.mean});
        errs.push_back(sm.std);
      }
      put("size_study.svg", detail::svg_line("Classifier accuracy vs. training size (" + report.source + ")",
                                             "images per grasp type", "accuracy", pts, errs, true));
      break;
    }
  }
  return written;
}

std::vector<std::filesystem::path> emit(const HeterogeneityScatter& scatter, EmitFormat format,
                                        const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    written.push_back(out_dir / name);
    write_file(written.back(), content);
  };
  switch (format) {
    case EmitFormat::Csv: {
      std::ostringstream os;
      os << "trial,h,improvement\n";
      for (const auto& p : scatter.points) {
        os << p.trial_index << ',' << format_double(p.h) << ',' << format_double(p.improvement) << '\n';
      }
      os << "# rank_correlation," << format_double(scatter.rank_correlation) << '\n';
      put("heterogeneity.csv", os.str());
      break;
    }
    case EmitFormat::Json:
      put("heterogeneity.json", scatter.to_json().dump(2) + "\n");
      break;
    case EmitFormat::Svg: {
      std::vector<detail::Point> pts;
      for (const auto& p : scatter.points) pts.push_back({p.h, p.improvement});
      put("heterogeneity.svg", detail::svg_scatter("Varied minus uniform accuracy vs. heterogeneity",
                                                   "grasp-type heterogeneity h", "acc(cnn_varied) - acc(cnn_uniform)",
                                                   pts));
      break;
    }
  }
  return written;
}

}  // namespace graspaff
