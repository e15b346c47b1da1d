#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspaff/affordance.hpp"
#include "graspaff/fusion.hpp"
#include "graspaff/manifest.hpp"
#include "graspaff/simulator.hpp"

namespace graspaff {

/// Outcome of one method on one test set.
struct TrialResult {
  std::size_t trial_index = 0;
  Method method = Method::CnnOnly;
  std::vector<ClassIndex> decisions;  // one per record, in test-set order (may be dropped on reload)
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t fallback_count = 0;
  std::size_t excluded_violations = 0;  // decisions outside the object's support, excluding fallbacks
  std::string seed_purpose;             // stream the trial's random draws came from

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

struct MethodSummary {
  double mean = 0.0;
  double std = 0.0;  // population std over trials
};

/// Per-trial table for the five-method comparison plus everything derived from it.
struct EvaluationReport {
  nlohmann::json config;
  std::size_t trial_count = 0;
  std::vector<TrialResult> trials;  // trial-major, methods in kAllMethods order
  std::vector<double> heterogeneity;  // h of each trial's varied database

  const TrialResult& result(std::size_t trial, Method method) const;
  double accuracy(std::size_t trial, Method method) const { return result(trial, method).accuracy(); }
  /// acc(cnn_varied) - acc(cnn_uniform) per trial.
  std::vector<double> improvement() const;
  MethodSummary summary(Method method) const;
  std::size_t total_fallbacks(Method method) const;
  std::size_t total_exclusion_violations() const;

  nlohmann::json to_json(bool with_decisions = false) const;
  static EvaluationReport from_json(const nlohmann::json& j);
};

/// One test set with the affordance databases the fused methods consult for it.
struct TrialInput {
  DatasetManifest test_set;
  AffordanceDatabase varied;
  AffordanceDatabase uniform;
};

/// Evaluates all five methods on every trial. All methods in a trial see the same
/// records and the same p(g|i); uniform_only draws from "uniform-only/<trial>".
/// Trials may run on `threads` workers; the report does not depend on it.
/// Throws MissingDistribution or ObjectNotFound; never falls back silently.
EvaluationReport run_comparison(const std::vector<TrialInput>& trials, const ClassPrior& prior,
                                std::uint64_t master_seed, unsigned threads = 1,
                                nlohmann::json config = nlohmann::json::object());

/// Same with one pair of databases shared by every test set.
EvaluationReport run_comparison(const std::vector<DatasetManifest>& test_sets, const AffordanceDatabase& varied,
                                const AffordanceDatabase& uniform, const ClassPrior& prior,
                                std::uint64_t master_seed, unsigned threads = 1);

enum class AffordanceSource {
  TestSet,   // each trial's databases are built from its own test-set labels
  Training,  // one database built from a training manifest
};

struct ComparisonProtocol {
  std::size_t trials = 100;
  std::size_t per_object = 100;
  std::uint64_t master_seed = 0;
  PriorSource prior = PriorSource::Uniform;
  AffordanceSource affordance = AffordanceSource::TestSet;
  unsigned threads = 1;
  std::string classifier = "external";  // recorded in the report, e.g. "synthetic:real_objects"
};

/// Samples `trials` test sets of `per_object` records per object from `pool`
/// (which must carry distributions) on "test-sample/<trial>", builds the
/// databases, and runs the comparison. `training` supplies the database for
/// AffordanceSource::Training and the empirical prior when requested; it
/// defaults to the pool.
EvaluationReport run_comparison_protocol(const DatasetManifest& pool, const ComparisonProtocol& protocol,
                                         const DatasetManifest* training = nullptr);

/// Produces p(g|i) for a record, given which training-set size it is evaluated under.
class DistributionSource {
 public:
  virtual ~DistributionSource() = default;
  virtual Distribution distribution(const SampleRecord& record, std::size_t size_index,
                                    std::size_t images_per_grasp) const = 0;
  virtual std::string describe() const = 0;
};

/// Distributions exported by an external classifier, one manifest per training size.
class ExternalDistributions final : public DistributionSource {
 public:
  explicit ExternalDistributions(std::vector<DatasetManifest> per_size);
  Distribution distribution(const SampleRecord& record, std::size_t size_index,
                            std::size_t images_per_grasp) const override;
  std::string describe() const override { return "external"; }

 private:
  std::vector<DatasetManifest> per_size_;
};

/// Synthetic classifier whose accuracy follows at_training_size(); a record's
/// draw comes from "simulate/n<size>/<image_id>".
class SimulatedLearningCurve final : public DistributionSource {
 public:
  SimulatedLearningCurve(ConfusionModel model, std::uint64_t master_seed) : model_(std::move(model)), seed_(master_seed) {}
  Distribution distribution(const SampleRecord& record, std::size_t size_index,
                            std::size_t images_per_grasp) const override;
  std::string describe() const override { return "simulated:" + model_.name; }

 private:
  ConfusionModel model_;
  std::uint64_t seed_;
};

struct SizeStudyReport {
  std::string source;
  std::vector<std::size_t> sizes;               // images per grasp type
  std::vector<std::vector<double>> accuracies;  // [size][test set], classifier-only accuracy
  MethodSummary summary(std::size_t size_index) const;
  nlohmann::json to_json() const;
  static SizeStudyReport from_json(const nlohmann::json& j);
};

/// Classifier-only accuracy for each nested training set over every test set.
SizeStudyReport run_dataset_size_study(const std::vector<DatasetManifest>& nested_training_sets,
                                       const std::vector<DatasetManifest>& test_sets,
                                       const DistributionSource& source);

struct HeterogeneityPoint {
  std::size_t trial_index = 0;
  double h = 0.0;
  double improvement = 0.0;
};

struct HeterogeneityScatter {
  std::vector<HeterogeneityPoint> points;
  double rank_correlation = 0.0;
  nlohmann::json to_json() const;
  static HeterogeneityScatter from_json(const nlohmann::json& j);
};

/// Spearman rank correlation (average ranks for ties; 0 when either side is constant).
double rank_correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Pairs each trial's h (from its varied database) with acc_varied - acc_uniform.
/// Throws MismatchedTrialCount when the database count differs from the report's.
HeterogeneityScatter run_heterogeneity_analysis(const EvaluationReport& report,
                                                const std::vector<AffordanceDatabase>& varied_dbs);
/// Same, using the h values already recorded in the report.
HeterogeneityScatter run_heterogeneity_analysis(const EvaluationReport& report);

enum class EmitFormat { Csv, Json, Svg };
EmitFormat parse_emit_format(std::string_view s);

/// Writes the report into `out_dir` and returns the written paths. CSV and JSON
/// output is byte-deterministic for a given report. Throws IoFailure.
std::vector<std::filesystem::path> emit(const EvaluationReport& report, EmitFormat format,
                                        const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> emit(const SizeStudyReport& report, EmitFormat format,
                                        const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> emit(const HeterogeneityScatter& scatter, EmitFormat format,
                                        const std::filesystem::path& out_dir);

std::string trials_csv(const EvaluationReport& report);
std::string summary_csv(const EvaluationReport& report);

}  // namespace graspaff
