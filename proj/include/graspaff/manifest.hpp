#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graspaff/distribution.hpp"
#include "graspaff/random.hpp"
#include "graspaff/taxonomy.hpp"

namespace graspaff {

enum class Split { Train, Test };

std::string_view to_string(Split split) noexcept;

struct SampleRecord {
  std::string image_id;
  std::string object_name;  // normalized
  ClassIndex grasp_label = 0;
  Split split = Split::Train;
  std::optional<Distribution> distribution;  // p(g|i) for this image, when attached
};

/// Labeled records plus the taxonomy their labels index into. Image ids are unique.
class DatasetManifest {
 public:
  DatasetManifest(GraspTaxonomy taxonomy, std::string name, std::vector<SampleRecord> records);

  const GraspTaxonomy& taxonomy() const noexcept { return taxonomy_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<SampleRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Distinct object names in lexicographic order.
  std::vector<std::string> objects() const;
  /// Number of records per (object, grasp label).
  std::map<std::pair<std::string, ClassIndex>, std::size_t> pair_counts() const;
  /// Number of records per grasp label (length K).
  std::vector<std::size_t> label_counts() const;
  bool has_all_distributions() const;

  std::optional<std::size_t> find(std::string_view image_id) const;

  /// Manifest restricted to the records at `indices` (kept in ascending index order).
  DatasetManifest subset(std::vector<std::size_t> indices, std::string name) const;
  /// Manifest with every record's distribution replaced, keyed by position.
  DatasetManifest with_distributions(std::vector<Distribution> distributions) const;

 private:
  GraspTaxonomy taxonomy_;
  std::string name_;
  std::vector<SampleRecord> records_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

/// Reads the CSV manifest format (header `image_id,object_name,grasp_label,split`).
/// Errors carry the 1-based line number.
DatasetManifest read_manifest(std::istream& in, const GraspTaxonomy& taxonomy, std::string name);
DatasetManifest load_manifest(const std::filesystem::path& path, const GraspTaxonomy& taxonomy);

void write_manifest(std::ostream& out, const DatasetManifest& manifest);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
std::string manifest_to_csv(const DatasetManifest& manifest);

/// Attaches p(g|i) rows from JSONL ({"image_id": ..., "p": [K reals]}). Lines
/// starting with '#' are comments. Rows must reference known image ids and sum
/// to one within kLoadSumTolerance; accepted rows are renormalized.
DatasetManifest read_distributions(std::istream& in, const DatasetManifest& manifest);
DatasetManifest load_distributions(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Writes one JSONL row per record that carries a distribution, in manifest order.
void write_distributions(std::ostream& out, const DatasetManifest& manifest, std::string_view comment = {});
void save_distributions(const std::filesystem::path& path, const DatasetManifest& manifest,
                        std::string_view comment = {});

/// Nested, label-stratified training subsets: one sub-manifest per size, each
/// holding exactly `size` records of every grasp type present, and each one a
/// subset of every larger one. Grasp type g is drawn from the stream
/// "train-sample/<g>" so the result does not depend on `threads`.
std::vector<DatasetManifest> nested_subsample(const DatasetManifest& manifest, const std::vector<std::size_t>& sizes,
                                              std::uint64_t master_seed, unsigned threads = 1);

/// Uniform without-replacement sample of `per_object` records for every object.
DatasetManifest test_sample(const DatasetManifest& manifest, std::size_t per_object, SeedStream& stream);
/// Same, on the stream "test-sample/<trial_index>".
DatasetManifest test_sample(const DatasetManifest& manifest, std::size_t per_object, std::uint64_t master_seed,
                            std::size_t trial_index);

/// Uniform without-replacement sample of `per_grasp` records for every grasp type present.
DatasetManifest test_sample_per_grasp(const DatasetManifest& manifest, std::size_t per_grasp, SeedStream& stream);
DatasetManifest test_sample_per_grasp(const DatasetManifest& manifest, std::size_t per_grasp,
                                      std::uint64_t master_seed, std::size_t trial_index);

}  // namespace graspaff
