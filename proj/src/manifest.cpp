#include "graspaff/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "graspaff/error.hpp"

namespace graspaff {

namespace {

constexpr std::string_view kHeader = "image_id,object_name,grasp_label,split";

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

void write_csv_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (const char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

Split parse_split(std::string_view s, std::size_t line_no) {
  const auto n = normalize_name(s);
  if (n == "train") return Split::Train;
  if (n == "test") return Split::Test;
  throw Error(ErrorCode::SchemaViolation,
              "line " + std::to_string(line_no) + ": split must be train or test, got '" + std::string(s) + "'");
}

/// Draws `count` of `pool` uniformly without replacement (partial Fisher-Yates),
/// returning them in draw order.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool, std::size_t count,
                                                  SeedStream& stream) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(stream.uniform_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

template <typename Key, typename KeyFn, typename NameFn>
DatasetManifest stratified_sample(const DatasetManifest& manifest, std::size_t per_stratum, SeedStream& stream,
                                  KeyFn key_of, NameFn describe, const std::string& name) {
  std::map<Key, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < manifest.size(); ++i) strata[key_of(manifest.records()[i])].push_back(i);
  std::vector<std::size_t> chosen;
  for (auto& [key, pool] : strata) {
    if (pool.size() < per_stratum) {
      throw Error(ErrorCode::InsufficientImages, describe(key) + " has " + std::to_string(pool.size()) +
                                                     " records, " + std::to_string(per_stratum) + " requested");
    }
    auto picked = draw_without_replacement(std::move(pool), per_stratum, stream);
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }
  return manifest.subset(std::move(chosen), name);
}

}  // namespace

std::string_view to_string(Split split) noexcept { return split == Split::Train ? "train" : "test"; }

DatasetManifest::DatasetManifest(GraspTaxonomy taxonomy, std::string name, std::vector<SampleRecord> records)
    : taxonomy_(std::move(taxonomy)), name_(std::move(name)), records_(std::move(records)) {
  const auto k = static_cast<Eigen::Index>(taxonomy_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto& r = records_[i];
    r.object_name = normalize_name(r.object_name);
    if (r.grasp_label >= taxonomy_.size()) {
      throw Error(ErrorCode::UnknownLabel, "record '" + r.image_id + "' has label index " +
                                               std::to_string(r.grasp_label) + " outside taxonomy");
    }
    if (r.distribution && r.distribution->size() != k) {
      throw Error(ErrorCode::DimensionMismatch, "record '" + r.image_id + "' distribution has wrong length");
    }
    if (!by_id_.emplace(r.image_id, i).second) {
      throw Error(ErrorCode::DuplicateImageId, "image id '" + r.image_id + "' appears twice");
    }
  }
}

std::vector<std::string> DatasetManifest::objects() const {
  std::vector<std::string> out;
  for (const auto& r : records_) out.push_back(r.object_name);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<std::pair<std::string, ClassIndex>, std::size_t> DatasetManifest::pair_counts() const {
  std::map<std::pair<std::string, ClassIndex>, std::size_t> counts;
  for (const auto& r : records_) ++counts[{r.object_name, r.grasp_label}];
  return counts;
}

std::vector<std::size_t> DatasetManifest::label_counts() const {
  std::vector<std::size_t> counts(taxonomy_.size(), 0);
  for (const auto& r : records_) ++counts[r.grasp_label];
  return counts;
}

bool DatasetManifest::has_all_distributions() const {
  return std::all_of(records_.begin(), records_.end(), [](const SampleRecord& r) { return r.distribution.has_value(); });
}

std::optional<std::size_t> DatasetManifest::find(std::string_view image_id) const {
  const auto it = by_id_.find(image_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

DatasetManifest DatasetManifest::subset(std::vector<std::size_t> indices, std::string name) const {
  std::sort(indices.begin(), indices.end());
  std::vector<SampleRecord> out;
  out.reserve(indices.size());
  for (const auto i : indices) out.push_back(records_.at(i));
  return DatasetManifest(taxonomy_, std::move(name), std::move(out));
}

DatasetManifest DatasetManifest::with_distributions(std::vector<Distribution> distributions) const {
  if (distributions.size() != records_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "expected one distribution per record");
  }
  auto records = records_;
  for (std::size_t i = 0; i < records.size(); ++i) records[i].distribution = std::move(distributions[i]);
  return DatasetManifest(taxonomy_, name_, std::move(records));
}

DatasetManifest read_manifest(std::istream& in, const GraspTaxonomy& taxonomy, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaViolation, "line 1: missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw Error(ErrorCode::SchemaViolation, "line 1: header must be '" + std::string(kHeader) + "'");
  }
  std::vector<SampleRecord> records;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != 4) {
      throw Error(ErrorCode::SchemaViolation,
                  "line " + std::to_string(line_no) + ": expected 4 fields, got " + std::to_string(fields.size()));
    }
    SampleRecord r;
    r.image_id = fields[0];
    if (r.image_id.empty()) throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(line_no) + ": empty image_id");
    r.object_name = normalize_name(fields[1]);
    if (r.object_name.empty()) {
      throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(line_no) + ": empty object_name");
    }
    const auto label = taxonomy.find(fields[2]);
    if (!label) {
      throw Error(ErrorCode::UnknownLabel,
                  "line " + std::to_string(line_no) + ": grasp type '" + fields[2] + "' not in taxonomy");
    }
    r.grasp_label = *label;
    r.split = parse_split(fields[3], line_no);
    if (const auto [it, fresh] = seen.emplace(r.image_id, line_no); !fresh) {
      throw Error(ErrorCode::DuplicateImageId, "line " + std::to_string(line_no) + ": image id '" + r.image_id +
                                                   "' already used on line " + std::to_string(it->second));
    }
    records.push_back(std::move(r));
  }
  return DatasetManifest(taxonomy, std::move(name), std::move(records));
}

DatasetManifest load_manifest(const std::filesystem::path& path, const GraspTaxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  try {
    return read_manifest(in, taxonomy, path.stem().string());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + std::string(e.what()));
  }
}

void write_manifest(std::ostream& out, const DatasetManifest& manifest) {
  out << kHeader << '\n';
  for (const auto& r : manifest.records()) {
    write_csv_field(out, r.image_id);
    out << ',';
    write_csv_field(out, r.object_name);
    out << ',';
    write_csv_field(out, manifest.taxonomy().name(r.grasp_label));
    out << ',' << to_string(r.split) << '\n';
  }
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  write_manifest(out, manifest);
}

std::string manifest_to_csv(const DatasetManifest& manifest) {
  std::ostringstream out;
  write_manifest(out, manifest);
  return out.str();
}

DatasetManifest read_distributions(std::istream& in, const DatasetManifest& manifest) {
  const auto k = static_cast<Eigen::Index>(manifest.taxonomy().size());
  auto records = manifest.records();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::SchemaViolation, where + e.what());
    }
    if (!row.is_object() || !row.contains("image_id") || !row["image_id"].is_string() || !row.contains("p") ||
        !row["p"].is_array()) {
      throw Error(ErrorCode::SchemaViolation, where + "expected {\"image_id\": string, \"p\": [reals]}");
    }
    const auto id = row["image_id"].get<std::string>();
    const auto pos = manifest.find(id);
    if (!pos) throw Error(ErrorCode::UnknownImageId, where + "image id '" + id + "' not in manifest");
    const auto& p = row["p"];
    VectorXd v(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!p[i].is_number()) throw Error(ErrorCode::SchemaViolation, where + "p must hold numbers");
      v(static_cast<Eigen::Index>(i)) = p[i].get<double>();
    }
    try {
      records[*pos].distribution = from_normalized(v, k);
    } catch (const Error& e) {
      throw Error(e.code(), where + "image id '" + id + "': " + e.what());
    }
  }
  return DatasetManifest(manifest.taxonomy(), manifest.name(), std::move(records));
}

DatasetManifest load_distributions(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  try {
    return read_distributions(in, manifest);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + std::string(e.what()));
  }
}

void write_distributions(std::ostream& out, const DatasetManifest& manifest, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (const auto& r : manifest.records()) {
    if (!r.distribution) continue;
    const auto& v = r.distribution->values();
    nlohmann::json row{{"image_id", r.image_id}, {"p", std::vector<double>(v.data(), v.data() + v.size())}};
    out << row.dump() << '\n';
  }
}

void save_distributions(const std::filesystem::path& path, const DatasetManifest& manifest,
                        std::string_view comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  write_distributions(out, manifest, comment);
}

std::vector<DatasetManifest> nested_subsample(const DatasetManifest& manifest, const std::vector<std::size_t>& sizes,
                                              std::uint64_t master_seed, unsigned threads) {
  if (sizes.empty()) return {};
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw Error(ErrorCode::SchemaViolation, "sizes must be ascending");
  }
  const std::size_t k = manifest.taxonomy().size();
  std::vector<std::vector<std::size_t>> pools(k);
  for (std::size_t i = 0; i < manifest.size(); ++i) pools[manifest.records()[i].grasp_label].push_back(i);
  const std::size_t largest = sizes.back();
  for (std::size_t g = 0; g < k; ++g) {
    if (!pools[g].empty() && pools[g].size() < largest) {
      throw Error(ErrorCode::InsufficientImages, "grasp type '" + manifest.taxonomy().name(g) + "' has " +
                                                     std::to_string(pools[g].size()) + " records, " +
                                                     std::to_string(largest) + " requested");
    }
  }

  // One shuffled prefix per grasp type; every size takes a prefix of it, which is
  // what makes the subsets nested.
  std::vector<std::vector<std::size_t>> orders(k);
  auto draw = [&](std::size_t g) {
    if (pools[g].empty()) return;
    SeedStream stream(master_seed, "train-sample/" + std::to_string(g));
    orders[g] = draw_without_replacement(pools[g], largest, stream);
  };
  if (threads <= 1) {
    for (std::size_t g = 0; g < k; ++g) draw(g);
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t g = t; g < k; g += threads) draw(g);
      });
    }
  }

  std::vector<DatasetManifest> out;
  for (const auto size : sizes) {
    std::vector<std::size_t> chosen;
    for (const auto& order : orders) chosen.insert(chosen.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(size, order.size())));
    out.push_back(manifest.subset(std::move(chosen), manifest.name() + "-n" + std::to_string(size)));
  }
  return out;
}

DatasetManifest test_sample(const DatasetManifest& manifest, std::size_t per_object, SeedStream& stream) {
  return stratified_sample<std::string>(
      manifest, per_object, stream, [](const SampleRecord& r) { return r.object_name; },
      [](const std::string& o) { return "object '" + o + "'"; }, manifest.name() + "-test");
}

DatasetManifest test_sample(const DatasetManifest& manifest, std::size_t per_object, std::uint64_t master_seed,
                            std::size_t trial_index) {
  SeedStream stream(master_seed, "test-sample/" + std::to_string(trial_index));
  return test_sample(manifest, per_object, stream);
}

DatasetManifest test_sample_per_grasp(const DatasetManifest& manifest, std::size_t per_grasp, SeedStream& stream) {
  const auto& tax = manifest.taxonomy();
  return stratified_sample<ClassIndex>(
      manifest, per_grasp, stream, [](const SampleRecord& r) { return r.grasp_label; },
      [&](ClassIndex g) { return "grasp type '" + tax.name(g) + "'"; }, manifest.name() + "-test");
}

DatasetManifest test_sample_per_grasp(const DatasetManifest& manifest, std::size_t per_grasp,
                                      std::uint64_t master_seed, std::size_t trial_index) {
  SeedStream stream(master_seed, "test-sample/" + std::to_string(trial_index));
  return test_sample_per_grasp(manifest, per_grasp, stream);
}

}  // namespace graspaff
