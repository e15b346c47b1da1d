#include "graspaff/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>


#include "graspaff/error.hpp"

namespace graspaff {

void ConfusionModel::validate() const {
  if (k < 2) throw Error(ErrorCode::InvalidModel, "model needs K >= 2");
  if (!(accuracy > 0.0 && accuracy <= 1.0)) throw Error(ErrorCode::InvalidModel, "accuracy must lie in (0, 1]");
  if (!(commitment >= 0.0 && commitment <= 1.0)) throw Error(ErrorCode::InvalidModel, "commitment must lie in [0, 1]");
  if (!(concentration > 0.0) || !std::isfinite(concentration)) {
    throw Error(ErrorCode::InvalidModel, "concentration must be positive and finite");
  }
  if (confusable.size() != k) throw Error(ErrorCode::InvalidModel, "need one confusable list per class");
  for (ClassIndex t = 0; t < k; ++t) {
    double total = 0.0;
    for (const auto& c : confusable[t]) {
      if (c.target >= k) throw Error(ErrorCode::InvalidModel, "confusable class out of range");
      if (c.target == t) throw Error(ErrorCode::InvalidModel, "class " + std::to_string(t) + " lists itself");
      if (!(c.weight >= 0.0)) throw Error(ErrorCode::InvalidModel, "negative confusable weight");
      total += c.weight;
    }
    const bool needs_residual = accuracy < 1.0;
    if (needs_residual && std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidModel, "confusable weights of class " + std::to_string(t) + " sum to " +
                                               std::to_string(total));
    }
  }
}

VectorXd ConfusionModel::mean(ClassIndex true_class) const {
  if (true_class >= k) throw Error(ErrorCode::DimensionMismatch, "class index outside model");
  VectorXd m = VectorXd::Zero(static_cast<Eigen::Index>(k));
  m(static_cast<Eigen::Index>(true_class)) = accuracy;
  for (const auto& c : confusable[true_class]) m(static_cast<Eigen::Index>(c.target)) += (1.0 - accuracy) * c.weight;
  return m;
}

nlohmann::json ConfusionModel::to_json() const {
  nlohmann::json lists = nlohmann::json::array();
  for (const auto& list : confusable) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : list) row.push_back({{"class", c.target}, {"weight", c.weight}});
    lists.push_back(row);
  }
  return nlohmann::json{{"name", name},          {"synthetic", true},         {"K", k},
                        {"accuracy", accuracy},  {"concentration", concentration}, {"commitment", commitment},
                        {"confusable", lists}};
}

ConfusionModel ConfusionModel::from_json(const nlohmann::json& j) {
  ConfusionModel m;
  try {
    m.name = j.value("name", std::string("custom"));
    m.k = j.at("K").get<std::size_t>();
    m.accuracy = j.at("accuracy").get<double>();
    m.concentration = j.at("concentration").get<double>();
    m.commitment = j.value("commitment", 0.0);
    for (const auto& row : j.at("confusable")) {
      std::vector<Confusion> list;
      for (const auto& c : row) list.push_back({c.at("class").get<ClassIndex>(), c.at("weight").get<double>()});
      m.confusable.push_back(std::move(list));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("confusion model: ") + e.what());
  }
  m.validate();
  return m;
}

ConfusionModel ConfusionModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
  return from_json(j);
}

void ConfusionModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

Distribution simulate(ClassIndex true_class, const ConfusionModel& model, SeedStream& stream) {
  const VectorXd m = model.mean(true_class);
  const Eigen::Index k = m.size();

  // perceived class ~ Categorical(m)
  const double u = stream.uniform01();
  Eigen::Index perceived = k - 1;
  double cumulative = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    cumulative += m(c);
    if (u < cumulative) {
      perceived = c;
      break;
    }
  }
  while (!(m(perceived) > 0.0)) --perceived;  // rounding can leave u past the last positive entry

  const double lambda = model.commitment;
  VectorXd x(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double shape = model.concentration * ((c == perceived ? lambda : 0.0) + (1.0 - lambda) * m(c));
    x(c) = (shape > 0.0 ? stream.gamma(shape) : 0.0) + kSimulatorNoiseFloor;
  }
  return normalize(x);
}

Distribution simulate(const SampleRecord& record, const ConfusionModel& model, SeedStream& stream) {
  return simulate(record.grasp_label, model, stream);
}

DatasetManifest simulate_manifest(const DatasetManifest& manifest, const ConfusionModel& model,
                                  std::uint64_t master_seed, std::string_view stream_prefix) {
  if (model.k != manifest.taxonomy().size()) {
    throw Error(ErrorCode::DimensionMismatch, "model has K=" + std::to_string(model.k) + ", taxonomy has " +
                                                  std::to_string(manifest.taxonomy().size()));
  }
  std::vector<Distribution> out;
  out.reserve(manifest.size());
  const std::string prefix = std::string(stream_prefix) + "/";
  for (const auto& r : manifest.records()) {
    SeedStream stream(master_seed, prefix + r.image_id);
    out.push_back(simulate(r, model, stream));
  }
  return manifest.with_distributions(std::move(out));
}

ConfusionModel at_training_size(const ConfusionModel& model, std::size_t images_per_grasp, double floor,
                                double scale) {
  ConfusionModel out = model;
  const double progress = 1.0 - std::exp(-static_cast<double>(images_per_grasp) / scale);
  const double lo = std::min(model.accuracy, floor);
  out.accuracy = lo + (model.accuracy - lo) * progress;
  out.name = model.name + "@" + std::to_string(images_per_grasp);
  return out;
}

}  // namespace graspaff
