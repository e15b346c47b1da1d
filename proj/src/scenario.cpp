#include "graspaff/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "graspaff/error.hpp"

namespace graspaff {

namespace {

std::string id_token(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

const std::vector<std::vector<std::string_view>> kSimilarityGroups = {
    {"large diameter", "small diameter", "medium wrap", "adducted thumb", "light tool"},
    {"power sphere", "precision sphere", "tripod"},
    {"palmar pinch", "lateral pinch", "prismatic 2 finger", "prismatic 4 finger", "parallel extension"},
};

int group_of(std::string_view name) {
  for (std::size_t g = 0; g < kSimilarityGroups.size(); ++g) {
    for (const auto n : kSimilarityGroups[g]) {
      if (n == name) return static_cast<int>(g);
    }
  }
  return -1;
}

}  // namespace

std::vector<std::string> ScenarioConfig::object_names() const {
  std::vector<std::string> out;
  for (const auto& [name, grasps] : objects) out.push_back(name);
  return out;
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& [name, grasps] : objects) {
    std::vector<std::string> names;
    for (const auto g : grasps) names.push_back(taxonomy.name(g));
    objs.push_back({{"name", name}, {"grasps", names}});
  }
  return nlohmann::json{{"name", name}, {"preset", preset}, {"taxonomy", taxonomy.to_json()}, {"objects", objs}};
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  try {
    ScenarioConfig config{j.at("name").get<std::string>(), GraspTaxonomy::from_json(j.at("taxonomy")), {},
                          j.value("preset", std::string("real_objects"))};
    for (const auto& o : j.at("objects")) {
      std::vector<ClassIndex> grasps;
      for (const auto& g : o.at("grasps")) grasps.push_back(config.taxonomy.index_of(g.get<std::string>()));
      std::sort(grasps.begin(), grasps.end());
      grasps.erase(std::unique(grasps.begin(), grasps.end()), grasps.end());
      if (grasps.empty()) throw Error(ErrorCode::SchemaViolation, "object without grasp types");
      config.objects.emplace_back(normalize_name(o.at("name").get<std::string>()), std::move(grasps));
    }
    if (j.contains("exclude")) {
      const auto& ex = j["exclude"];
      ExclusionRules rules{ex.value("classes", std::vector<std::string>{}),
                           ex.value("objects", std::vector<std::string>{}),
                           ex.value("single_grasp_objects", false)};
      auto name = config.name;
      auto preset = config.preset;
      return apply_exclusions(config, rules, std::move(name), std::move(preset));
    }
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("scenario: ") + e.what());
  }
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
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

void ScenarioConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

ScenarioConfig apply_exclusions(const ScenarioConfig& config, const ExclusionRules& rules, std::string name,
                                std::string preset) {
  auto taxonomy = config.taxonomy.without(rules.classes, config.taxonomy.version() + "-reduced");
  ScenarioConfig out{std::move(name), taxonomy, {}, std::move(preset)};
  for (const auto& [object, grasps] : config.objects) {
    const bool dropped = std::any_of(rules.objects.begin(), rules.objects.end(),
                                     [&](const std::string& o) { return normalize_name(o) == object; });
    if (dropped) continue;
    std::vector<ClassIndex> kept;
    for (const auto g : grasps) {
      if (auto idx = taxonomy.find(config.taxonomy.name(g))) kept.push_back(*idx);
    }
    if (kept.empty()) continue;
    if (rules.single_grasp_objects && kept.size() < 2) continue;
    out.objects.emplace_back(object, std::move(kept));
  }
  return out;
}

ScenarioConfig scenario_real_objects() {
  auto tax = GraspTaxonomy::default_taxonomy();
  const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
      {"chip can", {"large diameter", "medium wrap", "prismatic 4 finger"}},
      {"cracker box", {"large diameter", "palmar pinch", "prismatic 4 finger", "parallel extension"}},
      {"gelatin box", {"palmar pinch", "lateral pinch", "prismatic 2 finger", "tripod"}},
      {"potted meat can", {"medium wrap", "palmar pinch", "prismatic 4 finger", "tripod"}},
      {"apple", {"power sphere", "palmar pinch", "tripod"}},
      {"banana", {"small diameter", "palmar pinch", "prismatic 2 finger"}},
      {"peach", {"power sphere", "precision sphere", "tripod"}},
      {"pear", {"medium wrap", "power sphere", "precision sphere", "tripod"}},
      {"pitcher", {"medium wrap"}},
      {"bleach cleanser", {"large diameter", "medium wrap", "prismatic 4 finger"}},
      {"glass cleaner", {"large diameter", "small diameter", "medium wrap"}},
      {"wine glass", {"small diameter", "palmar pinch", "tripod"}},
      {"metal bowl", {"precision sphere", "prismatic 4 finger", "parallel extension"}},
      {"mug", {"large diameter", "small diameter", "medium wrap", "precision sphere"}},
      {"abrasive sponge", {"palmar pinch", "prismatic 4 finger", "parallel extension"}},
      {"cooking skillet", {"small diameter"}},
      {"plate", {"lateral pinch", "palmar pinch", "parallel extension"}},
      {"fork", {"adducted thumb", "light tool", "tripod"}},
      {"spoon", {"adducted thumb", "light tool", "tripod", "lateral pinch"}},
      {"knife", {"small diameter", "adducted thumb", "light tool"}},
      {"spatula", {"small diameter", "medium wrap", "adducted thumb", "light tool"}},
  };
  ScenarioConfig config{"real_objects", tax, {}, "real_objects"};
  for (const auto& [object, names] : table) {
    std::vector<ClassIndex> grasps;
    for (const auto& n : names) grasps.push_back(tax.index_of(n));
    std::sort(grasps.begin(), grasps.end());
    config.objects.emplace_back(object, std::move(grasps));
  }
  return config;
}

ExclusionRules mimed_exclusions() {
  return {{"small diameter"}, {"glass cleaner", "wine glass", "abrasive sponge"}, true};
}

ScenarioConfig scenario_mimed() {
  return apply_exclusions(scenario_real_objects(), mimed_exclusions(), "mimed", "mimed");
}

DatasetManifest synthesize_manifest(const ScenarioConfig& config, std::size_t images_per_pair, Split split,
                                    const std::string& id_prefix) {
  std::vector<SampleRecord> records;
  for (const auto& [object, grasps] : config.objects) {
    for (const auto g : grasps) {
      for (std::size_t n = 0; n < images_per_pair; ++n) {
        records.push_back({id_prefix + "/" + id_token(object) + "/" + std::to_string(g) + "/" + std::to_string(n),
                           object, g, split, std::nullopt});
      }
    }
  }
  return DatasetManifest(config.taxonomy, id_prefix, std::move(records));
}

DatasetManifest synthesize_weighted(const ScenarioConfig& config, const std::vector<VectorXd>& weights,
                                    std::size_t per_object, Split split, const std::string& id_prefix) {
  if (weights.size() != config.objects.size()) {
    throw Error(ErrorCode::DimensionMismatch, "need one weight vector per object");
  }
  std::vector<SampleRecord> records;
  for (std::size_t o = 0; o < config.objects.size(); ++o) {
    const auto& [object, grasps] = config.objects[o];
    const VectorXd& w = weights[o];
    if (w.size() != static_cast<Eigen::Index>(config.taxonomy.size())) {
      throw Error(ErrorCode::DimensionMismatch, "weights for '" + object + "' have wrong length");
    }
    const double total = w.sum();
    std::vector<std::size_t> counts(grasps.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < grasps.size(); ++j) {
      const double exact = static_cast<double>(per_object) * w(static_cast<Eigen::Index>(grasps[j])) / total;
      counts[j] = static_cast<std::size_t>(std::floor(exact));
      assigned += counts[j];
      remainders.emplace_back(exact - std::floor(exact), j);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < per_object; ++r, ++assigned) ++counts[remainders[r % remainders.size()].second];
    for (std::size_t j = 0; j < grasps.size(); ++j) {
      for (std::size_t n = 0; n < counts[j]; ++n) {
        records.push_back({id_prefix + "/" + id_token(object) + "/" + std::to_string(grasps[j]) + "/" +
                               std::to_string(n),
                           object, grasps[j], split, std::nullopt});
      }
    }
  }
  return DatasetManifest(config.taxonomy, id_prefix, std::move(records));
}

std::vector<VectorXd> skewed_weights(const ScenarioConfig& config, double skew, SeedStream& stream, double spread) {
  std::vector<VectorXd> out;
  for (const auto& [object, grasps] : config.objects) {
    VectorXd w = VectorXd::Zero(static_cast<Eigen::Index>(config.taxonomy.size()));
    for (const auto g : grasps) w(static_cast<Eigen::Index>(g)) = std::exp(spread * skew * stream.standard_normal());
    out.push_back(w / w.sum());
  }
  return out;
}

ConfusionModel support_aware_model(const ScenarioConfig& scenario, const PresetParams& params, std::string name) {
  const auto& tax = scenario.taxonomy;
  const std::size_t k = tax.size();
  const auto ki = static_cast<Eigen::Index>(k);

  // similarity weight between every pair of classes
  Eigen::MatrixXd sim = Eigen::MatrixXd::Ones(ki, ki);
  for (std::size_t a = 0; a < k; ++a) {
    const int ga = group_of(tax.name(a));
    for (std::size_t b = 0; b < k; ++b) {
      if (ga >= 0 && ga == group_of(tax.name(b))) sim(a, b) += params.group_bonus;
      const bool spheres = (tax.name(a) == "power sphere" && tax.name(b) == "precision sphere") ||
                           (tax.name(a) == "precision sphere" && tax.name(b) == "power sphere");
      if (spheres) sim(a, b) += params.sphere_bonus;
    }
  }

  ConfusionModel model;
  model.name = std::move(name);
  model.k = k;
  model.accuracy = params.accuracy;
  model.concentration = params.concentration;
  model.commitment = params.commitment;
  model.confusable.resize(k);

  // per class: co-occurrence pool u, the rest v, and u's mean share inside the imaged object
  std::vector<VectorXd> us(k), vs(k);
  std::vector<double> inside(k, 0.0), holders(k, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    VectorXd co = VectorXd::Zero(ki);  // number of objects admitting both t and c
    for (const auto& [object, grasps] : scenario.objects) {
      if (std::find(grasps.begin(), grasps.end(), t) == grasps.end()) continue;
      holders[t] += 1.0;
      for (const auto g : grasps) co(static_cast<Eigen::Index>(g)) += 1.0;
    }
    co(ti) = 0.0;
    VectorXd u = VectorXd::Zero(ki), v = VectorXd::Zero(ki);
    for (Eigen::Index c = 0; c < ki; ++c) {
      if (c == ti) continue;
      if (co(c) > 0) {
        u(c) = sim(ti, c) * co(c);
      } else {
        v(c) = sim(ti, c);
      }
    }
    if (u.sum() > 0) u /= u.sum();
    if (v.sum() > 0) v /= v.sum();
    for (const auto& [object, grasps] : scenario.objects) {
      if (std::find(grasps.begin(), grasps.end(), t) == grasps.end()) continue;
      for (const auto g : grasps) inside[t] += u(static_cast<Eigen::Index>(g));
    }
    if (holders[t] > 0) inside[t] /= holders[t];
    us[t] = std::move(u);
    vs[t] = std::move(v);
  }

  // A class asked for out-of-support share s ends up with max(s, 1 - inside). Pick
  // the per-class request so the mean over admitted pairs meets the target.
  const auto realized = [&](double s) {
    double total = 0.0, weight = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      const double share = vs[t].sum() == 0.0 ? 0.0 : std::max(s, 1.0 - inside[t]);
      total += holders[t] * share;
      weight += holders[t];
    }
    return weight > 0 ? total / weight : s;
  };
  double lo = 0.0, hi = params.out_of_support_share;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (realized(mid) > params.out_of_support_share ? hi : lo) = mid;
  }
  const double request = lo;

  for (std::size_t t = 0; t < k; ++t) {
    double beta = 0.0;
    if (vs[t].sum() == 0.0) {
      beta = 1.0;
    } else if (inside[t] > 0.0) {
      beta = std::min(1.0, (1.0 - request) / inside[t]);
    }
    const VectorXd w = beta * us[t] + (1.0 - beta) * vs[t];
    for (Eigen::Index c = 0; c < ki; ++c) {
      if (w(c) > 0) model.confusable[t].push_back({static_cast<ClassIndex>(c), w(c) / w.sum()});
    }
  }
  model.validate();
  return model;
}

PresetParams preset_params(std::string_view name) {
  if (name == "real_objects") return {};
  if (name == "mimed") {
    PresetParams p;
    p.accuracy = 0.5;
    p.sphere_bonus = 6.0;
    return p;
  }
  throw Error(ErrorCode::UnknownPreset, "unknown preset '" + std::string(name) + "'");
}

ConfusionModel scenario_preset(std::string_view name, const ScenarioConfig& scenario) {
  return support_aware_model(scenario, preset_params(name), std::string(name));
}

}  // namespace graspaff
