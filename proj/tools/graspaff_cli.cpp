// graspaff command line: affordance databases, sampling, simulation, fusion,
// evaluation and report emission.
//
// Exit codes: 0 success, 2 validation error (malformed input or arguments),
// 3 data error (input well formed but unusable for the request, I/O).

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "graspaff/affordance.hpp"
#include "graspaff/error.hpp"
#include "graspaff/evaluation.hpp"
#include "graspaff/fusion.hpp"
#include "graspaff/heterogeneity.hpp"
#include "graspaff/manifest.hpp"
#include "graspaff/scenario.hpp"
#include "graspaff/simulator.hpp"
#include "graspaff/study.hpp"

namespace fs = std::filesystem;
using namespace graspaff;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitData = 3;

struct Globals {
  std::string taxonomy;
  std::uint64_t seed = 0;
  std::string prior = "uniform";
  std::string out_dir = ".";
  unsigned threads = 1;
};

GraspTaxonomy load_taxonomy(const Globals& g) {
  return g.taxonomy.empty() ? GraspTaxonomy::default_taxonomy() : GraspTaxonomy::load(g.taxonomy);
}

PriorSource prior_of(const Globals& g) { return parse_prior_source(g.prior); }

fs::path out_path(const Globals& g, const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + g.out_dir + ": " + ec.message());
  return fs::path(g.out_dir) / default_name;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
}

/// "real_objects", "mimed", or a scenario file.
ScenarioConfig resolve_scenario(const std::string& s) {
  if (s == "real_objects") return scenario_real_objects();
  if (s == "mimed") return scenario_mimed();
  return ScenarioConfig::load(s);
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw Error(ErrorCode::SchemaViolation, "empty entry in '" + text + "'");
    double v = 0;
    const char* first = item.data() + b;
    const char* last = item.data() + e + 1;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw Error(ErrorCode::SchemaViolation, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

VectorXd to_vector(const std::vector<double>& xs) {
  return Eigen::Map<const VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

void print_written(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << '\n';
}

DatasetManifest load_manifest_with(const Globals& g, const std::string& manifest, const std::string& distributions) {
  auto m = load_manifest(manifest, load_taxonomy(g));
  if (!distributions.empty()) m = load_distributions(distributions, m);
  return m;
}

// ---------------------------------------------------------------- affordance

void add_affordance(CLI::App& app, Globals& g) {
  auto* aff = app.add_subcommand("affordance", "Build, flatten, inspect and validate affordance databases");
  aff->require_subcommand(1);

  struct Build {
    std::string manifest, out, split = "all";
  };
  static Build build;
  auto* b = aff->add_subcommand("build", "Varied database from the label histogram of a manifest");
  b->add_option("--manifest", build.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
  b->add_option("--split", build.split, "Records to use")->check(CLI::IsMember({"train", "test", "all"}));
  b->add_option("--out", build.out, "Output file (default <out-dir>/affordance_varied.json)");
  b->callback([&g] {
    auto m = load_manifest(build.manifest, load_taxonomy(g));
    if (build.split != "all") {
      const Split want = build.split == "train" ? Split::Train : Split::Test;
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.records()[i].split == want) keep.push_back(i);
      }
      m = m.subset(std::move(keep), m.name());
    }
    const auto path = out_path(g, build.out, "affordance_varied.json");
    build_varied(m).save(path);
    std::cout << path.string() << '\n';
  });

  struct Flatten {
    std::string db, out;
  };
  static Flatten flat;
  auto* f = aff->add_subcommand("flatten", "Uniform database with the same supports");
  f->add_option("--db", flat.db, "Varied database JSON")->required()->check(CLI::ExistingFile);
  f->add_option("--out", flat.out, "Output file (default <out-dir>/affordance_uniform.json)");
  f->callback([&g] {
    const auto path = out_path(g, flat.out, "affordance_uniform.json");
    to_uniform(AffordanceDatabase::load(flat.db)).save(path);
    std::cout << path.string() << '\n';
  });

  struct Show {
    std::string db, object;
    bool fallback = false;
  };
  static Show show;
  auto* s = aff->add_subcommand("show", "Print entries and the heterogeneity of a database");
  s->add_option("--db", show.db, "Database JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--object", show.object, "Only this object (matched after name normalization)");
  s->add_flag("--fallback-uniform", show.fallback, "Unknown objects map to the uniform vector over all classes");
  s->callback([] {
    const auto db = AffordanceDatabase::load(show.db);
    const auto& tax = db.taxonomy();
    auto print = [&](const AffordanceVector& e) {
      std::cout << e.object_name << '\n';
      for (const auto g : e.support()) {
        std::printf("  %-20s %.6f\n", tax.name(g).c_str(), e.values[static_cast<Eigen::Index>(g)]);
      }
    };
    if (!show.object.empty()) {
      print(db.lookup(show.object, show.fallback));
      return;
    }
    std::cout << "kind " << to_string(db.kind()) << ", taxonomy " << tax.version() << " (" << tax.size()
              << " classes), " << db.size() << " objects\n";
    for (const auto& [name, e] : db.entries()) print(e);
    if (!db.empty()) std::printf("h = %.6f (population std)\n", heterogeneity(db).h);
  });

  struct Validate {
    std::string db;
  };
  static Validate val;
  auto* v = aff->add_subcommand("validate", "Re-check a (possibly hand-edited) database file");
  v->add_option("--db", val.db, "Database JSON")->required()->check(CLI::ExistingFile);
  v->callback([] {
    const auto problems = validate_file(val.db);
    for (const auto& p : problems) std::cerr << "invalid: " << p << '\n';
    if (!problems.empty()) throw Error(ErrorCode::SchemaViolation, std::to_string(problems.size()) + " problem(s)");
    std::cout << "ok\n";
  });
}

// -------------------------------------------------------------------- sample

void add_sample(CLI::App& app, Globals& g) {
  auto* sample = app.add_subcommand("sample", "Seeded sub-sampling of manifests");
  sample->require_subcommand(1);

  struct Nested {
    std::string manifest;
    std::vector<std::size_t> sizes;
  };
  static Nested nested;
  auto* n = sample->add_subcommand("nested", "Nested training sets, one per size (images per grasp type)");
  n->add_option("--manifest", nested.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
  n->add_option("--sizes", nested.sizes, "Ascending sizes, e.g. 10,50,100,500,1000")->required()->delimiter(',');
  n->callback([&g] {
    const auto m = load_manifest(nested.manifest, load_taxonomy(g));
    const auto sets = nested_subsample(m, nested.sizes, g.seed, g.threads);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto path = out_path(g, "", "nested_n" + std::to_string(nested.sizes[i]) + ".csv");
      save_manifest(path, sets[i]);
      std::cout << path.string() << '\n';
    }
  });

  struct Test {
    std::string manifest;
    std::size_t per_object = 0, per_grasp = 0, count = 1;
  };
  static Test test;
  auto* t = sample->add_subcommand("test", "Test sets sampled per object (or per grasp type)");
  t->add_option("--manifest", test.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
  auto* po = t->add_option("--per-object", test.per_object, "Records per object");
  auto* pg = t->add_option("--per-grasp", test.per_grasp, "Records per grasp type");
  po->excludes(pg);
  t->add_option("--count", test.count, "Number of test sets (index t uses stream test-sample/<t>)");
  t->callback([&g] {
    if (test.per_object == 0 && test.per_grasp == 0) {
      throw Error(ErrorCode::SchemaViolation, "one of --per-object or --per-grasp is required");
    }
    const auto m = load_manifest(test.manifest, load_taxonomy(g));
    for (std::size_t i = 0; i < test.count; ++i) {
      const auto s = test.per_object > 0 ? test_sample(m, test.per_object, g.seed, i)
                                         : test_sample_per_grasp(m, test.per_grasp, g.seed, i);
      const auto path = out_path(g, "", "test_" + std::to_string(i) + ".csv");
      save_manifest(path, s);
      std::cout << path.string() << '\n';
    }
  });
}

// ------------------------------------------------------------------- dataset

void add_dataset(CLI::App& app, Globals& g) {
  auto* dataset = app.add_subcommand("dataset", "Synthetic manifests for a scenario");
  dataset->require_subcommand(1);
  struct Synth {
    std::string scenario = "real_objects", out, split = "test", prefix;
    std::size_t per_pair = 0, per_object = 0;
    double skew = 0.0;
  };
  static Synth synth;
  auto* s = dataset->add_subcommand("synth", "Manifest with fixed counts per (object, grasp) or skewed per object");
  s->add_option("--scenario", synth.scenario, "real_objects, mimed, or a scenario JSON file");
  auto* pp = s->add_option("--per-pair", synth.per_pair, "Records per admitted (object, grasp type) pair");
  auto* po = s->add_option("--per-object", synth.per_object, "Records per object, split by skewed label weights");
  pp->excludes(po);
  s->add_option("--skew", synth.skew, "Label-weight skew for --per-object (0 = equal)");
  s->add_option("--split", synth.split, "Split column value")->check(CLI::IsMember({"train", "test"}));
  s->add_option("--prefix", synth.prefix, "Image id prefix (default: the split)");
  s->add_option("--out", synth.out, "Output CSV (default <out-dir>/<scenario>_<split>.csv)");
  s->callback([&g] {
    const auto sc = resolve_scenario(synth.scenario);
    const Split split = synth.split == "train" ? Split::Train : Split::Test;
    const auto prefix = synth.prefix.empty() ? synth.split : synth.prefix;
    DatasetManifest m = [&] {
      if (synth.per_object > 0) {
        SeedStream ws(g.seed, "pool-weights");
        return synthesize_weighted(sc, skewed_weights(sc, synth.skew, ws), synth.per_object, split, prefix);
      }
      if (synth.per_pair > 0) return synthesize_manifest(sc, synth.per_pair, split, prefix);
      throw Error(ErrorCode::SchemaViolation, "one of --per-pair or --per-object is required");
    }();
    const auto path = out_path(g, synth.out, sc.name + "_" + synth.split + ".csv");
    save_manifest(path, m);
    if (sc.taxonomy.names() != load_taxonomy(g).names()) {
      const auto tax_path = fs::path(path).replace_extension(".taxonomy.json");
      sc.taxonomy.save(tax_path);
      std::cerr << "note: scenario taxonomy differs from --taxonomy; written to " << tax_path.string() << '\n';
    }
    std::cout << path.string() << '\n';
  });
}

// ------------------------------------------------------------------ simulate

ConfusionModel resolve_model(const std::string& model_file, const std::string& preset, const std::string& scenario) {
  if (!model_file.empty()) {
    auto m = ConfusionModel::load(model_file);
    m.validate();
    return m;
  }
  preset_params(preset);  // rejects unknown names before any file lookup
  const auto sc = resolve_scenario(scenario.empty() ? preset : scenario);
  return scenario_preset(preset, sc);
}

void add_simulate(CLI::App& app, Globals& g) {
  struct Sim {
    std::string manifest, model, preset = "real_objects", scenario, out, model_out;
  };
  static Sim sim;
  auto* s = app.add_subcommand("simulate", "Synthetic classifier outputs p(g|i) as distributions JSONL");
  s->add_option("--manifest", sim.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
  auto* mf = s->add_option("--model", sim.model, "Confusion model JSON")->check(CLI::ExistingFile);
  s->add_option("--preset", sim.preset, "Preset when no --model is given")->excludes(mf);
  s->add_option("--scenario", sim.scenario, "Scenario the preset is shaped on (default: the preset's own)")->excludes(mf);
  s->add_option("--out", sim.out, "Output JSONL (default <out-dir>/distributions.jsonl)");
  s->add_option("--save-model", sim.model_out, "Also write the model used");
  s->callback([&g] {
    const auto model = resolve_model(sim.model, sim.preset, sim.scenario);
    const auto m = load_manifest(sim.manifest, load_taxonomy(g));
    const auto simulated = simulate_manifest(m, model, g.seed);
    const auto path = out_path(g, sim.out, "distributions.jsonl");
    save_distributions(path, simulated, "synthetic:" + model.name + " seed=" + std::to_string(g.seed));
    if (!sim.model_out.empty()) model.save(sim.model_out);
    std::cout << path.string() << '\n';
  });
}

// ---------------------------------------------------------------------- fuse

void add_fuse(CLI::App& app, Globals& g) {
  struct Fuse {
    std::string cnn, object, db, uniform_db, method = "cnn_varied", manifest, distributions, out;
  };
  static Fuse fz;
  auto* f = app.add_subcommand("fuse", "Combine p(g|i) with an object's affordance and decide");
  auto* cnn = f->add_option("--cnn", fz.cnn, "Comma-separated p(g|i) for a single decision");
  f->add_option("--object", fz.object, "Object name for --cnn")->needs(cnn);
  f->add_option("--db", fz.db, "Affordance database (varied for cnn_varied, either for cnn_uniform)")
      ->check(CLI::ExistingFile);
  f->add_option("--uniform-db", fz.uniform_db, "Uniform database (default: flattened --db)")->check(CLI::ExistingFile);
  f->add_option("--method", fz.method, "Decision method")
      ->check(CLI::IsMember({"cnn_only", "uniform_only", "varied_only", "cnn_uniform", "cnn_varied"}));
  auto* man = f->add_option("--manifest", fz.manifest, "Batch mode: manifest CSV")->excludes(cnn);
  f->add_option("--distributions", fz.distributions, "Batch mode: distributions JSONL")->needs(man);
  f->add_option("--out", fz.out, "Batch output CSV (default <out-dir>/decisions.csv)");
  f->callback([&g] {
    const Method method = parse_method(fz.method);
    std::optional<AffordanceDatabase> varied, uniform;
    if (!fz.db.empty()) {
      varied = AffordanceDatabase::load(fz.db);
      uniform = fz.uniform_db.empty() ? to_uniform(*varied) : AffordanceDatabase::load(fz.uniform_db);
    }
    const GraspTaxonomy tax = varied ? varied->taxonomy() : load_taxonomy(g);
    std::optional<DatasetManifest> prior_manifest;
    if (prior_of(g) == PriorSource::Empirical) {
      if (fz.manifest.empty()) throw Error(ErrorCode::EmptyManifest, "--prior empirical needs --manifest");
      prior_manifest = load_manifest(fz.manifest, tax);
    }
    const auto prior = make_prior(prior_of(g), tax.size(), prior_manifest ? &*prior_manifest : nullptr);
    SeedStream stream(g.seed, "uniform-only/cli");

    auto decide_one = [&](const Distribution* p, const std::string& object) {
      std::optional<AffordanceVector> v, u;
      if (varied) {
        v = varied->lookup(object);
        u = uniform->lookup(object);
      }
      return decide(method, DecisionInputs{p, v ? &*v : nullptr, u ? &*u : nullptr, &prior, &stream});
    };

    if (!fz.cnn.empty()) {
      const auto p = normalize(to_vector(parse_reals(fz.cnn)), static_cast<Eigen::Index>(tax.size()));
      const auto r = decide_one(&p, fz.object);
      nlohmann::json out{{"method", to_string(r.method)},
                         {"decision", r.decision},
                         {"grasp_type", tax.name(r.decision)},
                         {"fallback_used", r.fallback_used},
                         {"posterior", std::vector<double>(r.posterior.values().data(),
                                                           r.posterior.values().data() + r.posterior.size())}};
      std::cout << out.dump() << '\n';
      return;
    }
    if (fz.manifest.empty()) throw Error(ErrorCode::MissingInput, "give --cnn, or --manifest with --distributions");
    auto m = load_manifest(fz.manifest, tax);
    if (!fz.distributions.empty()) m = load_distributions(fz.distributions, m);
    std::ostringstream csv;
    csv << "image_id,object_name,grasp_label,decision,fallback_used\n";
    std::size_t correct = 0;
    for (const auto& r : m.records()) {
      const Distribution* p = r.distribution ? &*r.distribution : nullptr;
      const auto res = decide_one(p, r.object_name);
      correct += res.decision == r.grasp_label;
      csv << r.image_id << ',' << r.object_name << ',' << tax.name(r.grasp_label) << ',' << tax.name(res.decision)
          << ',' << (res.fallback_used ? 1 : 0) << '\n';
    }
    const auto path = out_path(g, fz.out, "decisions.csv");
    std::ofstream(path, std::ios::binary) << csv.str();
    std::cout << path.string() << '\n';
    std::printf("accuracy %.6f (%zu/%zu)\n", m.empty() ? 0.0 : static_cast<double>(correct) / m.size(), correct,
                m.size());
  });
}

// ------------------------------------------------------------------ evaluate

void write_report_files(const Globals& g, const EvaluationReport& report) {
  const fs::path dir = g.out_dir;
  std::vector<fs::path> written;
  for (const auto fmt : {EmitFormat::Json, EmitFormat::Csv}) {
    const auto w = emit(report, fmt, dir);
    written.insert(written.end(), w.begin(), w.end());
  }
  print_written(written);
  for (const auto m : kAllMethods) {
    const auto s = report.summary(m);
    std::printf("%-13s mean %.4f  std %.4f\n", std::string(to_string(m)).c_str(), s.mean, s.std);
  }
}

void add_evaluate(CLI::App& app, Globals& g) {
  auto* ev = app.add_subcommand("evaluate", "Run the evaluation protocols");
  ev->require_subcommand(1);

  struct Compare {
    std::string manifest, distributions, training, affordance = "test-set", scenario, preset;
    std::size_t trials = 100, per_object = 100, pool_per_object = 1000;
    double skew = 0.5;
  };
  static Compare cmp;
  auto* c = ev->add_subcommand("compare", "Five-method comparison over seeded test sets");
  auto* man = c->add_option("--manifest", cmp.manifest, "Test pool manifest CSV")->check(CLI::ExistingFile);
  c->add_option("--distributions", cmp.distributions, "Distributions JSONL for the pool")
      ->needs(man)
      ->check(CLI::ExistingFile);
  c->add_option("--training", cmp.training, "Training manifest (affordance=training, empirical prior)")
      ->check(CLI::ExistingFile);
  c->add_option("--affordance", cmp.affordance, "Where databases come from")
      ->check(CLI::IsMember({"test-set", "training"}));
  auto* sc = c->add_option("--scenario", cmp.scenario, "Synthetic mode: real_objects, mimed, or a scenario file")
                 ->excludes(man);
  c->add_option("--preset", cmp.preset, "Synthetic mode preset (default: the scenario's)")->needs(sc);
  c->add_option("--pool-per-object", cmp.pool_per_object, "Synthetic mode pool size per object")->needs(sc);
  c->add_option("--skew", cmp.skew, "Synthetic mode label skew of the pool")->needs(sc);
  c->add_option("--trials", cmp.trials, "Number of test sets");
  c->add_option("--per-object", cmp.per_object, "Records per object in each test set");
  c->callback([&g] {
    ComparisonProtocol p;
    p.trials = cmp.trials;
    p.per_object = cmp.per_object;
    p.master_seed = g.seed;
    p.prior = prior_of(g);
    p.threads = g.threads;
    p.affordance = cmp.affordance == "training" ? AffordanceSource::Training : AffordanceSource::TestSet;
    std::optional<DatasetManifest> pool, training;
    if (!cmp.scenario.empty()) {
      const auto scenario = resolve_scenario(cmp.scenario);
      const auto model = scenario_preset(cmp.preset.empty() ? scenario.preset : cmp.preset, scenario);
      pool = synthetic_pool(scenario, model, cmp.pool_per_object, cmp.skew, g.seed);
      p.classifier = "synthetic:" + model.name;
    } else if (!cmp.manifest.empty()) {
      if (cmp.distributions.empty()) throw Error(ErrorCode::MissingDistribution, "--distributions is required");
      pool = load_manifest_with(g, cmp.manifest, cmp.distributions);
      std::ifstream in(cmp.distributions);
      std::string first;
      if (std::getline(in, first) && first.rfind("# ", 0) == 0) p.classifier = first.substr(2);
    } else {
      throw Error(ErrorCode::MissingInput, "give --manifest/--distributions or --scenario");
    }
    if (!cmp.training.empty()) training = load_manifest(cmp.training, pool->taxonomy());
    if (p.affordance == AffordanceSource::Training && !training) {
      throw Error(ErrorCode::MissingInput, "--affordance training needs --training");
    }
    write_report_files(g, run_comparison_protocol(*pool, p, training ? &*training : nullptr));
  });

  struct SizeStudy {
    std::string train, test_pool, scenario = "real_objects", preset;
    std::vector<std::size_t> sizes{10, 50, 100, 500, 1000};
    std::vector<std::string> distributions;
    std::size_t test_sets = 10, per_grasp = 100;
  };
  static SizeStudy ss;
  auto* s = ev->add_subcommand("size-study", "Classifier accuracy against training-set size");
  s->add_option("--train", ss.train, "Training manifest CSV")->required()->check(CLI::ExistingFile);
  s->add_option("--test-pool", ss.test_pool, "Test pool manifest CSV")->required()->check(CLI::ExistingFile);
  s->add_option("--sizes", ss.sizes, "Ascending images per grasp type")->delimiter(',');
  s->add_option("--test-sets", ss.test_sets, "Number of test sets");
  s->add_option("--per-grasp", ss.per_grasp, "Test records per grasp type");
  auto* ext = s->add_option("--distributions", ss.distributions,
                            "External distributions JSONL per size, in --sizes order")
                  ->delimiter(',');
  s->add_option("--preset", ss.preset, "Simulated learning curve preset (default: the scenario's)")->excludes(ext);
  s->add_option("--scenario", ss.scenario, "Scenario the preset is shaped on")->excludes(ext);
  s->callback([&g] {
    const auto tax = load_taxonomy(g);
    const auto train = load_manifest(ss.train, tax);
    const auto pool = load_manifest(ss.test_pool, tax);
    const auto nested = nested_subsample(train, ss.sizes, g.seed, g.threads);
    std::vector<DatasetManifest> tests;
    for (std::size_t t = 0; t < ss.test_sets; ++t) tests.push_back(test_sample_per_grasp(pool, ss.per_grasp, g.seed, t));
    SizeStudyReport report;
    if (!ss.distributions.empty()) {
      if (ss.distributions.size() != ss.sizes.size()) {
        throw Error(ErrorCode::MismatchedTrialCount, "need one distributions file per size");
      }
      std::vector<DatasetManifest> per_size;
      for (const auto& d : ss.distributions) per_size.push_back(load_distributions(d, pool));
      report = run_dataset_size_study(nested, tests, ExternalDistributions(std::move(per_size)));
    } else {
      const auto scenario = resolve_scenario(ss.scenario);
      const auto model = scenario_preset(ss.preset.empty() ? scenario.preset : ss.preset, scenario);
      report = run_dataset_size_study(nested, tests, SimulatedLearningCurve(model, g.seed));
    }
    std::vector<fs::path> written;
    for (const auto fmt : {EmitFormat::Json, EmitFormat::Csv}) {
      const auto w = emit(report, fmt, g.out_dir);
      written.insert(written.end(), w.begin(), w.end());
    }
    print_written(written);
    for (std::size_t i = 0; i < report.sizes.size(); ++i) {
      const auto sm = report.summary(i);
      std::printf("n=%-6zu mean %.4f  std %.4f\n", report.sizes[i], sm.mean, sm.std);
    }
  });

  struct Het {
    std::string report, scenario, preset;
    std::vector<std::string> dbs;
    std::size_t databases = 100, per_object = 100;
    double max_skew = 1.0;
  };
  static Het het;
  auto* h = ev->add_subcommand("heterogeneity", "Improvement of varied over uniform against heterogeneity h");
  auto* rep = h->add_option("--report", het.report, "Comparison report JSON")->check(CLI::ExistingFile);
  h->add_option("--dbs", het.dbs, "Varied database per trial, in trial order (default: h stored in the report)")
      ->delimiter(',')
      ->needs(rep);
  auto* sc2 = h->add_option("--scenario", het.scenario, "Graded-skew mode: real_objects, mimed, or a scenario file")
                  ->excludes(rep);
  h->add_option("--preset", het.preset, "Graded-skew mode preset (default: the scenario's)")->needs(sc2);
  h->add_option("--databases", het.databases, "Graded-skew mode: number of databases")->needs(sc2);
  h->add_option("--per-object", het.per_object, "Graded-skew mode: records per object")->needs(sc2);
  h->add_option("--max-skew", het.max_skew, "Graded-skew mode: largest skew")->needs(sc2);
  h->callback([&g] {
    HeterogeneityScatter scatter;
    if (!het.report.empty()) {
      const auto report = EvaluationReport::from_json(read_json(het.report));
      if (het.dbs.empty()) {
        scatter = run_heterogeneity_analysis(report);
      } else {
        std::vector<AffordanceDatabase> dbs;
        for (const auto& d : het.dbs) dbs.push_back(AffordanceDatabase::load(d));
        scatter = run_heterogeneity_analysis(report, dbs);
      }
    } else if (!het.scenario.empty()) {
      const auto scenario = resolve_scenario(het.scenario);
      GradedSkewStudy st;
      st.databases = het.databases;
      st.per_object = het.per_object;
      st.max_skew = het.max_skew;
      st.master_seed = g.seed;
      st.prior = prior_of(g);
      st.threads = g.threads;
      const auto report =
          run_graded_skew_study(scenario, scenario_preset(het.preset.empty() ? scenario.preset : het.preset, scenario), st);
      write_report_files(g, report);
      scatter = run_heterogeneity_analysis(report);
    } else {
      throw Error(ErrorCode::MissingInput, "give --report or --scenario");
    }
    std::vector<fs::path> written;
    for (const auto fmt : {EmitFormat::Json, EmitFormat::Csv}) {
      const auto w = emit(scatter, fmt, g.out_dir);
      written.insert(written.end(), w.begin(), w.end());
    }
    print_written(written);
    std::printf("rank correlation %.4f over %zu trials\n", scatter.rank_correlation, scatter.points.size());
  });
}

// -------------------------------------------------------------------- report

void add_report(CLI::App& app, Globals& g) {
  auto* report = app.add_subcommand("report", "Render saved reports");
  report->require_subcommand(1);
  struct Emit {
    std::string report;
    std::vector<std::string> formats{"csv", "json", "svg"};
  };
  static Emit em;
  auto* e = report->add_subcommand("emit", "Write CSV, JSON and/or SVG for a comparison, size-study or heterogeneity report");
  e->add_option("--report", em.report, "Report JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--format", em.formats, "csv, json, svg_plot (repeatable or comma-separated)")->delimiter(',');
  e->callback([&g] {
    const auto j = read_json(em.report);
    const auto kind = j.value("kind", std::string());
    std::vector<fs::path> written;
    for (const auto& f : em.formats) {
      const auto fmt = parse_emit_format(f);
      std::vector<fs::path> w;
      if (kind == "comparison") {
        w = emit(EvaluationReport::from_json(j), fmt, g.out_dir);
      } else if (kind == "size-study") {
        w = emit(SizeStudyReport::from_json(j), fmt, g.out_dir);
      } else if (kind == "heterogeneity") {
        w = emit(HeterogeneityScatter::from_json(j), fmt, g.out_dir);
      } else {
        throw Error(ErrorCode::SchemaViolation, "unknown report kind '" + kind + "'");
      }
      written.insert(written.end(), w.begin(), w.end());
    }
    print_written(written);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuse grasp-type classifier outputs with object affordance priors and evaluate the result"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--taxonomy", g.taxonomy, "Taxonomy JSON (default: built-in 13-class reconstruction)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master seed for every derived stream");
  app.add_option("--prior", g.prior, "Class prior p(g)")->check(CLI::IsMember({"uniform", "empirical"}));
  app.add_option("--out-dir", g.out_dir, "Directory for outputs");
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")->check(CLI::Range(1u, 256u));

  add_affordance(app, g);
  add_sample(app, g);
  add_dataset(app, g);
  add_simulate(app, g);
  add_fuse(app, g);
  add_evaluate(app, g);
  add_report(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_validation_error(e.code()) ? kExitValidation : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
