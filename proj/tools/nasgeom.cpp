// nasgeom: training-free architecture scoring from untrained feature geometry.
//
// Exit codes: 0 ok, 1 check failure (failed selfcheck, no measure computed),
// 2 usage or I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nasgeom/nasgeom.hpp"

namespace fs = std::filesystem;
using namespace nasgeom;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsageOrIo = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g_command_line;

struct ProtocolOptions {
  int inits = 3;
  int batches = 1;
  int batch_size = 64;
  std::uint64_t seed = 0;
  int cells = 1;
  int channels = 16;
  int image_size = 32;
  double gain = std::numbers::sqrt2;
  double bn_eps = 1e-5;
  bool zero_bias = false;
  bool per_batch = false;
  bool paper = false;
  unsigned workers = 0;
  std::vector<std::string> dataset;
  bool synthetic = false;
};

struct EstimatorOptions {
  double pca_threshold = 0.99;
  double lpca_alpha = 0.05;
  int corrint_k1 = 10, corrint_k2 = 20, mle_k = 20, mada_k = 20, mom_k = 20, mind_k = 10, knn_k = 5;
  double twonn_discard = 0.1;
  std::uint64_t knn_seed = 0;
};

void add_protocol(CLI::App* app, ProtocolOptions& o) {
  app->add_option("--inits", o.inits, "Kaiming initializations per architecture")->check(CLI::PositiveNumber);
  app->add_option("--batches", o.batches, "Image batches per initialization")->check(CLI::PositiveNumber);
  app->add_option("--batch-size", o.batch_size, "Images per batch")->check(CLI::Range(2, 1 << 20));
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--cells", o.cells, "Cells per stage (N)")->check(CLI::PositiveNumber);
  app->add_option("--channels", o.channels, "Initial channels (C); features are 4C wide")->check(CLI::PositiveNumber);
  app->add_option("--image-size", o.image_size, "Synthetic image height and width (multiple of 4)")->check(CLI::PositiveNumber);
  app->add_option("--gain", o.gain, "Kaiming gain g")->check(CLI::PositiveNumber);
  app->add_option("--bn-eps", o.bn_eps, "Batch-norm epsilon")->check(CLI::PositiveNumber);
  app->add_flag("--zero-bias", o.zero_bias, "Initialize conv biases to zero instead of sampling them");
  app->add_flag("--per-batch", o.per_batch, "Measure each batch separately and average, instead of one concatenated cloud");
  app->add_flag("--paper", o.paper, "Paper-scale protocol: 50 inits, 10 batches of 128, 5 cells per stage");
  app->add_option("--workers", o.workers, "Worker threads (default: NASGEOM_WORKERS or all cores)");
  app->add_option("--dataset", o.dataset, "CIFAR-10 binary batch files")->check(CLI::ExistingFile);
  app->add_flag("--synthetic", o.synthetic, "Use seeded uniform-noise images (default when no dataset)");
}

void add_estimators(CLI::App* app, EstimatorOptions& o) {
  app->add_option("--pca-threshold", o.pca_threshold, "FisherS retained-variance threshold")->check(CLI::Range(1e-9, 1.0));
  app->add_option("--lpca-alpha", o.lpca_alpha, "lPCA eigenvalue ratio threshold");
  app->add_option("--corrint-k1", o.corrint_k1);
  app->add_option("--corrint-k2", o.corrint_k2);
  app->add_option("--mle-k", o.mle_k);
  app->add_option("--mada-k", o.mada_k);
  app->add_option("--mom-k", o.mom_k);
  app->add_option("--mind-k", o.mind_k);
  app->add_option("--knn-k", o.knn_k);
  app->add_option("--knn-seed", o.knn_seed);
  app->add_option("--twonn-discard", o.twonn_discard);
}

EstimatorParams to_params(const EstimatorOptions& o) {
  EstimatorParams p;
  p.fishers_variance_threshold = o.pca_threshold;
  p.lpca_alpha = o.lpca_alpha;
  p.corrint_k1 = o.corrint_k1;
  p.corrint_k2 = o.corrint_k2;
  p.mle_k = o.mle_k;
  p.mada_k = o.mada_k;
  p.mom_k = o.mom_k;
  p.mind_k = o.mind_k;
  p.knn_k = o.knn_k;
  p.knn_seed = o.knn_seed;
  p.twonn_discard = o.twonn_discard;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

ScoreConfig to_config(const ProtocolOptions& o, const EstimatorOptions& e, CLI::App* app) {
  ScoreConfig cfg;
  if (o.paper) cfg = ScoreConfig::paper();
  auto given = [&](const char* name) { return app->count(name) > 0; };
  if (!o.paper || given("--inits")) cfg.inits = o.inits;
  if (!o.paper || given("--batches")) cfg.batches = o.batches;
  if (!o.paper || given("--batch-size")) cfg.batch_size = o.batch_size;
  if (!o.paper || given("--cells")) cfg.network.cells_per_stage = o.cells;
  cfg.master_seed = o.seed;
  cfg.network.initial_channels = o.channels;
  cfg.network.bn_epsilon = o.bn_eps;
  cfg.gain = o.gain;
  cfg.sample_bias = !o.zero_bias;
  cfg.mode = o.per_batch ? CloudMode::per_batch : CloudMode::concatenate;
  cfg.estimators = to_params(e);
  if (o.dataset.empty()) {
    cfg.network.height = cfg.network.width = o.image_size;
  } else {
    cfg.network.height = cfg.network.width = 32;
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  return cfg;
}

std::unique_ptr<DataSource> make_source(const ProtocolOptions& o, const ScoreConfig& cfg, io::RunManifest& manifest) {
  if (!o.dataset.empty() && o.synthetic) throw UsageError("--dataset and --synthetic are mutually exclusive");
  if (o.dataset.empty())
    return std::make_unique<SyntheticImageSource>(ImageShape{3, cfg.network.height, cfg.network.width}, cfg.master_seed);
  std::vector<fs::path> paths(o.dataset.begin(), o.dataset.end());
  for (const auto& p : paths) manifest.inputs.emplace_back(p.string(), io::digest_hex(io::read_file(p)));
  return std::make_unique<DatasetSource>(io::read_cifar(paths), cfg.master_seed, "cifar10");
}

unsigned workers_of(const ProtocolOptions& o) { return o.workers > 0 ? o.workers : default_workers(); }

std::vector<std::string> load_archs(const std::vector<std::string>& inline_archs, const std::string& arch_file, int random_count,
                                    std::uint64_t arch_seed) {
  std::vector<std::string> archs = inline_archs;
  if (!arch_file.empty()) {
    std::istringstream in(io::read_file(arch_file));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line.front() != '#') archs.push_back(line);
    }
  }
  for (int i = 0; i < random_count; ++i) archs.push_back(format_arch_string(random_arch(hash_combine(arch_seed, i))));
  if (archs.empty()) throw UsageError("no architecture given (use --arch, --arch-file or --random)");
  for (auto& a : archs) {
    try {
      a = format_arch_string(parse_arch_string(a));
    } catch (const ArchParseError& e) {
      throw UsageError("malformed architecture '" + a + "': " + e.what());
    }
  }
  return archs;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    io::write_file_atomic(path, text);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<RuleSet> load_rule_sets(const std::vector<std::string>& specs) {
  std::vector<RuleSet> out;
  for (const auto& spec : specs) {
    for (const auto& name : split_list(spec)) {
      if (fs::exists(name)) {
        out.push_back(io::rule_set_from_json(json::parse(io::read_file(name))));
        continue;
      }
      try {
        out.push_back(rule_set_by_name(name));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
  return out;
}

std::vector<ArchScore> load_scores(const std::vector<std::string>& files) {
  std::vector<ArchScore> all;
  for (const auto& f : files) {
    json j;
    try {
      j = json::parse(io::read_file(f));
    } catch (const json::parse_error& e) {
      throw io::FormatError(f + ": " + e.what());
    }
    auto scores = io::scores_from_record(j);
    all.insert(all.end(), scores.begin(), scores.end());
  }
  return all;
}

// Flat key=value config: keys without a [section] apply to the chosen subcommand.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  std::string subcommand;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items)
      if (item.parents.empty() && !subcommand.empty()) item.parents = {subcommand};
    return items;
  }
};

// ---------------------------------------------------------------------------

struct SynthOptions {
  std::string kind = "cube";
  int d = 2;
  int n = 1000;
  int embed = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthOptions& o) {
  if (o.kind == "images") {
    const auto batch = synth_images(o.n, {3, 32, 32}, o.seed);
    io::write_file_atomic(o.out, io::encode_cifar(batch));
    std::cout << "wrote " << o.n << " images to " << o.out << "\n";
    return kOk;
  }
  ManifoldSample m;
  if (o.kind == "cube")
    m = sample_cube(o.d, o.n, o.seed);
  else if (o.kind == "sphere")
    m = sample_sphere(o.d, o.n, o.seed);
  else
    m = sample_gaussian(o.d, o.n, o.seed);
  const int ambient = o.embed > 0 ? o.embed : o.d;
  if (ambient < o.d) throw UsageError("--embed must be >= --d");
  if (ambient > o.d || o.noise > 0.0) m = embed(m, ambient, hash_combine(o.seed, 0xE3B), o.noise);
  io::write_features(o.out, FeatureMatrix{m.data});
  std::cout << "true_dim=" << m.true_dim << " rows=" << m.data.rows() << " cols=" << m.data.cols() << " -> " << o.out << "\n";
  return kOk;
}

struct ArchOptions {
  std::vector<std::string> arch;
  std::string arch_file;
  int random = 0;
  std::uint64_t arch_seed = 0;
};

void add_arch(CLI::App* app, ArchOptions& o, bool allow_random) {
  app->add_option("--arch", o.arch, "Architecture string(s)");
  app->add_option("--arch-file", o.arch_file, "File with one architecture string per line")->check(CLI::ExistingFile);
  if (allow_random) {
    app->add_option("--random", o.random, "Append N random architectures")->check(CLI::NonNegativeNumber);
    app->add_option("--arch-seed", o.arch_seed, "Seed for --random");
  }
}

int cmd_extract(const ArchOptions& a, const ProtocolOptions& p, const EstimatorOptions& e, CLI::App* app, const std::string& out_dir) {
  const auto archs = load_archs(a.arch, a.arch_file, 0, 0);
  if (archs.size() != 1) throw UsageError("extract takes exactly one architecture");
  const auto cfg = to_config(p, e, app);
  io::RunManifest manifest;
  manifest.command = g_command_line;
  manifest.master_seed = cfg.master_seed;
  manifest.config_hash = cfg.hash();
  manifest.config = cfg.canonical();
  manifest.created = io::RunManifest::now_utc();
  const auto source = make_source(p, cfg, manifest);
  const CellSpec cell = parse_arch_string(archs.front());
  fs::create_directories(out_dir);
  std::vector<std::string> files(static_cast<std::size_t>(cfg.inits));
  parallel_for(files.size(), workers_of(p), [&](std::size_t r) {
    const Network net = initialized_network(cell, archs.front(), static_cast<int>(r), cfg);
    const FeatureMatrix cloud = vstack(extract_init_features(net, *source, cfg));
    char name[32];
    std::snprintf(name, sizeof name, "init_%03zu.fmat", r);
    io::write_features(fs::path(out_dir) / name, cloud);
    files[r] = name;
  });
  json m = io::to_json(manifest);
  m["arch"] = archs.front();
  m["data_source"] = source->describe();
  m["files"] = files;
  m["init_seeds"] = json::array();
  for (int r = 0; r < cfg.inits; ++r) m["init_seeds"].push_back(init_seed(cfg.master_seed, archs.front(), r));
  io::write_file_atomic(fs::path(out_dir) / "manifest.json", json{{"schema", io::kSchemaVersion}, {"manifest", m}}.dump(2) + "\n");
  std::cout << "wrote " << cfg.inits << " feature files (" << cfg.batches * cfg.batch_size << "x" << cfg.network.feature_width()
            << ") to " << out_dir << "\n";
  return kOk;
}

int cmd_measure(const std::vector<std::string>& files, const std::string& only, const std::string& label, const EstimatorOptions& e,
                const std::string& out) {
  const auto params = to_params(e);
  const auto names = split_list(only);
  for (const auto& n : names)
    if (!is_measure_name(n)) throw UsageError("unknown measure '" + n + "'");
  io::RunManifest manifest;
  manifest.command = g_command_line;
  manifest.created = io::RunManifest::now_utc();
  ArchScore score;
  score.arch = label.empty() ? fs::path(files.front()).parent_path().filename().string() : label;
  if (score.arch.empty()) score.arch = fs::path(files.front()).stem().string();
  json details = json::array();
  const auto& wanted = names.empty() ? all_measure_names() : names;
  for (const auto& n : wanted) score.measures[n];
  for (std::size_t r = 0; r < files.size(); ++r) {
    const std::string bytes = io::read_file(files[r]);
    manifest.inputs.emplace_back(files[r], io::digest_hex(bytes));
    FeatureMatrix f = fs::path(files[r]).extension() == ".csv" ? io::decode_csv(bytes) : io::decode_fmat(bytes);
    f.validate();
    const auto results = measure_cloud(f, names, params);
    json d = json::object();
    for (const auto& res : results) {
      auto& stat = score.measures[res.name];
      stat.per_init.push_back(res.value);
      const std::string what = "init " + std::to_string(r) + ": " + res.status + (res.error.empty() ? "" : ": " + res.error);
      if (res.status != "ok") {
        if (res.has_value())
          stat.warnings.push_back(what);
        else
          stat.errors.push_back(what);
      }
      if (res.status != "ok" && !res.has_value()) stat.per_init.back() = std::numeric_limits<double>::quiet_NaN();
      json entry = {{"status", res.status}};
      if (!res.error.empty()) entry["error"] = res.error;
      if (!res.diagnostics.empty()) entry["diagnostics"] = res.diagnostics;
      d[res.name] = entry;
    }
    details.push_back({{"file", files[r]}, {"measures", d}});
  }
  bool any = false;
  for (auto& [n, stat] : score.measures) {
    aggregate(stat);
    any = any || stat.has_value();
  }
  for (const auto& rs : default_rules()) {
    bool applicable = true;
    for (const auto& rule : rs.rules) applicable = applicable && score.measures.count(rule.measure) > 0;
    if (applicable) score.verdicts[rs.name] = apply_rules(score, rs).keep;
  }
  json record = io::score_record({score}, manifest);
  record["details"] = details;
  emit(out, record.dump(2) + "\n");
  return any ? kOk : kCheckFailure;
}

int cmd_score(const ArchOptions& a, const ProtocolOptions& p, const EstimatorOptions& e, CLI::App* app, const std::string& only,
              const std::string& out, const std::string& csv, const std::string& rank_by, bool descending) {
  const auto archs = load_archs(a.arch, a.arch_file, a.random, a.arch_seed);
  auto cfg = to_config(p, e, app);
  cfg.measures = split_list(only);
  for (const auto& n : cfg.measures)
    if (!is_measure_name(n)) throw UsageError("unknown measure '" + n + "'");
  io::RunManifest manifest;
  manifest.command = g_command_line;
  manifest.master_seed = cfg.master_seed;
  manifest.config_hash = cfg.hash();
  manifest.config = cfg.canonical();
  manifest.created = io::RunManifest::now_utc();
  const auto source = make_source(p, cfg, manifest);
  auto scores = score_architectures(archs, *source, cfg, workers_of(p));
  if (!rank_by.empty()) {
    if (!is_measure_name(rank_by)) throw UsageError("unknown measure '" + rank_by + "'");
    scores = rank(std::move(scores), rank_by, descending);
  }
  emit(out, io::score_record(scores, manifest).dump(2) + "\n");
  if (!csv.empty()) {
    std::vector<RuleSet> sets;
    for (auto& rs : default_rules()) {
      bool applicable = true;
      for (const auto& rule : rs.rules) applicable = applicable && is_measure_name(rule.measure) &&
                                                     (cfg.measures.empty() || std::count(cfg.measures.begin(), cfg.measures.end(), rule.measure));
      if (applicable) sets.push_back(rs);
    }
    emit(csv, io::scores_csv(scores, sets));
  }
  return kOk;
}

int cmd_filter(const std::vector<std::string>& files, const std::vector<std::string>& rules, const std::string& csv,
               const std::string& json_out) {
  auto scores = load_scores(files);
  const auto sets = load_rule_sets(rules.empty() ? std::vector<std::string>{"avoid-low", "top-band"} : rules);
  std::sort(scores.begin(), scores.end(), [](const ArchScore& x, const ArchScore& y) { return x.arch < y.arch; });
  json verdicts = json::array();
  for (const auto& s : scores) {
    json v = {{"arch", s.arch}};
    for (const auto& rs : sets) {
      const auto verdict = apply_rules(s, rs);
      v[rs.name] = {{"keep", verdict.keep}, {"reasons", verdict.reasons}};
    }
    verdicts.push_back(v);
  }
  emit(csv, io::scores_csv(scores, sets));
  if (!json_out.empty()) emit(json_out, json{{"schema", io::kSchemaVersion}, {"verdicts", verdicts}}.dump(2) + "\n");
  return kOk;
}

int cmd_rank(const std::vector<std::string>& files, const std::string& by, bool descending, const std::vector<std::string>& rules,
             const std::string& csv) {
  if (!is_measure_name(by)) throw UsageError("unknown measure '" + by + "'");
  const auto sets = load_rule_sets(rules);
  const auto ranked = rank(load_scores(files), by, descending);
  emit(csv, io::scores_csv(ranked, sets));
  return kOk;
}

int cmd_selfcheck() {
  const auto results = run_selfcheck();
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-36s %s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
    ok = ok && r.passed;
  }
  std::printf("%s\n", ok ? "selfcheck: all checks passed" : "selfcheck: FAILED");
  return ok ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"nasgeom: score untrained cell-based architectures by feature-space geometry"};
  app.require_subcommand(1);
  app.fallthrough();
  auto config = std::make_shared<SubcommandConfig>();
  app.config_formatter(config);
  app.set_config("--config", "", "Flat key=value file of option defaults; flags override it");
  app.set_version_flag("--version", std::string(kVersion));

  SynthOptions synth_o;
  auto* synth = app.add_subcommand("synth", "Generate ground-truth manifolds or synthetic CIFAR-format images");
  synth->add_option("kind", synth_o.kind, "cube | sphere | gaussian | images")
      ->check(CLI::IsMember({"cube", "sphere", "gaussian", "images"}));
  synth->add_option("--d", synth_o.d, "Intrinsic dimension")->check(CLI::Range(1, 1 << 16));
  synth->add_option("--n", synth_o.n, "Sample count")->check(CLI::Range(2, 1 << 24));
  synth->add_option("--embed", synth_o.embed, "Ambient dimension (random rotation)")->check(CLI::NonNegativeNumber);
  synth->add_option("--noise", synth_o.noise, "Isotropic noise sigma")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", synth_o.seed);
  synth->add_option("--out", synth_o.out, "Output file (.fmat, .csv; .bin for images)")->required();

  ArchOptions extract_a;
  ProtocolOptions extract_p;
  EstimatorOptions extract_e;
  std::string extract_out;
  auto* extract = app.add_subcommand("extract", "Write one feature file per initialization for an architecture");
  add_arch(extract, extract_a, false);
  add_protocol(extract, extract_p);
  extract->add_option("--out", extract_out, "Output directory")->required();

  std::vector<std::string> measure_files;
  std::string measure_only, measure_label, measure_out;
  EstimatorOptions measure_e;
  auto* measure = app.add_subcommand("measure", "Measure feature files (one per initialization) and emit JSON");
  measure->add_option("files", measure_files, "FMAT or CSV feature files")->required()->check(CLI::ExistingFile);
  measure->add_option("--only", measure_only, "Comma-separated subset of measures");
  measure->add_option("--arch", measure_label, "Label recorded as the architecture");
  measure->add_option("--out", measure_out, "Output JSON (default stdout)");
  add_estimators(measure, measure_e);

  ArchOptions score_a;
  ProtocolOptions score_p;
  EstimatorOptions score_e;
  std::string score_only, score_out, score_csv, score_rank;
  bool score_desc = false;
  auto* score = app.add_subcommand("score", "Extract and measure architectures end to end");
  add_arch(score, score_a, true);
  add_protocol(score, score_p);
  add_estimators(score, score_e);
  score->add_option("--only", score_only, "Comma-separated subset of measures");
  score->add_option("--out", score_out, "Output JSON (default stdout)");
  score->add_option("--csv", score_csv, "Also write a CSV table with default rule verdicts");
  score->add_option("--rank-by", score_rank, "Order output by this measure's mean");
  score->add_flag("--desc", score_desc, "Descending order for --rank-by");

  std::vector<std::string> filter_files, filter_rules;
  std::string filter_csv, filter_json;
  auto* filter = app.add_subcommand("filter", "Apply rule sets to score records");
  filter->add_option("files", filter_files, "Score JSON files")->required()->check(CLI::ExistingFile);
  filter->add_option("--rules", filter_rules, "Rule set names (avoid-low, top-band, none) or rule JSON files");
  filter->add_option("--csv", filter_csv, "CSV output (default stdout)");
  filter->add_option("--json", filter_json, "JSON verdict output");

  std::vector<std::string> rank_files, rank_rules;
  std::string rank_by = "fishers", rank_csv;
  bool rank_desc = false;
  auto* rank_cmd = app.add_subcommand("rank", "Order score records by a measure");
  rank_cmd->add_option("files", rank_files, "Score JSON files")->required()->check(CLI::ExistingFile);
  rank_cmd->add_option("--by", rank_by, "Measure to order by");
  rank_cmd->add_flag("--desc", rank_desc, "Descending order");
  rank_cmd->add_option("--rules", rank_rules, "Rule sets whose verdict columns to include");
  rank_cmd->add_option("--csv", rank_csv, "CSV output (default stdout)");

  auto* selfcheck = app.add_subcommand("selfcheck", "Run the bundled oracle checks");

  for (int i = 1; i < argc && config->subcommand.empty(); ++i)
    for (const auto* sub : app.get_subcommands({}))
      if (sub->get_name() == argv[i]) config->subcommand = argv[i];

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageOrIo;
  }

  try {
    if (*synth) return cmd_synth(synth_o);
    if (*extract) return cmd_extract(extract_a, extract_p, extract_e, extract, extract_out);
    if (*measure) return cmd_measure(measure_files, measure_only, measure_label, measure_e, measure_out);
    if (*score) return cmd_score(score_a, score_p, score_e, score, score_only, score_out, score_csv, score_rank, score_desc);
    if (*filter) return cmd_filter(filter_files, filter_rules, filter_csv, filter_json);
    if (*rank_cmd) return cmd_rank(rank_files, rank_by, rank_desc, rank_rules, rank_csv);
    if (*selfcheck) return cmd_selfcheck();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageOrIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageOrIo;
  }
  return kUsageOrIo;
}
