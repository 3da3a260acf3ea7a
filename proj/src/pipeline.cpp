#include "graphrep/pipeline.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "graphrep/corpus.hpp"
#include "graphrep/error.hpp"
#include "graphrep/hash.hpp"
#include "graphrep/log.hpp"
#include "graphrep/numeric_format.hpp"

namespace graphrep {
namespace {

constexpr const char* kResolvedConfig = "resolved_config.toml";
constexpr const char* kArtifacts = "artifacts.json";

struct ManifestView {
  fs::path base;
  DatasetManifest manifest;
  std::vector<std::string> graph_ids;
  std::vector<int> classes;
};

ManifestView open_manifest(const fs::path& dataset_dir) {
  ManifestView view;
  const auto path = manifest_path_for(dataset_dir);
  view.base = path.parent_path();
  view.manifest = read_manifest(path);
  std::vector<int> raw;
  for (const auto& e : view.manifest.entries) {
    view.graph_ids.push_back(fs::path(e.graph_path).stem().string());
    raw.push_back(e.class_label);
  }
  view.classes = remap_classes(raw).first;
  return view;
}

fs::path document_path(const ManifestView& view, std::size_t i, const std::string& extension) {
  return (view.base / view.manifest.entries[i].graph_path).replace_extension(extension);
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

// Reorders manifest classes to follow `ids`.
std::vector<int> labels_for(const ManifestView& view, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, int> by_id;
  for (std::size_t i = 0; i < view.graph_ids.size(); ++i) {
    by_id.emplace(view.graph_ids[i], view.classes[i]);
  }
  if (ids.size() != by_id.size()) {
    throw DataError("representation has " + std::to_string(ids.size()) +
                    " graphs but the manifest lists " + std::to_string(by_id.size()));
  }
  std::vector<int> labels;
  for (const auto& id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("graph '" + id + "' is not in the manifest");
    labels.push_back(it->second);
  }
  return labels;
}

}  // namespace

void DecomposeParams::validate() const {
  if (method != "wl" && method != "sp" && method != "graphlet" && method != "aw") {
    throw ConfigError("unknown decomposition method '" + method +
                      "' (expected wl, sp, graphlet or aw)");
  }
  if (method == "graphlet" && (graphlet_size < 2 || graphlet_size > 8)) {
    throw ConfigError("graphlet size must be in [2, 8]");
  }
  if (method == "graphlet" && graphlet_samples < 1) throw ConfigError("graphlet samples must be >= 1");
  if (method == "aw" && walk_length < 1) throw ConfigError("walk length must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::string DecomposeParams::extension() const {
  if (method == "wl") return "wld" + std::to_string(wl_depth);
  if (method == "sp") return "spp";
  if (method == "graphlet") return "glt" + std::to_string(graphlet_size);
  if (method == "aw") return "awe" + std::to_string(walk_length);
  throw ConfigError("unknown decomposition method '" + method + "'");
}

void TrainParams::validate() const {
  parse_model_mode(model);
  if (dim < 1) throw ConfigError("embedding dimension must be >= 1");
  if (!(noise_exponent > 0.0)) throw ConfigError("noise exponent must be positive");
  train.validate();
}

void KernelParams::validate() const {
  if (type != "linear" && type != "rbf" && type != "deep") {
    throw ConfigError("unknown kernel '" + type + "' (expected linear, rbf or deep)");
  }
  if (gamma && !(*gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (type == "deep" && pattern_embeddings.empty()) {
    throw ConfigError("the deep kernel needs pattern embeddings");
  }
}

void EvaluateParams::validate() const {
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (k_neighbors < 1) throw ConfigError("k_neighbors must be >= 1");
}

void PipelineConfig::validate() const {
  if (input_dir.empty()) throw ConfigError("input directory is required");
  if (dataset_name.empty()) throw ConfigError("dataset name is required");
  if (output_dir.empty()) throw ConfigError("output directory is required");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  decompose.validate();
  if (model != "none") {
    auto params = train;
    params.model = model;
    params.validate();
  }
  if (kernel != "none" && kernel != "linear" && kernel != "rbf" && kernel != "deep") {
    throw ConfigError("unknown kernel '" + kernel + "'");
  }
  if (kernel == "deep" && model != "sgns") {
    throw ConfigError("the deep kernel needs model = sgns");
  }
  if (gamma && !(*gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (evaluate_on != "kernel" && evaluate_on != "embeddings") {
    throw ConfigError("evaluate-on must be 'kernel' or 'embeddings'");
  }
  if (evaluate_on == "kernel" && kernel == "none") {
    throw ConfigError("evaluate-on = kernel needs a kernel");
  }
  if (evaluate_on == "embeddings" && model != "pvdbow" && model != "pvdm") {
    throw ConfigError("evaluate-on = embeddings needs model pvdbow or pvdm");
  }
  evaluate.validate();
}

std::string PipelineConfig::to_toml() const {
  std::ostringstream out;
  const auto num = [](double v) { return format_double(v); };
  out << "input = " << quoted(input_dir.string()) << '\n'
      << "name = " << quoted(dataset_name) << '\n'
      << "output = " << quoted(output_dir.string()) << '\n'
      << "method = " << quoted(decompose.method) << '\n'
      << "wl-depth = " << decompose.wl_depth << '\n'
      << "include-depth0 = " << (decompose.include_depth0 ? "true" : "false") << '\n'
      << "graphlet-size = " << decompose.graphlet_size << '\n'
      << "graphlet-samples = " << decompose.graphlet_samples << '\n'
      << "walk-length = " << decompose.walk_length << '\n'
      << "budget = " << num(decompose.walk_budget) << '\n'
      << "model = " << quoted(model) << '\n'
      << "dim = " << train.dim << '\n'
      << "min-count = " << train.min_count << '\n'
      << "noise-exponent = " << num(train.noise_exponent) << '\n'
      << "epochs = " << train.train.epochs << '\n'
      << "batch-size = " << train.train.batch_size << '\n'
      << "lr = " << num(train.train.initial_lr) << '\n'
      << "min-lr = " << num(train.train.resolved_min_lr()) << '\n'
      << "negatives = " << train.train.negatives << '\n'
      << "window = " << train.train.window << '\n'
      << "optimizer = \"sgd\"\n"
      << "reduction = " << quoted(std::string(to_string(train.train.reduction))) << '\n'
      << "hogwild = " << (train.train.hogwild ? "true" : "false") << '\n'
      << "kernel = " << quoted(kernel) << '\n';
  if (gamma) {
    out << "gamma = " << num(*gamma) << '\n';
  } else {
    out << "# gamma: median heuristic\n";
  }
  out << "evaluate-on = " << quoted(evaluate_on) << '\n'
      << "folds = " << evaluate.folds << '\n'
      << "repeats = " << evaluate.repeats << '\n'
      << "k-neighbors = " << evaluate.k_neighbors << '\n'
      << "seed = " << seed << '\n'
      << "threads = " << threads << '\n';
  return out.str();
}

DecomposeOutput run_decompose(const fs::path& dataset_dir, const DecomposeParams& params) {
  params.validate();
  const auto view = open_manifest(dataset_dir);
  const auto dataset = load_dataset(manifest_path_for(dataset_dir), params.threads);
  Decomposition result;
  if (params.method == "wl") {
    result = wl_corpus(dataset, params.wl_depth, params.include_depth0, params.threads);
  } else if (params.method == "sp") {
    result = sp_corpus(dataset, params.threads);
  } else if (params.method == "graphlet") {
    result = graphlet_corpus(dataset, params.graphlet_size, params.graphlet_samples, params.seed,
                             params.threads);
  } else {
    result = anonymous_walk_corpus(dataset, params.walk_length, params.walk_budget, params.threads);
  }
  DecomposeOutput out;
  out.extension = params.extension();
  for (std::size_t i = 0; i < result.documents.size(); ++i) {
    write_document(result.documents[i], document_path(view, i, out.extension));
  }
  out.documents = result.documents.size();
  out.vocabulary = result.vocab.size();
  out.vocab_path = fs::path(dataset_dir) / (out.extension + ".vocab.json");
  result.vocab.save_json(out.vocab_path);
  return out;
}

std::vector<PatternDocument> load_documents(const fs::path& dataset_dir,
                                            const std::string& extension) {
  const auto view = open_manifest(dataset_dir);
  std::vector<PatternDocument> docs;
  std::size_t present = 0;
  for (std::size_t i = 0; i < view.graph_ids.size(); ++i) {
    if (fs::is_regular_file(document_path(view, i, extension))) ++present;
  }
  if (present == 0) {
    throw InputError("no '." + extension + "' documents in " + fs::path(dataset_dir).string());
  }
  for (std::size_t i = 0; i < view.graph_ids.size(); ++i) {
    const auto path = document_path(view, i, extension);
    if (!fs::is_regular_file(path)) throw InputError("missing document " + path.string());
    docs.push_back(read_document(path, view.graph_ids[i]));
  }
  return docs;
}

TrainOutput run_train(const fs::path& dataset_dir, const std::string& extension,
                      const TrainParams& params, const fs::path& out_dir) {
  params.validate();
  const auto mode = parse_model_mode(params.model);
  Decomposition docs;
  docs.documents = load_documents(dataset_dir, extension);
  docs.vocab = Vocabulary::build(docs.documents);
  if (params.min_count > 0) docs = prune_min_count(docs, params.min_count);
  if (docs.vocab.empty()) throw InputError("no patterns left to train on");

  const auto& config = params.train;
  NegativeSampler sampler(docs.vocab.counts(), mix_seed(config.seed, 1), params.noise_exponent);
  const auto num_targets = mode == ModelMode::kSgns ? docs.vocab.size() : docs.documents.size();
  auto model = EmbeddingModel::create(mode, num_targets, docs.vocab.size(), params.dim,
                                      mix_seed(config.seed, 2));
  TrainOutput out;
  switch (mode) {
    case ModelMode::kSgns:
      out.result = train(model, build_skipgram_corpus(docs.documents, docs.vocab, config.window),
                         sampler, config);
      break;
    case ModelMode::kPvdbow:
      out.result = train(model, build_pvdbow_corpus(docs.documents, docs.vocab), sampler, config);
      break;
    case ModelMode::kPvdm:
      out.result = train(model, build_pvdm_corpus(docs.documents, docs.vocab, config.window),
                         sampler, config);
      break;
  }
  fs::create_directories(out_dir);
  std::vector<std::string> names;
  if (mode == ModelMode::kSgns) {
    for (PatternId id = 0; id < docs.vocab.size(); ++id) names.push_back(docs.vocab.token(id));
    out.embeddings_path = out_dir / "pattern_embeddings.json";
  } else {
    for (const auto& d : docs.documents) names.push_back(d.graph_id);
    out.embeddings_path = out_dir / "graph_embeddings.json";
  }
  export_embeddings(model.targets, names, out.embeddings_path);
  out.loss_path = out_dir / "loss_trace.csv";
  write_loss_trace(out.result.epoch_loss, out.loss_path);
  return out;
}

KernelOutput run_kernel(const fs::path& dataset_dir, const std::string& extension,
                        const KernelParams& params, const fs::path& out_dir) {
  params.validate();
  const auto documents = load_documents(dataset_dir, extension);
  const auto vocab = Vocabulary::build(documents);
  const auto vectors = frequency_vectors(documents, vocab);
  KernelOutput out;
  if (params.type == "linear") {
    out.kernel = linear_kernel(vectors, params.threads);
  } else if (params.type == "rbf") {
    out.gamma = params.gamma.value_or(median_heuristic_gamma(vectors));
    out.kernel = rbf_kernel(vectors, out.gamma, params.threads);
  } else {
    const auto named = load_embeddings(params.pattern_embeddings);
    Matrix aligned(vocab.size(), named.values.cols(), 0.0);
    std::size_t matched = 0;
    for (std::size_t r = 0; r < named.names.size(); ++r) {
      if (const auto id = vocab.find(named.names[r])) {
        const auto src = named.values.row(r);
        std::copy(src.begin(), src.end(), aligned.row(*id).begin());
        ++matched;
      }
    }
    if (matched == 0) {
      throw DataError("pattern embeddings share no tokens with the '." + extension + "' documents");
    }
    out.kernel = deep_kernel(vectors, aligned, params.threads);
  }
  fs::create_directories(out_dir);
  out.kernel_path = out_dir / "kernel.csv";
  write_kernel_csv(out.kernel, out.kernel_path);
  out.frequencies_path = out_dir / "frequencies.json";
  write_frequency_json(vectors, vocab, out.frequencies_path);
  return out;
}

CvReport run_evaluate(const fs::path& dataset_dir, const fs::path& representation,
                      const EvaluateParams& params, const fs::path& out_dir) {
  params.validate();
  const auto view = open_manifest(dataset_dir);
  CvReport report;
  if (representation.extension() == ".csv") {
    const auto kernel = read_kernel_csv(representation);
    const auto labels = labels_for(view, kernel.graph_ids);
    const auto splits = repeated_folds(labels, params.folds, params.repeats, params.seed);
    report = knn_evaluate(kernel, labels, splits, params.k_neighbors);
  } else if (representation.extension() == ".json") {
    const auto named = load_embeddings(representation);
    const auto labels = labels_for(view, named.names);
    const auto splits = repeated_folds(labels, params.folds, params.repeats, params.seed);
    report = embedding_evaluate(named.values, labels, splits, params.k_neighbors);
  } else {
    throw InputError("cannot evaluate " + representation.string() +
                     ": expected a kernel .csv or an embedding .json");
  }
  report.dataset = view.manifest.dataset_name;
  report.seed = params.seed;
  fs::create_directories(out_dir);
  write_report_json(report, out_dir / "report.json");
  write_text(out_dir / "report.txt", report_table(report));
  return report;
}

CvReport run_pipeline(const PipelineConfig& config) {
  config.validate();
  const auto& out = config.output_dir;
  fs::create_directories(out);
  format_dataset(config.input_dir, config.dataset_name, out, config.threads);
  const auto dataset_dir = out / config.dataset_name;

  auto decompose = config.decompose;
  decompose.seed = config.seed;
  decompose.threads = config.threads;
  const auto decomposed = run_decompose(dataset_dir, decompose);
  log::info("decomposed into " + std::to_string(decomposed.vocabulary) + " patterns");

  const auto results = out / "results";
  fs::create_directories(results);
  std::optional<TrainOutput> trained;
  if (config.model != "none") {
    auto params = config.train;
    params.model = config.model;
    params.train.seed = config.seed;
    trained = run_train(dataset_dir, decomposed.extension, params, results);
  }
  std::optional<KernelOutput> kernel;
  if (config.kernel != "none") {
    KernelParams params;
    params.type = config.kernel;
    params.gamma = config.gamma;
    params.threads = config.threads;
    if (config.kernel == "deep") params.pattern_embeddings = trained->embeddings_path;
    kernel = run_kernel(dataset_dir, decomposed.extension, params, results);
  }
  auto evaluate = config.evaluate;
  evaluate.seed = config.seed;
  const auto representation =
      config.evaluate_on == "kernel" ? kernel->kernel_path : trained->embeddings_path;
  auto report = run_evaluate(dataset_dir, representation, evaluate, results);

  auto resolved = config.to_toml();
  if (kernel && config.kernel == "rbf" && !config.gamma) {
    resolved += "# resolved gamma = " + format_double(kernel->gamma) + "\n";
  }
  write_text(out / kResolvedConfig, resolved);
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();
  for (const auto& [path, digest] : hash_tree(out, {kResolvedConfig, kArtifacts})) {
    artifacts[path] = digest;
  }
  write_text(out / kArtifacts, artifacts.dump(1) + "\n");
  return report;
}

}  // namespace graphrep
