#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graphrep/dataset_io.hpp"
#include "graphrep/decomposition.hpp"
#include "graphrep/embedding.hpp"
#include "graphrep/evaluate.hpp"
#include "graphrep/kernels.hpp"

namespace graphrep {

struct DecomposeParams {
  std::string method = "wl";  // wl | sp | graphlet | aw
  std::size_t wl_depth = 2;
  bool include_depth0 = true;
  std::size_t graphlet_size = 7;
  std::size_t graphlet_samples = 100;
  std::size_t walk_length = 10;
  double walk_budget = kDefaultWalkBudget;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
  // Document file extension: wld{H}, spp, glt{k} or awe{l}.
  std::string extension() const;
};

struct TrainParams {
  std::string model = "pvdbow";  // sgns | pvdbow | pvdm
  std::size_t dim = 32;
  std::uint64_t min_count = 0;
  double noise_exponent = 1.0;
  TrainConfig train;

  void validate() const;
};

struct KernelParams {
  std::string type = "rbf";  // linear | rbf | deep
  std::optional<double> gamma;
  std::filesystem::path pattern_embeddings;  // deep only
  std::size_t threads = 1;

  void validate() const;
};

struct EvaluateParams {
  std::size_t folds = 10;
  std::size_t repeats = 10;
  std::size_t k_neighbors = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Everything a full run needs. `model` = "none" skips training; `evaluate_on`
// chooses between the kernel and the learned graph embeddings.
struct PipelineConfig {
  std::filesystem::path input_dir;
  std::string dataset_name;
  std::filesystem::path output_dir;
  DecomposeParams decompose;
  std::string model = "none";
  TrainParams train;
  std::string kernel = "rbf";  // linear | rbf | deep | none
  std::optional<double> gamma;
  std::string evaluate_on = "kernel";  // kernel | embeddings
  EvaluateParams evaluate;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;  // throws ConfigError
  // Resolved settings as `key = value` lines, loadable with --config.
  std::string to_toml() const;
};

struct DecomposeOutput {
  std::string extension;
  std::size_t documents = 0;
  std::size_t vocabulary = 0;
  std::filesystem::path vocab_path;
};

// <dataset>/<gid>.<ext> documents and <dataset>/<ext>.vocab.json.
DecomposeOutput run_decompose(const std::filesystem::path& dataset_dir,
                              const DecomposeParams& params);

// Reads the documents of every manifest entry. Throws InputError listing
// the directory if no document with that extension exists.
std::vector<PatternDocument> load_documents(const std::filesystem::path& dataset_dir,
                                            const std::string& extension);

struct TrainOutput {
  std::filesystem::path embeddings_path;
  std::filesystem::path loss_path;
  TrainResult result;
};

// Writes graph_embeddings.json (pvdbow, pvdm) or pattern_embeddings.json
// (sgns) and loss_trace.csv into `out_dir`.
TrainOutput run_train(const std::filesystem::path& dataset_dir, const std::string& extension,
                      const TrainParams& params, const std::filesystem::path& out_dir);

struct KernelOutput {
  std::filesystem::path kernel_path;
  std::filesystem::path frequencies_path;
  double gamma = 0.0;  // rbf only
  KernelMatrix kernel;
};

// Writes kernel.csv and frequencies.json into `out_dir`.
KernelOutput run_kernel(const std::filesystem::path& dataset_dir, const std::string& extension,
                        const KernelParams& params, const std::filesystem::path& out_dir);

// Evaluates a kernel CSV or a graph-embedding JSON (by file extension)
// against the manifest classes; writes report.json and report.txt.
CvReport run_evaluate(const std::filesystem::path& dataset_dir,
                      const std::filesystem::path& representation, const EvaluateParams& params,
                      const std::filesystem::path& out_dir);

// format -> decompose -> [train] -> [kernel] -> evaluate, then
// resolved_config.toml and artifacts.json (SHA-256 of every other output).
CvReport run_pipeline(const PipelineConfig& config);

}  // namespace graphrep
