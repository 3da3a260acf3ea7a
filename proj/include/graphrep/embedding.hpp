#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "graphrep/corpus.hpp"

namespace graphrep {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ModelMode { kSgns, kPvdbow, kPvdm };

std::string_view to_string(ModelMode mode);
ModelMode parse_model_mode(std::string_view name);

// `targets` holds one row per pattern (SGNS) or per graph (PV-DBOW, PV-DM).
// `contexts` holds the output vector of every pattern. PV-DM also keeps
// input vectors for the patterns of its context window in `words`.
struct EmbeddingModel {
  ModelMode mode = ModelMode::kPvdbow;
  std::size_t dim = 0;
  Matrix targets;
  Matrix contexts;
  Matrix words;

  // Input rows uniform in [-0.5/dim, 0.5/dim]; `contexts` all zero.
  static EmbeddingModel create(ModelMode mode, std::size_t num_targets,
                               std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;
};

// A minibatch. Per item: a target row, a positive pattern, `negatives_per_item`
// noise patterns and, in PV-DM, `2 * window` context patterns (kPad masked).
struct Batch {
  std::size_t negatives_per_item = 0;
  std::size_t window = 0;
  std::vector<std::uint32_t> targets;
  std::vector<PatternId> positives;
  std::vector<PatternId> negatives;
  std::vector<PatternId> windows;

  std::size_t size() const { return targets.size(); }
  void clear();
};

// Accumulated gradient rows of one matrix.
class RowGradients {
 public:
  explicit RowGradients(std::size_t dim = 0) : dim_(dim) {}

  std::span<double> at(std::uint32_t row);
  std::span<const std::uint32_t> rows() const { return rows_; }
  std::span<const double> gradient(std::size_t slot) const {
    return {values_.data() + slot * dim_, dim_};
  }
  const double* find(std::uint32_t row) const;
  // Number of at() calls that touched this slot.
  double hits(std::size_t slot) const { return static_cast<double>(hits_[slot]); }
  void clear();

 private:
  std::size_t dim_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::size_t> hits_;
  std::vector<double> values_;
  std::unordered_map<std::uint32_t, std::size_t> slot_;
};

struct BatchGradients {
  double loss = 0.0;  // summed over the batch
  RowGradients targets;
  RowGradients contexts;
  RowGradients words;
};

// loss = -sum_items [ log s(u.v+) + sum_n log s(-u.v-_n) ] with u the target
// row (PV-DM: mean of the graph row and the unmasked window rows) and the
// exact gradient of that expression on every touched row. Throws
// TrainingError on non-finite inputs.
BatchGradients batch_loss_and_grads(const EmbeddingModel& model, const Batch& batch);

enum class Optimizer { kSgd };
Optimizer parse_optimizer(std::string_view name);

// How a batch's accumulated gradient on one row becomes a step. kRowMean
// divides by the number of batch terms that touched the row, so frequent
// patterns take bounded steps; kSum applies the raw batch sum.
enum class Reduction { kRowMean, kSum };
Reduction parse_reduction(std::string_view name);
std::string_view to_string(Reduction reduction);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 1000;
  double initial_lr = 0.1;
  std::optional<double> min_lr;  // defaults to 1e-4 * initial_lr
  std::size_t negatives = 10;
  std::uint64_t seed = 0;
  std::size_t window = 5;
  Optimizer optimizer = Optimizer::kSgd;
  Reduction reduction = Reduction::kRowMean;
  // Lock-free concurrent batches. Forfeits determinism.
  bool hogwild = false;
  std::size_t threads = 1;

  double resolved_min_lr() const { return min_lr.value_or(1e-4 * initial_lr); }
  void validate() const;  // throws ConfigError
};

// min_lr + (initial_lr - min_lr) * (1 + cos(pi * step / total_steps)) / 2
double cosine_lr(std::size_t step, std::size_t total_steps, double initial_lr, double min_lr);

struct TrainResult {
  std::vector<double> epoch_loss;  // mean per-item loss of each epoch
  double first_batch_loss = 0.0;   // mean per-item loss of the first batch
  std::size_t steps = 0;
};

TrainResult train(EmbeddingModel& model, const SkipgramCorpus& corpus, NegativeSampler& sampler,
                  const TrainConfig& config);
TrainResult train(EmbeddingModel& model, const PvdbowCorpus& corpus, NegativeSampler& sampler,
                  const TrainConfig& config);
TrainResult train(EmbeddingModel& model, const PvdmCorpus& corpus, NegativeSampler& sampler,
                  const TrainConfig& config);

// Sigmoid and log-sigmoid that do not overflow for large |x|.
double sigmoid(double x);
double log_sigmoid(double x);

// JSON object {name: [values...]} in row order.
void export_embeddings(const Matrix& rows, std::span<const std::string> names,
                       const std::filesystem::path& path);

struct NamedEmbeddings {
  std::vector<std::string> names;
  Matrix values;
};
NamedEmbeddings load_embeddings(const std::filesystem::path& path);

// CSV `epoch,mean_loss` with 1-based epochs.
void write_loss_trace(std::span<const double> epoch_loss, const std::filesystem::path& path);

}  // namespace graphrep
