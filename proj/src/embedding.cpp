#include "graphrep/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "graphrep/error.hpp"
#include "graphrep/numeric_format.hpp"

namespace graphrep {
namespace {

template <bool kConcurrent>
double load(const double& x) {
  if constexpr (kConcurrent) {
    return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
  } else {
    return x;
  }
}

template <bool kConcurrent>
void copy_row(std::span<const double> src, std::span<double> dst) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = load<kConcurrent>(src[j]);
}

template <bool kConcurrent>
void apply_rows(Matrix& matrix, const RowGradients& grads, double lr, Reduction reduction) {
  const auto rows = grads.rows();
  for (std::size_t slot = 0; slot < rows.size(); ++slot) {
    auto row = matrix.row(rows[slot]);
    const auto g = grads.gradient(slot);
    const double lr_row = reduction == Reduction::kRowMean ? lr / grads.hits(slot) : lr;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if constexpr (kConcurrent) {
        std::atomic_ref<double> cell(row[j]);
        cell.store(cell.load(std::memory_order_relaxed) - lr_row * g[j], std::memory_order_relaxed);
      } else {
        row[j] -= lr_row * g[j];
      }
    }
  }
}

template <bool kConcurrent>
void apply_gradients(EmbeddingModel& model, const BatchGradients& grads, double lr,
                     Reduction reduction) {
  apply_rows<kConcurrent>(model.targets, grads.targets, lr, reduction);
  apply_rows<kConcurrent>(model.contexts, grads.contexts, lr, reduction);
  if (model.mode == ModelMode::kPvdm) {
    apply_rows<kConcurrent>(model.words, grads.words, lr, reduction);
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * b[j];
  return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += alpha * x[j];
}

void check_ids(const EmbeddingModel& model, const Batch& batch) {
  const auto n = batch.size();
  if (batch.positives.size() != n || batch.negatives.size() != n * batch.negatives_per_item ||
      (model.mode == ModelMode::kPvdm && batch.windows.size() != n * 2 * batch.window)) {
    throw InputError("malformed batch");
  }
  const auto vocab = model.contexts.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (batch.targets[i] >= model.targets.rows()) throw InputError("batch target id out of range");
    if (batch.positives[i] >= vocab) throw InputError("batch pattern id out of range");
  }
  for (PatternId id : batch.negatives) {
    if (id >= vocab) throw InputError("negative pattern id out of range");
  }
  for (PatternId id : batch.windows) {
    if (id != kPad && id >= vocab) throw InputError("window pattern id out of range");
  }
}

template <bool kConcurrent>
BatchGradients compute_batch(const EmbeddingModel& model, const Batch& batch) {
  const auto d = model.dim;
  BatchGradients out{0.0, RowGradients(d), RowGradients(d), RowGradients(d)};
  std::vector<double> u(d);
  std::vector<double> v(d);
  std::vector<double> du(d);
  std::vector<double> tmp(d);
  const auto k = batch.negatives_per_item;
  const auto width = 2 * batch.window;

  const auto non_finite = [](std::string_view what) {
    throw TrainingError("non-finite value in " + std::string(what));
  };

  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::span<const PatternId> window;
    double members = 1.0;
    copy_row<kConcurrent>(model.targets.row(batch.targets[i]), u);
    if (model.mode == ModelMode::kPvdm) {
      window = std::span(batch.windows).subspan(i * width, width);
      for (PatternId c : window) {
        if (c == kPad) continue;
        copy_row<kConcurrent>(model.words.row(c), tmp);
        axpy(1.0, tmp, u);
        members += 1.0;
      }
      for (double& x : u) x /= members;
    }
    for (double x : u) {
      if (!std::isfinite(x)) non_finite("target row");
    }
    std::fill(du.begin(), du.end(), 0.0);

    const auto score = [&](PatternId pattern, bool positive) {
      copy_row<kConcurrent>(model.contexts.row(pattern), v);
      const double x = dot(u, v);
      if (!std::isfinite(x)) non_finite("context row");
      // d/dx of -log s(x) is s(x) - 1; of -log s(-x) is s(x).
      const double g = positive ? sigmoid(x) - 1.0 : sigmoid(x);
      out.loss -= positive ? log_sigmoid(x) : log_sigmoid(-x);
      axpy(g, v, du);
      axpy(g, u, out.contexts.at(pattern));
    };
    score(batch.positives[i], true);
    for (std::size_t n = 0; n < k; ++n) score(batch.negatives[i * k + n], false);

    if (model.mode == ModelMode::kPvdm) {
      const double scale = 1.0 / members;
      axpy(scale, du, out.targets.at(batch.targets[i]));
      for (PatternId c : window) {
        if (c != kPad) axpy(scale, du, out.words.at(c));
      }
    } else {
      axpy(1.0, du, out.targets.at(batch.targets[i]));
    }
  }
  if (!std::isfinite(out.loss)) non_finite("loss");
  return out;
}

struct ItemSource {
  std::size_t count = 0;
  std::size_t window = 0;
  // Appends target, positive and (PV-DM) window of item `index` to `batch`.
  std::function<void(Batch&, std::size_t)> add;
};

template <bool kConcurrent>
double run_batch(EmbeddingModel& model, const ItemSource& source, NegativeSampler& sampler,
                 std::span<const std::size_t> items, const TrainConfig& config, double lr,
                 Batch& batch) {
  const auto negatives = config.negatives;
  batch.clear();
  batch.negatives_per_item = negatives;
  batch.window = source.window;
  for (std::size_t index : items) source.add(batch, index);
  batch.negatives.resize(batch.size() * negatives);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sampler.sample_into(std::span(batch.negatives).subspan(i * negatives, negatives),
                        batch.positives[i]);
  }
  const auto grads = compute_batch<kConcurrent>(model, batch);
  apply_gradients<kConcurrent>(model, grads, lr, config.reduction);
  return grads.loss / static_cast<double>(batch.size());
}

std::string step_context(double lr, std::size_t epoch, std::size_t batch) {
  std::ostringstream out;
  out << " (lr " << lr << ", epoch " << epoch + 1 << ", batch " << batch + 1 << ")";
  return out.str();
}

TrainResult run_training(EmbeddingModel& model, const ItemSource& source,
                         NegativeSampler& sampler, const TrainConfig& config) {
  config.validate();
  if (source.count == 0) throw InputError("cannot train on an empty corpus");
  if (sampler.size() != model.contexts.rows()) {
    throw InputError("negative sampler and model disagree on vocabulary size");
  }
  const auto batch_size = config.batch_size;
  const auto batches = (source.count + batch_size - 1) / batch_size;
  const auto total_steps = config.epochs * batches;
  const auto min_lr = config.resolved_min_lr();

  std::vector<std::size_t> order(source.count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffler(mix_seed(config.seed, 0x5eedULL));

  TrainResult result;
  result.steps = total_steps;
  std::vector<double> batch_loss(batches);
  const bool concurrent = config.hogwild && config.threads > 1;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffler.shuffle(std::span(order));
    const auto items_of = [&](std::size_t b) {
      const auto lo = b * batch_size;
      return std::span(order).subspan(lo, std::min(batch_size, source.count - lo));
    };
    if (!concurrent) {
      Batch batch;
      for (std::size_t b = 0; b < batches; ++b) {
        const auto step = epoch * batches + b;
        const double lr = cosine_lr(step, total_steps, config.initial_lr, min_lr);
        try {
          batch_loss[b] = run_batch<false>(model, source, sampler, items_of(b), config, lr,
                                           batch);
        } catch (const TrainingError& e) {
          throw TrainingError(std::string(e.what()) + step_context(lr, epoch, b));
        }
      }
    } else {
      std::vector<std::string> failures(config.threads);
      {
        std::vector<std::jthread> workers;
        for (std::size_t t = 0; t < config.threads; ++t) {
          workers.emplace_back([&, t] {
            auto local = sampler.fork(mix_seed(config.seed, (epoch + 1) * 1000003ULL + t));
            Batch batch;
            for (std::size_t b = t; b < batches; b += config.threads) {
              const auto step = epoch * batches + b;
              const double lr = cosine_lr(step, total_steps, config.initial_lr, min_lr);
              try {
                batch_loss[b] = run_batch<true>(model, source, local, items_of(b), config, lr,
                                                batch);
              } catch (const std::exception& e) {
                failures[t] = e.what() + step_context(lr, epoch, b);
                return;
              }
            }
          });
        }
      }
      for (const auto& f : failures) {
        if (!f.empty()) throw TrainingError(f);
      }
    }
    if (epoch == 0) result.first_batch_loss = batch_loss[0];
    double sum = 0.0;
    for (double l : batch_loss) sum += l;
    result.epoch_loss.push_back(sum / static_cast<double>(batches));
  }
  return result;
}

void require_mode(const EmbeddingModel& model, ModelMode expected) {
  if (model.mode != expected) {
    throw InputError("corpus shape " + std::string(to_string(expected)) +
                     " does not match model mode " + std::string(to_string(model.mode)));
  }
}

}  // namespace

std::string_view to_string(ModelMode mode) {
  switch (mode) {
    case ModelMode::kSgns: return "sgns";
    case ModelMode::kPvdbow: return "pvdbow";
    case ModelMode::kPvdm: return "pvdm";
  }
  return "unknown";
}

ModelMode parse_model_mode(std::string_view name) {
  if (name == "sgns" || name == "skipgram") return ModelMode::kSgns;
  if (name == "pvdbow") return ModelMode::kPvdbow;
  if (name == "pvdm") return ModelMode::kPvdm;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected sgns, pvdbow or pvdm)");
}

EmbeddingModel EmbeddingModel::create(ModelMode mode, std::size_t num_targets,
                                      std::size_t vocab_size, std::size_t dim,
                                      std::uint64_t seed) {
  if (dim == 0) throw ConfigError("embedding dimension must be >= 1");
  EmbeddingModel model;
  model.mode = mode;
  model.dim = dim;
  model.targets = Matrix(num_targets, dim);
  model.contexts = Matrix(vocab_size, dim, 0.0);
  Rng rng(seed);
  const double scale = 1.0 / static_cast<double>(dim);
  for (double& x : model.targets.data()) x = (rng.uniform_real() - 0.5) * scale;
  if (mode == ModelMode::kPvdm) {
    model.words = Matrix(vocab_size, dim);
    for (double& x : model.words.data()) x = (rng.uniform_real() - 0.5) * scale;
  }
  return model;
}

void Batch::clear() {
  targets.clear();
  positives.clear();
  negatives.clear();
  windows.clear();
}

std::span<double> RowGradients::at(std::uint32_t row) {
  auto [it, inserted] = slot_.try_emplace(row, rows_.size());
  if (inserted) {
    hits_.push_back(0);
    rows_.push_back(row);
    values_.resize(values_.size() + dim_, 0.0);
  }
  ++hits_[it->second];
  return {values_.data() + it->second * dim_, dim_};
}

const double* RowGradients::find(std::uint32_t row) const {
  const auto it = slot_.find(row);
  return it == slot_.end() ? nullptr : values_.data() + it->second * dim_;
}

void RowGradients::clear() {
  rows_.clear();
  hits_.clear();
  values_.clear();
  slot_.clear();
}

BatchGradients batch_loss_and_grads(const EmbeddingModel& model, const Batch& batch) {
  check_ids(model, batch);
  return compute_batch<false>(model, batch);
}

Optimizer parse_optimizer(std::string_view name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "adam" || name == "adagrad") {
    throw ConfigError("optimizer '" + std::string(name) +
                      "' is not supported; only 'sgd' with cosine annealing is available");
  }
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

Reduction parse_reduction(std::string_view name) {
  if (name == "row-mean") return Reduction::kRowMean;
  if (name == "sum") return Reduction::kSum;
  throw ConfigError("unknown reduction '" + std::string(name) + "' (row-mean, sum)");
}

std::string_view to_string(Reduction reduction) {
  return reduction == Reduction::kSum ? "sum" : "row-mean";
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (negatives < 1) throw ConfigError("negative sample count must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  const double lo = resolved_min_lr();
  if (!(lo > 0.0) || !(lo <= initial_lr) || !std::isfinite(initial_lr)) {
    throw ConfigError("learning rates must satisfy 0 < min_lr <= initial_lr");
  }
}

double cosine_lr(std::size_t step, std::size_t total_steps, double initial_lr, double min_lr) {
  if (total_steps == 0) return initial_lr;
  const double progress = static_cast<double>(std::min(step, total_steps)) /
                          static_cast<double>(total_steps);
  return min_lr + 0.5 * (initial_lr - min_lr) * (1.0 + std::cos(std::numbers::pi * progress));
}

TrainResult train(EmbeddingModel& model, const SkipgramCorpus& corpus, NegativeSampler& sampler,
                  const TrainConfig& config) {
  require_mode(model, ModelMode::kSgns);
  ItemSource source{corpus.pairs.size(), 0, [&](Batch& batch, std::size_t i) {
                      batch.targets.push_back(corpus.pairs[i].target);
                      batch.positives.push_back(corpus.pairs[i].context);
                    }};
  return run_training(model, source, sampler, config);
}

TrainResult train(EmbeddingModel& model, const PvdbowCorpus& corpus, NegativeSampler& sampler,
                  const TrainConfig& config) {
  require_mode(model, ModelMode::kPvdbow);
  ItemSource source{corpus.pairs.size(), 0, [&](Batch& batch, std::size_t i) {
                      batch.targets.push_back(corpus.pairs[i].target);
                      batch.positives.push_back(corpus.pairs[i].context);
                    }};
  return run_training(model, source, sampler, config);
}

TrainResult train(EmbeddingModel& model, const PvdmCorpus& corpus, NegativeSampler& sampler,
                  const TrainConfig& config) {
  require_mode(model, ModelMode::kPvdm);
  ItemSource source{corpus.size(), corpus.window, [&](Batch& batch, std::size_t i) {
                      batch.targets.push_back(corpus.graphs[i]);
                      batch.positives.push_back(corpus.targets[i]);
                      const auto ctx = corpus.context(i);
                      batch.windows.insert(batch.windows.end(), ctx.begin(), ctx.end());
                    }};
  return run_training(model, source, sampler, config);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  // log s(x) = -softplus(-x), softplus(y) = max(y, 0) + log1p(exp(-|y|)).
  const double y = -x;
  return -(std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y))));
}

void export_embeddings(const Matrix& rows, std::span<const std::string> names,
                       const std::filesystem::path& path) {
  if (names.size() != rows.rows()) {
    throw InputError("embedding export: " + std::to_string(names.size()) + " names for " +
                     std::to_string(rows.rows()) + " rows");
  }
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto row = rows.row(r);
    out[names[r]] = std::vector<double>(row.begin(), row.end());
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file << out.dump() << '\n';
  if (!file) throw IoError("failed writing " + path.string());
}

NamedEmbeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw IngestionError("cannot read embeddings " + path.string());
  NamedEmbeddings out;
  try {
    const auto in = nlohmann::ordered_json::parse(file);
    std::size_t dim = 0;
    std::vector<std::vector<double>> rows;
    for (const auto& [name, values] : in.items()) {
      auto row = values.get<std::vector<double>>();
      if (!rows.empty() && row.size() != dim) {
        throw ParseError(path.string() + ": rows have different lengths");
      }
      dim = row.size();
      out.names.push_back(name);
      rows.push_back(std::move(row));
    }
    out.values = Matrix(rows.size(), dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::copy(rows[r].begin(), rows[r].end(), out.values.row(r).begin());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return out;
}

void write_loss_trace(std::span<const double> epoch_loss, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < epoch_loss.size(); ++e) {
    file << e + 1 << ',' << format_double(epoch_loss[e]) << '\n';
  }
}

}  // namespace graphrep
