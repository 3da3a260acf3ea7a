#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gradient_check.hpp"
#include "graphrep/embedding.hpp"
#include "graphrep/error.hpp"
#include "support.hpp"

using namespace graphrep;

namespace {

// Graph 0 holds only pattern a, graph 1 only pattern b.
struct Toy {
  std::vector<PatternDocument> docs{{"0", std::vector<std::string>(10, "a")},
                                    {"1", std::vector<std::string>(10, "b")}};
  Vocabulary vocab = Vocabulary::build(docs);
};

TrainConfig toy_config() {
  TrainConfig config;
  config.epochs = 100;
  config.batch_size = 1;
  config.initial_lr = 0.1;
  config.negatives = 1;
  config.seed = 4;
  return config;
}

std::vector<double> moving_average(const std::vector<double>& xs, std::size_t w) {
  std::vector<double> out;
  for (std::size_t e = w - 1; e < xs.size(); ++e) {
    double sum = 0.0;
    for (std::size_t i = e + 1 - w; i <= e; ++i) sum += xs[i];
    out.push_back(sum / static_cast<double>(w));
  }
  return out;
}

}  // namespace

TEST_CASE("stable sigmoid helpers") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(log_sigmoid(0.0) == doctest::Approx(-std::numbers::ln2));
  CHECK(std::isfinite(log_sigmoid(-800.0)));
  CHECK(log_sigmoid(-800.0) == doctest::Approx(-800.0));
  CHECK(log_sigmoid(800.0) == 0.0);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("loss of a single zero-score pair") {
  auto model = EmbeddingModel::create(ModelMode::kPvdbow, 1, 2, 3, 0);
  Batch batch;
  batch.negatives_per_item = 1;
  batch.targets = {0};
  batch.positives = {0};
  batch.negatives = {1};
  const auto grads = batch_loss_and_grads(model, batch);
  CHECK(grads.loss == doctest::Approx(1.38629).epsilon(1e-5));
  CHECK(grads.loss == doctest::Approx(2.0 * std::numbers::ln2).epsilon(1e-14));
}

TEST_CASE("loss saturates towards zero") {
  auto model = EmbeddingModel::create(ModelMode::kPvdbow, 1, 2, 1, 0);
  model.targets(0, 0) = 1.0;
  model.contexts(0, 0) = 60.0;
  model.contexts(1, 0) = -60.0;
  Batch batch;
  batch.negatives_per_item = 1;
  batch.targets = {0};
  batch.positives = {0};
  batch.negatives = {1};
  CHECK(batch_loss_and_grads(model, batch).loss < 1e-20);
}

TEST_CASE("initialisation ranges") {
  const auto model = EmbeddingModel::create(ModelMode::kPvdm, 7, 5, 8, 3);
  for (double x : model.targets.data()) CHECK(std::abs(x) <= 0.5 / 8);
  for (double x : model.words.data()) CHECK(std::abs(x) <= 0.5 / 8);
  for (double x : model.contexts.data()) CHECK(x == 0.0);
  CHECK(EmbeddingModel::create(ModelMode::kPvdm, 7, 5, 8, 3) == model);
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(71);
  for (auto mode : {ModelMode::kSgns, ModelMode::kPvdbow, ModelMode::kPvdm}) {
    CAPTURE(to_string(mode));
    for (int trial = 0; trial < 20; ++trial) {
      CHECK(testing::random_gradient_check(rng, mode) <= 1e-4);
    }
  }
}

TEST_CASE("pv-dm ignores padded window slots") {
  Rng rng(73);
  auto model = testing::random_model(rng, ModelMode::kPvdm, 2, 4, 3);
  Batch batch;
  batch.negatives_per_item = 1;
  batch.window = 1;
  batch.targets = {0};
  batch.positives = {1};
  batch.negatives = {2};
  batch.windows = {kPad, 3};
  const auto base = batch_loss_and_grads(model, batch);
  CHECK(base.words.find(3) != nullptr);
  CHECK(base.words.rows().size() == 1);
  // Equivalent to a window holding only pattern 3.
  Batch single = batch;
  single.window = 0;
  single.windows.clear();
  auto manual = model;
  manual.mode = ModelMode::kPvdbow;
  for (std::size_t c = 0; c < 3; ++c) {
    manual.targets(0, c) = (model.targets(0, c) + model.words(3, c)) / 2.0;
  }
  CHECK(batch_loss_and_grads(manual, single).loss == doctest::Approx(base.loss).epsilon(1e-14));
  CHECK(testing::max_gradient_error(model, batch) <= 1e-4);
}

TEST_CASE("batch validation") {
  auto model = EmbeddingModel::create(ModelMode::kPvdbow, 2, 3, 2, 0);
  Batch batch;
  batch.negatives_per_item = 1;
  batch.targets = {2};
  batch.positives = {0};
  batch.negatives = {1};
  CHECK_THROWS_AS(batch_loss_and_grads(model, batch), InputError);
  batch.targets = {0};
  batch.negatives = {3};
  CHECK_THROWS_AS(batch_loss_and_grads(model, batch), InputError);
  batch.negatives = {1};
  model.targets(0, 0) = std::nan("");
  CHECK_THROWS_AS(batch_loss_and_grads(model, batch), TrainingError);
}

TEST_CASE("cosine schedule endpoints") {
  CHECK(cosine_lr(0, 100, 0.1, 1e-5) == 0.1);
  CHECK(cosine_lr(100, 100, 0.1, 1e-5) == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(cosine_lr(50, 100, 0.1, 0.0) == doctest::Approx(0.05));
  double prev = 1.0;
  for (std::size_t t = 0; t <= 100; ++t) {
    const double lr = cosine_lr(t, 100, 0.1, 1e-5);
    CHECK(lr <= prev);
    prev = lr;
  }
  TrainConfig config;
  CHECK(config.resolved_min_lr() == doctest::Approx(1e-5));
}

TEST_CASE("config validation") {
  TrainConfig config;
  CHECK_NOTHROW(config.validate());
  config.epochs = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = TrainConfig{};
  config.min_lr = 0.5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = TrainConfig{};
  config.negatives = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  CHECK_THROWS_AS(parse_optimizer("adam"), ConfigError);
  CHECK_THROWS_AS(parse_optimizer("adagrad"), ConfigError);
  CHECK(parse_optimizer("sgd") == Optimizer::kSgd);
  CHECK(parse_reduction("sum") == Reduction::kSum);
  CHECK_THROWS_AS(parse_reduction("max"), ConfigError);
  CHECK_THROWS_AS(parse_model_mode("cbow"), ConfigError);
}

TEST_CASE("first batch loss equals the analytic initial value") {
  Toy toy;
  const auto corpus = build_pvdbow_corpus(toy.docs, toy.vocab);
  for (std::size_t k : {1u, 5u}) {
    // Three patterns so negatives have room.
    const std::vector<std::uint64_t> counts{10, 10, 1};
    NegativeSampler sampler(counts, 1);
    auto model = EmbeddingModel::create(ModelMode::kPvdbow, 2, 3, 4, 2);
    auto config = toy_config();
    config.epochs = 1;
    config.negatives = k;
    config.batch_size = 7;
    const auto result = train(model, corpus, sampler, config);
    CHECK(std::abs(result.first_batch_loss - (k + 1) * std::numbers::ln2) <= 1e-9);
  }
}

TEST_CASE("only rows referenced by a batch change") {
  // Pattern 2 has no noise mass and never occurs; graph 2 has no pairs.
  const std::vector<std::uint64_t> counts{5, 5, 0};
  Rng rng(79);
  for (auto mode : {ModelMode::kSgns, ModelMode::kPvdbow, ModelMode::kPvdm}) {
    CAPTURE(to_string(mode));
    auto model = testing::random_model(rng, mode, 3, 3, 4);
    const auto before = model;
    NegativeSampler sampler(counts, 2);
    auto config = toy_config();
    config.epochs = 3;
    config.batch_size = 2;
    if (mode == ModelMode::kPvdm) {
      PvdmCorpus corpus;
      corpus.window = 1;
      corpus.graphs = {0, 1, 0};
      corpus.targets = {0, 1, 1};
      corpus.contexts = {kPad, 1, 0, kPad, 0, 1};
      train(model, corpus, sampler, config);
    } else {
      const std::vector<TargetContext> pairs{{0, 0}, {1, 1}, {0, 1}};
      if (mode == ModelMode::kSgns) {
        train(model, SkipgramCorpus{pairs}, sampler, config);
      } else {
        train(model, PvdbowCorpus{pairs}, sampler, config);
      }
    }
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(model.targets(2, c) == before.targets(2, c));
      CHECK(model.contexts(2, c) == before.contexts(2, c));
      if (mode == ModelMode::kPvdm) CHECK(model.words(2, c) == before.words(2, c));
      CHECK(model.targets(0, c) != before.targets(0, c));
      CHECK(model.contexts(1, c) != before.contexts(1, c));
    }
  }
}

TEST_CASE("toy corpus separates the two graphs") {
  Toy toy;
  const auto corpus = build_pvdbow_corpus(toy.docs, toy.vocab);
  NegativeSampler sampler(toy.vocab.counts(), 8);
  auto model = EmbeddingModel::create(ModelMode::kPvdbow, 2, 2, 8, 9);
  const auto result = train(model, corpus, sampler, toy_config());
  REQUIRE(result.epoch_loss.size() == 100);
  const auto a = toy.vocab.id("a"), b = toy.vocab.id("b");
  auto score = [&](std::size_t g, PatternId p) {
    double x = 0.0;
    for (std::size_t c = 0; c < 8; ++c) x += model.targets(g, c) * model.contexts(p, c);
    return sigmoid(x);
  };
  CHECK(score(0, a) > score(0, b));
  CHECK(score(1, b) > score(1, a));

  const auto ma = moving_average(result.epoch_loss, 10);
  for (std::size_t i = 1; i < ma.size(); ++i) {
    CAPTURE(i);
    CHECK(ma[i] < ma[i - 1]);
  }
  CHECK(result.epoch_loss.back() < 0.5 * result.epoch_loss.front());
}

TEST_CASE("training is deterministic per seed") {
  Toy toy;
  const auto corpus = build_pvdm_corpus(toy.docs, toy.vocab, 2);
  auto run = [&](std::uint64_t seed) {
    NegativeSampler sampler(toy.vocab.counts(), seed);
    auto model = EmbeddingModel::create(ModelMode::kPvdm, 2, 2, 5, seed);
    auto config = toy_config();
    config.epochs = 5;
    config.batch_size = 3;
    config.seed = seed;
    const auto result = train(model, corpus, sampler, config);
    return std::make_pair(model, result.epoch_loss);
  };
  const auto first = run(1);
  const auto second = run(1);
  CHECK(first.first == second.first);
  CHECK(first.second == second.second);
  CHECK_FALSE(run(2).first == first.first);
}

TEST_CASE("hogwild training runs and stays finite") {
  Toy toy;
  const auto corpus = build_pvdbow_corpus(toy.docs, toy.vocab);
  NegativeSampler sampler(toy.vocab.counts(), 1);
  auto model = EmbeddingModel::create(ModelMode::kPvdbow, 2, 2, 4, 1);
  auto config = toy_config();
  config.epochs = 10;
  config.batch_size = 2;
  config.hogwild = true;
  config.threads = 3;
  const auto result = train(model, corpus, sampler, config);
  CHECK(result.epoch_loss.size() == 10);
  for (double x : model.targets.data()) CHECK(std::isfinite(x));
}

TEST_CASE("divergence aborts with a diagnostic") {
  Toy toy;
  const auto corpus = build_pvdbow_corpus(toy.docs, toy.vocab);
  NegativeSampler sampler(toy.vocab.counts(), 1);
  auto model = EmbeddingModel::create(ModelMode::kPvdbow, 2, 2, 4, 1);
  auto config = toy_config();
  config.initial_lr = 1e200;
  config.reduction = Reduction::kSum;
  try {
    train(model, corpus, sampler, config);
    FAIL("expected a training error");
  } catch (const TrainingError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lr") != std::string::npos);
    CHECK(msg.find("epoch") != std::string::npos);
    CHECK(msg.find("batch") != std::string::npos);
  }
}

TEST_CASE("corpus shape must match the model") {
  Toy toy;
  NegativeSampler sampler(toy.vocab.counts(), 1);
  auto model = EmbeddingModel::create(ModelMode::kSgns, 2, 2, 4, 1);
  CHECK_THROWS_AS(train(model, build_pvdbow_corpus(toy.docs, toy.vocab), sampler, toy_config()),
                  InputError);
}

TEST_CASE("embedding export round trip") {
  testing::TempDir tmp;
  Matrix zero(1, 2);
  const std::vector<std::string> one{"g0"};
  export_embeddings(zero, one, tmp / "z.json");
  CHECK(testing::slurp(tmp / "z.json").find("\"g0\":[0.0,0.0]") != std::string::npos);

  Rng rng(83);
  Matrix m(3, 4);
  for (double& x : m.data()) x = rng.uniform_real() * 1e-3 - 0.1 / 3.0;
  const std::vector<std::string> names{"b", "a", "c"};
  export_embeddings(m, names, tmp / "m.json");
  const auto loaded = load_embeddings(tmp / "m.json");
  CHECK(loaded.names == names);
  CHECK(loaded.values == m);
}

TEST_CASE("loss trace csv") {
  testing::TempDir tmp;
  const std::vector<double> losses{2.5, 1.25};
  write_loss_trace(losses, tmp / "loss.csv");
  CHECK(testing::slurp(tmp / "loss.csv") == "epoch,mean_loss\n1,2.5\n2,1.25\n");
}
