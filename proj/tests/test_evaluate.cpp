#include <cmath>
#include <set>

#include "doctest.h"
#include "graphrep/error.hpp"
#include "graphrep/evaluate.hpp"
#include "support.hpp"

using namespace graphrep;

namespace {

KernelMatrix kernel_from(const Matrix& phi) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < phi.rows(); ++i) ids.push_back(std::to_string(i));
  return gram_kernel(phi, ids);
}

Matrix random_points(Rng& rng, std::size_t n, std::size_t d) {
  Matrix m(n, d);
  for (double& x : m.data()) x = rng.uniform_real() * 2.0 - 1.0;
  return m;
}

std::vector<FoldSplit> leave_one_out(std::size_t n) {
  FoldSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    Fold fold;
    fold.test = {i};
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) fold.train.push_back(j);
    }
    split.folds.push_back(fold);
  }
  return {split};
}

}  // namespace

TEST_CASE("stratified folds partition the indices") {
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const auto split = stratified_folds(labels, 5, 3);
  CHECK(split.stratified);
  REQUIRE(split.folds.size() == 5);
  std::multiset<std::size_t> seen;
  for (const auto& fold : split.folds) {
    REQUIRE(fold.test.size() == 2);
    CHECK(labels[fold.test[0]] != labels[fold.test[1]]);
    CHECK(fold.train.size() == 8);
    for (std::size_t i : fold.test) {
      seen.insert(i);
      CHECK(std::find(fold.train.begin(), fold.train.end(), i) == fold.train.end());
    }
  }
  CHECK(seen == std::multiset<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(stratified_folds(labels, 5, 3).folds.front().test == split.folds.front().test);
  CHECK_THROWS_AS(stratified_folds(labels, 11, 3), InputError);
  CHECK_THROWS_AS(stratified_folds(labels, 1, 3), InputError);
}

TEST_CASE("stratified fold class counts differ by at most one") {
  Rng rng(127);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = 20 + rng.uniform_index(60);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng.uniform_index(3));
    const auto split = stratified_folds(labels, 5, rng.next());
    if (!split.stratified) continue;
    for (int c = 0; c < 3; ++c) {
      std::size_t lo = n, hi = 0;
      for (const auto& fold : split.folds) {
        const auto count = static_cast<std::size_t>(std::count_if(
            fold.test.begin(), fold.test.end(), [&](std::size_t i) { return labels[i] == c; }));
        lo = std::min(lo, count);
        hi = std::max(hi, count);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("small classes fall back to unstratified folds") {
  const std::vector<int> labels{0, 0, 0, 0, 1};
  const auto split = stratified_folds(labels, 3, 1);
  CHECK_FALSE(split.stratified);
  std::size_t total = 0;
  for (const auto& fold : split.folds) total += fold.test.size();
  CHECK(total == 5);
}

TEST_CASE("separated clusters are classified perfectly") {
  Matrix phi(8, 2);
  for (std::size_t i = 0; i < 8; ++i) {
    phi(i, 0) = i < 4 ? 10.0 + 0.01 * i : -10.0 - 0.01 * i;
    phi(i, 1) = 0.1 * static_cast<double>(i % 4);
  }
  const std::vector<int> labels{0, 0, 0, 0, 1, 1, 1, 1};
  const auto splits = repeated_folds(labels, 2, 3, 5);
  CHECK(knn_evaluate(kernel_from(phi), labels, splits, 1).mean == 1.0);
  CHECK(embedding_evaluate(phi, labels, splits, 3).mean == 1.0);

  // One-hot class indicators.
  Matrix onehot(8, 2);
  for (std::size_t i = 0; i < 8; ++i) onehot(i, static_cast<std::size_t>(labels[i])) = 1.0;
  CHECK(embedding_evaluate(onehot, labels, splits, 1).mean == 1.0);
}

TEST_CASE("equidistant points break ties towards the lowest class") {
  KernelMatrix identity;
  for (int i = 0; i < 6; ++i) identity.graph_ids.push_back(std::to_string(i));
  identity.values.assign(36, 0.0);
  for (std::size_t i = 0; i < 6; ++i) identity(i, i) = 1.0;
  const std::vector<int> labels{1, 0, 1, 1, 0, 1};
  const auto report = knn_evaluate(identity, labels, leave_one_out(6), 1);
  // Every point is predicted class 0, which two of six points hold.
  CHECK(report.mean == doctest::Approx(2.0 / 6.0));

  // Duplicated points across classes.
  Matrix dup(3, 1);
  dup(0, 0) = dup(1, 0) = 1.0;
  dup(2, 0) = 5.0;
  const std::vector<int> dup_labels{1, 0, 0};
  FoldSplit split;
  split.folds.push_back({{0, 1}, {2}});
  const std::vector<FoldSplit> splits{split};
  CHECK(embedding_evaluate(dup, dup_labels, splits, 1).mean == 1.0);
}

TEST_CASE("vote ties go to the smallest summed distance") {
  Matrix phi(5, 1);
  phi(0, 0) = 0.0;   // query
  phi(1, 0) = 1.0;   // class 1
  phi(2, 0) = -4.0;  // class 1
  phi(3, 0) = 2.0;   // class 0
  phi(4, 0) = 2.5;   // class 0
  const std::vector<int> labels{1, 1, 1, 0, 0};
  FoldSplit split;
  split.folds.push_back({{1, 2, 3, 4}, {0}});
  const std::vector<FoldSplit> splits{split};
  // Neighbours: 1 (class 1, d=1), 3 (class 0, d=2), 4 (class 0, d=2.5),
  // 2 (class 1, d=4). k=4 ties 2-2; class 0 sums 4.5 < 5.
  CHECK(embedding_evaluate(phi, labels, splits, 4).mean == 0.0);
  CHECK(embedding_evaluate(phi, labels, splits, 1).mean == 1.0);
}

TEST_CASE("leave-one-out on a four point fixture") {
  // Points on a line at 0, 1, 3, 7; linear kernel K = x x^T.
  KernelMatrix k;
  k.graph_ids = {"a", "b", "c", "d"};
  const double x[] = {0.0, 1.0, 3.0, 7.0};
  for (double xi : x) {
    for (double xj : x) k.values.push_back(xi * xj);
  }
  const std::vector<int> labels{0, 0, 1, 1};
  // Nearest neighbours: a->b, b->a, c->b (2 < 4), d->c.
  const auto report = knn_evaluate(k, labels, leave_one_out(4), 1);
  CHECK(report.accuracies.front() == std::vector<double>{1.0, 1.0, 0.0, 1.0});
  CHECK(report.mean == 0.75);
  CHECK(report.std == doctest::Approx(std::sqrt(0.1875)));
}

TEST_CASE("kernel and embedding evaluation agree on a Gram matrix") {
  Rng rng(131);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = 20 + rng.uniform_index(20);
    const auto phi = random_points(rng, n, 1 + rng.uniform_index(5));
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng.uniform_index(2));
    const auto splits = repeated_folds(labels, 4, 2, rng.next());
    for (std::size_t kn : {1u, 3u}) {
      CHECK(knn_evaluate(kernel_from(phi), labels, splits, kn).accuracies ==
            embedding_evaluate(phi, labels, splits, kn).accuracies);
    }
  }
}

TEST_CASE("reordering samples with their folds leaves the report unchanged") {
  Rng rng(137);
  const std::size_t n = 40;
  const auto phi = random_points(rng, n, 3);
  std::vector<int> labels(n);
  for (auto& l : labels) l = static_cast<int>(rng.uniform_index(2));
  const auto splits = repeated_folds(labels, 5, 3, 17);

  const auto perm = testing::random_permutation(rng, n);  // old index -> new index
  Matrix shuffled(n, 3);
  std::vector<int> shuffled_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 3; ++c) shuffled(perm[i], c) = phi(i, c);
    shuffled_labels[perm[i]] = labels[i];
  }
  auto moved = splits;
  for (auto& split : moved) {
    for (auto& fold : split.folds) {
      for (auto& i : fold.train) i = perm[i];
      for (auto& i : fold.test) i = perm[i];
    }
  }
  const auto a = knn_evaluate(kernel_from(phi), labels, splits, 3);
  const auto b = knn_evaluate(kernel_from(shuffled), shuffled_labels, moved, 3);
  CHECK(a.accuracies == b.accuracies);
  CHECK(a.mean == b.mean);
}

TEST_CASE("report summary and serialisation") {
  CvReport report;
  report.accuracies = {{1.0, 0.5}, {0.5, 1.0}};
  report.folds = 2;
  report.repeats = 2;
  report.summarise();
  CHECK(report.mean == 0.75);
  CHECK(report.std == 0.25);
  testing::TempDir tmp;
  write_report_json(report, tmp / "r.json");
  const auto text = testing::slurp(tmp / "r.json");
  CHECK(text.find("\"mean\": 0.75") != std::string::npos);
  CHECK(text.find("population") != std::string::npos);
  CHECK(report_table(report).find("75.00 +/- 25.00") != std::string::npos);
}

TEST_CASE("majority baseline") {
  const std::vector<int> labels{0, 1, 1, 2, 1};
  CHECK(majority_baseline(labels) == 0.6);
}
