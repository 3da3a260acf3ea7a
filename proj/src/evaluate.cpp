#include "graphrep/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graphrep/error.hpp"
#include "graphrep/log.hpp"
#include "graphrep/rng.hpp"

namespace graphrep {
namespace {

using DistanceFn = std::function<double(std::size_t, std::size_t)>;

struct Candidate {
  double distance;
  int label;
  std::size_t index;

  bool operator<(const Candidate& o) const {
    if (distance != o.distance) return distance < o.distance;
    if (label != o.label) return label < o.label;
    return index < o.index;
  }
};

int classify(std::size_t query, const Fold& fold, std::span<const int> labels,
             std::size_t k_neighbors, const DistanceFn& distance,
             std::vector<Candidate>& scratch) {
  scratch.clear();
  for (std::size_t j : fold.train) scratch.push_back({distance(query, j), labels[j], j});
  const auto k = std::min(k_neighbors, scratch.size());
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                    scratch.end());
  std::map<int, std::pair<std::size_t, double>> votes;  // class -> (count, summed distance)
  for (std::size_t i = 0; i < k; ++i) {
    auto& v = votes[scratch[i].label];
    ++v.first;
    v.second += scratch[i].distance;
  }
  int best = -1;
  std::pair<std::size_t, double> best_vote{0, 0.0};
  for (const auto& [label, vote] : votes) {
    const bool better = best < 0 || vote.first > best_vote.first ||
                        (vote.first == best_vote.first && vote.second < best_vote.second);
    if (better) {
      best = label;
      best_vote = vote;
    }
  }
  return best;
}

CvReport evaluate(std::size_t n, std::span<const int> labels, std::span<const FoldSplit> splits,
                  std::size_t k_neighbors, const DistanceFn& distance) {
  if (labels.size() != n) {
    throw InputError("evaluation: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(n) + " samples");
  }
  if (k_neighbors < 1) throw ConfigError("k_neighbors must be >= 1");
  if (splits.empty()) throw InputError("evaluation needs at least one fold split");
  CvReport report;
  report.k_neighbors = k_neighbors;
  report.repeats = splits.size();
  report.folds = splits.front().folds.size();
  report.stratified = true;
  std::vector<Candidate> scratch;
  for (const auto& split : splits) {
    report.stratified = report.stratified && split.stratified;
    std::vector<double> accuracies;
    for (const auto& fold : split.folds) {
      if (fold.train.empty() || fold.test.empty()) throw InputError("fold without samples");
      std::size_t correct = 0;
      for (std::size_t q : fold.test) {
        if (q >= n) throw InputError("fold index out of range");
        if (classify(q, fold, labels, k_neighbors, distance, scratch) == labels[q]) ++correct;
      }
      accuracies.push_back(static_cast<double>(correct) / static_cast<double>(fold.test.size()));
    }
    report.accuracies.push_back(std::move(accuracies));
  }
  report.summarise();
  return report;
}

std::vector<Fold> deal(const std::vector<std::vector<std::size_t>>& groups, std::size_t n,
                       std::size_t k) {
  std::vector<Fold> folds(k);
  std::vector<std::size_t> fold_of(n);
  std::size_t next = 0;
  for (const auto& group : groups) {
    for (std::size_t idx : group) {
      fold_of[idx] = next;
      next = (next + 1) % k;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
    }
  }
  return folds;
}

}  // namespace

FoldSplit stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  const auto n = labels.size();
  if (k < 2) throw InputError("need at least 2 folds");
  if (k > n) {
    throw InputError(std::to_string(k) + " folds requested for " + std::to_string(n) + " samples");
  }
  Rng rng(seed);
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  const bool stratify = std::all_of(by_class.begin(), by_class.end(),
                                    [&](const auto& entry) { return entry.second.size() >= k; });
  std::vector<std::vector<std::size_t>> groups;
  if (stratify) {
    for (auto& [label, members] : by_class) {
      rng.shuffle(std::span(members));
      groups.push_back(members);
    }
  } else {
    log::warn("some class has fewer members than folds; using unstratified folds");
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    rng.shuffle(std::span(all));
    groups.push_back(std::move(all));
  }
  return {deal(groups, n, k), stratify};
}

std::vector<FoldSplit> repeated_folds(std::span<const int> labels, std::size_t k,
                                      std::size_t repeats, std::uint64_t seed) {
  if (repeats < 1) throw InputError("need at least one repeat");
  std::vector<FoldSplit> out;
  for (std::size_t r = 0; r < repeats; ++r) {
    out.push_back(stratified_folds(labels, k, mix_seed(seed, r)));
  }
  return out;
}

void CvReport::summarise() {
  std::size_t count = 0;
  double sum = 0.0;
  for (const auto& repeat : accuracies) {
    for (double a : repeat) {
      sum += a;
      ++count;
    }
  }
  mean = count ? sum / static_cast<double>(count) : 0.0;
  double sq = 0.0;
  for (const auto& repeat : accuracies) {
    for (double a : repeat) sq += (a - mean) * (a - mean);
  }
  std = count ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
}

CvReport knn_evaluate(const KernelMatrix& kernel, std::span<const int> labels,
                      std::span<const FoldSplit> splits, std::size_t k_neighbors) {
  const auto distance = [&](std::size_t i, std::size_t j) {
    return std::sqrt(std::max(0.0, kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j)));
  };
  auto report = evaluate(kernel.size(), labels, splits, k_neighbors, distance);
  report.method = "kernel-knn";
  return report;
}

CvReport embedding_evaluate(const Matrix& embeddings, std::span<const int> labels,
                            std::span<const FoldSplit> splits, std::size_t k_neighbors) {
  const auto distance = [&](std::size_t i, std::size_t j) {
    const auto a = embeddings.row(i);
    const auto b = embeddings.row(j);
    double sum = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) sum += (a[c] - b[c]) * (a[c] - b[c]);
    return std::sqrt(sum);
  };
  auto report = evaluate(embeddings.rows(), labels, splits, k_neighbors, distance);
  report.method = "embedding-knn";
  return report;
}

double majority_baseline(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::size_t best = 0;
  for (const auto& [l, c] : counts) best = std::max(best, c);
  return static_cast<double>(best) / static_cast<double>(labels.size());
}

void write_report_json(const CvReport& report, const std::filesystem::path& path) {
  nlohmann::ordered_json out;
  out["method"] = report.method;
  out["dataset"] = report.dataset;
  out["mean"] = report.mean;
  out["std"] = report.std;
  out["std_kind"] = "population";
  out["stratified"] = report.stratified;
  out["folds"] = report.folds;
  out["repeats"] = report.repeats;
  out["seed"] = report.seed;
  out["k_neighbors"] = report.k_neighbors;
  out["accuracies"] = report.accuracies;
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file << out.dump(2) << '\n';
}

std::string report_table(const CvReport& report) {
  std::ostringstream out;
  out << "# " << report.repeats << "x" << report.folds << "-fold "
      << (report.stratified ? "stratified" : "unstratified") << " CV, " << report.k_neighbors
      << "-NN, population std, seed " << report.seed << '\n';
  out << std::left << std::setw(24) << "Method" << std::setw(16) << "Dataset"
      << "Accuracy (%)\n";
  std::ostringstream cell;
  cell << std::fixed << std::setprecision(2) << 100.0 * report.mean << " +/- "
       << 100.0 * report.std;
  out << std::left << std::setw(24) << report.method << std::setw(16)
      << (report.dataset.empty() ? "-" : report.dataset) << cell.str() << '\n';
  return out.str();
}

}  // namespace graphrep
