#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "graphrep/embedding.hpp"
#include "graphrep/kernels.hpp"

namespace graphrep {

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct FoldSplit {
  std::vector<Fold> folds;
  bool stratified = true;
};

// Partitions 0..n-1 into k test folds. Members of each class are shuffled
// and dealt round-robin, continuing across classes, so per-class counts
// differ by at most one between folds. Falls back to an unstratified split
// (with a warning) when some class has fewer than k members.
FoldSplit stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

// `repeats` independent splits; repeat r uses seed mix_seed(seed, r).
std::vector<FoldSplit> repeated_folds(std::span<const int> labels, std::size_t k,
                                      std::size_t repeats, std::uint64_t seed);

struct CvReport {
  std::string method;
  std::string dataset;
  std::vector<std::vector<double>> accuracies;  // [repeat][fold]
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t folds = 0;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::size_t k_neighbors = 1;
  bool stratified = true;

  // Recomputes mean and std from `accuracies`.
  void summarise();
};

// Majority vote among the k nearest training points under the kernel-induced
// distance sqrt(max(0, Kii + Kjj - 2Kij)). Candidates are ranked by
// (distance, class, index); vote ties go to the smallest summed distance,
// then the lowest class id.
CvReport knn_evaluate(const KernelMatrix& kernel, std::span<const int> labels,
                      std::span<const FoldSplit> splits, std::size_t k_neighbors);

// Same classifier with Euclidean distances between embedding rows.
CvReport embedding_evaluate(const Matrix& embeddings, std::span<const int> labels,
                            std::span<const FoldSplit> splits, std::size_t k_neighbors);

// Fraction of the most frequent class.
double majority_baseline(std::span<const int> labels);

void write_report_json(const CvReport& report, const std::filesystem::path& path);
std::string report_table(const CvReport& report);

}  // namespace graphrep
