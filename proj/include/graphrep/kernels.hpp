#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphrep/embedding.hpp"
#include "graphrep/vocabulary.hpp"

namespace graphrep {

// L1-normalised pattern histogram of one graph, sorted by pattern id.
struct FrequencyVector {
  std::string graph_id;
  std::vector<std::pair<PatternId, double>> entries;

  double sum() const;
};

struct KernelMatrix {
  std::vector<std::string> graph_ids;
  std::vector<double> values;  // row-major n x n

  std::size_t size() const { return graph_ids.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * size() + j]; }

  friend bool operator==(const KernelMatrix&, const KernelMatrix&) = default;
};

// Empty documents yield zero vectors and a warning.
std::vector<FrequencyVector> frequency_vectors(std::span<const PatternDocument> documents,
                                               const Vocabulary& vocab);

double sparse_dot(const FrequencyVector& a, const FrequencyVector& b);
double squared_distance(const FrequencyVector& a, const FrequencyVector& b);

KernelMatrix linear_kernel(std::span<const FrequencyVector> vectors, std::size_t threads = 1);
KernelMatrix rbf_kernel(std::span<const FrequencyVector> vectors, double gamma,
                        std::size_t threads = 1);

// 1 / (2 m^2) with m the median pairwise Euclidean distance.
double median_heuristic_gamma(std::span<const FrequencyVector> vectors);

// K_ij = x_i^T (S S^T) x_j, evaluated through the projections S^T x.
// `pattern_embeddings` has one row per vocabulary id.
KernelMatrix deep_kernel(std::span<const FrequencyVector> vectors,
                         const Matrix& pattern_embeddings, std::size_t threads = 1);

// Gram matrix of dense rows.
KernelMatrix gram_kernel(const Matrix& rows, std::span<const std::string> ids,
                         std::size_t threads = 1);

// CSV: first line holds the graph ids, then one line of values per row.
void write_kernel_csv(const KernelMatrix& kernel, const std::filesystem::path& path);
KernelMatrix read_kernel_csv(const std::filesystem::path& path);

// JSON {graph_id: {token: frequency}}.
void write_frequency_json(std::span<const FrequencyVector> vectors, const Vocabulary& vocab,
                          const std::filesystem::path& path);

}  // namespace graphrep
