#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "graphrep/graph.hpp"
#include "graphrep/rng.hpp"
#include "graphrep/vocabulary.hpp"

namespace graphrep {

// Documents for every graph of a dataset (in dataset order) and the shared
// vocabulary built over them.
struct Decomposition {
  std::vector<PatternDocument> documents;
  Vocabulary vocab;
};

// Weisfeiler-Lehman rooted subtree patterns up to `depth`. Signatures are
// compressed through a dataset-global dictionary per depth, so tokens read
// `wl{h}_{id}`. Each graph contributes n tokens per depth, ordered by
// (depth, node id).
Decomposition wl_corpus(const GraphDataset& dataset, std::size_t depth,
                        bool include_depth0 = true, std::size_t threads = 1);

// `sp_{a}_{b}_{d}` for every connected unordered node pair, a <= b being the
// two node labels and d the hop distance.
Decomposition sp_corpus(const GraphDataset& dataset, std::size_t threads = 1);

// Upper-triangle adjacency bit string of the induced subgraph on `nodes`
// (pair (0,1) is the most significant bit), minimised over all node
// orderings that keep degrees ascending. k = nodes.size() must be <= 8.
std::uint32_t graphlet_canonical_code(const Graph& g, std::span<const NodeId> nodes);

// `g{k}_{hex code}`.
std::string graphlet_token(std::size_t k, std::uint32_t code);

// Grows one connected node set of up to `size` nodes from a random start.
std::vector<NodeId> sample_connected_set(const Graph& g, std::size_t size, Rng& rng);

// `num_samples` sampled connected induced subgraphs of `size` nodes per
// graph, as unlabelled canonical tokens. Graph i uses seed mix_seed(seed, i).
Decomposition graphlet_corpus(const GraphDataset& dataset, std::size_t size,
                              std::size_t num_samples, std::uint64_t seed,
                              std::size_t threads = 1);

// `aw_1-2-1-3` style token for a walk given as node ids.
std::string anonymous_walk_token(std::span<const NodeId> walk);

// Number of walks with exactly `length` edges, summed over start nodes.
double count_walks(const Graph& g, std::size_t length);

inline constexpr double kDefaultWalkBudget = 1e8;

// Every walk of exactly `length` edges from every node, anonymised, in DFS
// order. Throws BudgetError when some graph has more than `walk_budget`
// walks.
Decomposition anonymous_walk_corpus(const GraphDataset& dataset, std::size_t length,
                                    double walk_budget = kDefaultWalkBudget,
                                    std::size_t threads = 1);

// Document files: `<dir>/<graph id>.<extension>`, tokens separated by single
// spaces, LF-terminated.
void write_document(const PatternDocument& doc, const std::filesystem::path& path);
PatternDocument read_document(const std::filesystem::path& path, const std::string& graph_id);

}  // namespace graphrep
