#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "graphrep/decomposition.hpp"
#include "graphrep/rng.hpp"
#include "graphrep/vocabulary.hpp"

namespace graphrep {

// Reserved context id for PV-DM windows that run past a document edge.
inline constexpr PatternId kPad = std::numeric_limits<PatternId>::max();

struct TargetContext {
  std::uint32_t target;
  PatternId context;

  friend bool operator==(const TargetContext&, const TargetContext&) = default;
};

// (pattern, pattern) pairs from a sliding window over each document.
struct SkipgramCorpus {
  std::vector<TargetContext> pairs;
};

// (graph index, pattern) for every token occurrence.
struct PvdbowCorpus {
  std::vector<TargetContext> pairs;
};

// For every token position: the graph, 2*window surrounding patterns (kPad
// where the window leaves the document) and the pattern at the position.
struct PvdmCorpus {
  std::size_t window = 0;
  std::vector<std::uint32_t> graphs;
  std::vector<PatternId> contexts;  // samples * 2 * window, row-major
  std::vector<PatternId> targets;

  std::size_t size() const { return targets.size(); }
  std::span<const PatternId> context(std::size_t sample) const {
    return std::span(contexts).subspan(sample * 2 * window, 2 * window);
  }
};

SkipgramCorpus build_skipgram_corpus(std::span<const PatternDocument> documents,
                                     const Vocabulary& vocab, std::size_t window);
PvdbowCorpus build_pvdbow_corpus(std::span<const PatternDocument> documents,
                                 const Vocabulary& vocab);
PvdmCorpus build_pvdm_corpus(std::span<const PatternDocument> documents,
                             const Vocabulary& vocab, std::size_t window);

// Drops tokens occurring fewer than `min_count` times and rebuilds the
// vocabulary over what remains.
Decomposition prune_min_count(const Decomposition& decomposition, std::uint64_t min_count);

// Draws pattern ids from the unigram distribution count(p)^exponent,
// normalised. With exponent 1 this is count(p) / total.
class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::uint64_t> counts, std::uint64_t seed,
                  double exponent = 1.0);

  // Same distribution, independent stream.
  NegativeSampler fork(std::uint64_t seed) const;

  double probability(PatternId id) const;
  std::size_t size() const { return cumulative_.size(); }

  PatternId draw();
  // k i.i.d. draws, redrawing any that equal `forbidden`.
  std::vector<PatternId> sample(std::size_t k, PatternId forbidden);
  void sample_into(std::span<PatternId> out, PatternId forbidden);

 private:
  std::vector<double> cumulative_;
  std::vector<double> probabilities_;
  Rng rng_;
};

}  // namespace graphrep
