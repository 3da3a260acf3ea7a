#include "graphrep/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "graphrep/error.hpp"

namespace graphrep {
namespace {

void require_vocab(const Vocabulary& vocab) {
  if (vocab.empty()) throw InputError("corpus construction needs a non-empty vocabulary");
}

}  // namespace

SkipgramCorpus build_skipgram_corpus(std::span<const PatternDocument> documents,
                                     const Vocabulary& vocab, std::size_t window) {
  require_vocab(vocab);
  if (window < 1) throw InputError("skipgram window must be >= 1");
  SkipgramCorpus corpus;
  for (const auto& doc : documents) {
    const auto ids = encode(doc, vocab);
    const auto n = ids.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto lo = i >= window ? i - window : 0;
      const auto hi = std::min(n - 1, i + window);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) corpus.pairs.push_back({ids[i], ids[j]});
      }
    }
  }
  return corpus;
}

PvdbowCorpus build_pvdbow_corpus(std::span<const PatternDocument> documents,
                                 const Vocabulary& vocab) {
  require_vocab(vocab);
  PvdbowCorpus corpus;
  for (std::size_t g = 0; g < documents.size(); ++g) {
    for (PatternId id : encode(documents[g], vocab)) {
      corpus.pairs.push_back({static_cast<std::uint32_t>(g), id});
    }
  }
  return corpus;
}

PvdmCorpus build_pvdm_corpus(std::span<const PatternDocument> documents,
                             const Vocabulary& vocab, std::size_t window) {
  require_vocab(vocab);
  if (window < 1) throw InputError("PV-DM window must be >= 1");
  PvdmCorpus corpus;
  corpus.window = window;
  for (std::size_t g = 0; g < documents.size(); ++g) {
    const auto ids = encode(documents[g], vocab);
    const auto n = static_cast<std::ptrdiff_t>(ids.size());
    const auto w = static_cast<std::ptrdiff_t>(window);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::ptrdiff_t j = i - w; j <= i + w; ++j) {
        if (j == i) continue;
        corpus.contexts.push_back(j >= 0 && j < n ? ids[j] : kPad);
      }
      corpus.graphs.push_back(static_cast<std::uint32_t>(g));
      corpus.targets.push_back(ids[i]);
    }
  }
  return corpus;
}

Decomposition prune_min_count(const Decomposition& decomposition, std::uint64_t min_count) {
  Decomposition out;
  out.documents.reserve(decomposition.documents.size());
  for (const auto& doc : decomposition.documents) {
    PatternDocument kept{doc.graph_id, {}};
    for (const auto& token : doc.tokens) {
      if (decomposition.vocab.count(decomposition.vocab.id(token)) >= min_count) {
        kept.tokens.push_back(token);
      }
    }
    out.documents.push_back(std::move(kept));
  }
  out.vocab = Vocabulary::build(out.documents);
  return out;
}

NegativeSampler::NegativeSampler(std::span<const std::uint64_t> counts, std::uint64_t seed,
                                 double exponent)
    : rng_(seed) {
  if (counts.empty()) throw InputError("negative sampler needs a non-empty vocabulary");
  if (!(exponent > 0.0)) throw InputError("noise exponent must be positive");
  std::vector<double> weights(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    weights[i] = exponent == 1.0 ? static_cast<double>(counts[i])
                                 : std::pow(static_cast<double>(counts[i]), exponent);
    total += weights[i];
  }
  if (!(total > 0.0)) throw InputError("negative sampler needs positive counts");
  probabilities_.resize(counts.size());
  cumulative_.resize(counts.size());
  double running = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probabilities_[i] = weights[i] / total;
    running += weights[i];
    cumulative_[i] = running / total;
  }
  cumulative_.back() = 1.0;
}

NegativeSampler NegativeSampler::fork(std::uint64_t seed) const {
  NegativeSampler copy(*this);
  copy.rng_ = Rng(seed);
  return copy;
}

double NegativeSampler::probability(PatternId id) const { return probabilities_.at(id); }

PatternId NegativeSampler::draw() {
  const double u = rng_.uniform_real();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return static_cast<PatternId>(std::min<std::size_t>(it - cumulative_.begin(),
                                                      cumulative_.size() - 1));
}

void NegativeSampler::sample_into(std::span<PatternId> out, PatternId forbidden) {
  if (cumulative_.size() < 2) {
    throw InputError("negative sampling needs at least two patterns in the vocabulary");
  }
  if (forbidden < probabilities_.size() && probabilities_[forbidden] >= 1.0) {
    throw InputError("negative sampling cannot avoid the only pattern with non-zero mass");
  }
  for (auto& slot : out) {
    PatternId id = draw();
    while (id == forbidden) id = draw();
    slot = id;
  }
}

std::vector<PatternId> NegativeSampler::sample(std::size_t k, PatternId forbidden) {
  if (k < 1) throw InputError("negative sample count must be >= 1");
  std::vector<PatternId> out(k);
  sample_into(out, forbidden);
  return out;
}

}  // namespace graphrep
