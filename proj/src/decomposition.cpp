#include "graphrep/decomposition.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "graphrep/error.hpp"
#include "graphrep/log.hpp"
#include "graphrep/parallel.hpp"

namespace graphrep {
namespace {

constexpr std::size_t kMaxGraphletSize = 8;
constexpr int kSampleAttempts = 50;

Decomposition finish(std::vector<PatternDocument> documents) {
  Decomposition out;
  out.vocab = Vocabulary::build(documents);
  out.documents = std::move(documents);
  return out;
}

std::vector<PatternDocument> empty_documents(const GraphDataset& dataset) {
  std::vector<PatternDocument> docs(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) docs[i].graph_id = dataset.graphs[i].id();
  return docs;
}

// Grows a connected set from `start` by repeatedly adding a uniformly chosen
// node adjacent to the set, until `size` nodes or the component runs out.
std::vector<NodeId> grow_from(const Graph& g, NodeId start, std::size_t size, Rng& rng) {
  std::vector<NodeId> members{start};
  std::vector<NodeId> frontier;
  std::vector<char> state(g.num_nodes(), 0);  // 1 = member, 2 = frontier
  state[start] = 1;
  const auto expand = [&](NodeId v) {
    for (NodeId u : g.neighbors(v)) {
      if (state[u] == 0) {
        state[u] = 2;
        frontier.push_back(u);
      }
    }
  };
  expand(start);
  while (members.size() < size && !frontier.empty()) {
    const auto pick = static_cast<std::size_t>(rng.uniform_index(frontier.size()));
    const NodeId v = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    state[v] = 1;
    members.push_back(v);
    expand(v);
  }
  return members;
}

void anonymous_walks_from(const Graph& g, NodeId start, std::size_t length,
                          std::vector<std::string>& out) {
  std::vector<NodeId> walk{start};
  walk.reserve(length + 1);
  // Iterative DFS: cursor[i] is the next neighbour index to try at depth i.
  std::vector<std::size_t> cursor(length + 1, 0);
  while (!walk.empty()) {
    const auto depth = walk.size() - 1;
    if (depth == length) {
      out.push_back(anonymous_walk_token(walk));
      walk.pop_back();
      continue;
    }
    const auto neighbors = g.neighbors(walk.back());
    if (cursor[depth] < neighbors.size()) {
      walk.push_back(neighbors[cursor[depth]++]);
      cursor[depth + 1] = 0;
    } else {
      cursor[depth] = 0;
      walk.pop_back();
    }
  }
}

}  // namespace

Decomposition wl_corpus(const GraphDataset& dataset, std::size_t depth, bool include_depth0,
                        std::size_t threads) {
  if (dataset.size() == 0) throw InputError("wl_corpus: empty dataset");
  auto documents = empty_documents(dataset);
  const auto n_graphs = dataset.size();

  std::vector<std::vector<std::string>> current(n_graphs);
  for (std::size_t i = 0; i < n_graphs; ++i) current[i] = dataset.graphs[i].labels();

  std::vector<std::vector<std::string>> signatures(n_graphs);
  for (std::size_t h = 0; h <= depth; ++h) {
    if (h == 0) {
      signatures = current;
    } else {
      parallel_for(n_graphs, threads, [&](std::size_t i) {
        const auto& g = dataset.graphs[i];
        const auto& prev = current[i];
        auto& sig = signatures[i];
        sig.assign(g.num_nodes(), {});
        std::vector<std::string_view> neighbourhood;
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
          neighbourhood.clear();
          for (NodeId u : g.neighbors(v)) neighbourhood.emplace_back(prev[u]);
          std::sort(neighbourhood.begin(), neighbourhood.end());
          std::string s = prev[v];
          for (auto label : neighbourhood) {
            s += '_';
            s += label;
          }
          sig[v] = std::move(s);
        }
      });
    }
    // Sequential compression keeps ids in first-encounter order.
    std::unordered_map<std::string, std::size_t> dictionary;
    const std::string prefix = "wl" + std::to_string(h) + "_";
    for (std::size_t i = 0; i < n_graphs; ++i) {
      auto& next = current[i];
      const bool emit = h > 0 || include_depth0;
      for (std::size_t v = 0; v < signatures[i].size(); ++v) {
        const auto id = dictionary.try_emplace(signatures[i][v], dictionary.size()).first->second;
        const auto compressed = std::to_string(id);
        if (emit) documents[i].tokens.push_back(prefix + compressed);
        if (h > 0) next[v] = compressed;
      }
    }
  }
  return finish(std::move(documents));
}

Decomposition sp_corpus(const GraphDataset& dataset, std::size_t threads) {
  if (dataset.size() == 0) throw InputError("sp_corpus: empty dataset");
  auto documents = empty_documents(dataset);
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    const auto& g = dataset.graphs[i];
    auto& tokens = documents[i].tokens;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      const auto dist = hop_distance_row(g, u);
      for (NodeId v = u + 1; v < g.num_nodes(); ++v) {
        if (dist[v] < 0) continue;
        const auto& a = std::min(g.label(u), g.label(v));
        const auto& b = std::max(g.label(u), g.label(v));
        tokens.push_back("sp_" + a + "_" + b + "_" + std::to_string(dist[v]));
      }
    }
  });
  return finish(std::move(documents));
}

std::uint32_t graphlet_canonical_code(const Graph& g, std::span<const NodeId> nodes) {
  const auto k = nodes.size();
  if (k > kMaxGraphletSize) {
    throw InputError("graphlet size " + std::to_string(k) + " exceeds " +
                     std::to_string(kMaxGraphletSize));
  }
  bool adj[kMaxGraphletSize][kMaxGraphletSize] = {};
  std::size_t degree[kMaxGraphletSize] = {};
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (g.has_edge(nodes[a], nodes[b])) {
        adj[a][b] = adj[b][a] = true;
        ++degree[a];
        ++degree[b];
      }
    }
  }
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return degree[x] != degree[y] ? degree[x] < degree[y] : x < y;
  });
  // Blocks of equal degree; only orderings within blocks are scanned.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i;
    while (j < k && degree[order[j]] == degree[order[i]]) ++j;
    blocks.emplace_back(i, j);
    i = j;
  }
  std::uint32_t best = UINT32_MAX;
  while (true) {
    std::uint32_t code = 0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        code = (code << 1) | static_cast<std::uint32_t>(adj[order[a]][order[b]]);
      }
    }
    best = std::min(best, code);
    std::size_t b = blocks.size();
    bool advanced = false;
    while (b > 0) {
      --b;
      const auto [lo, hi] = blocks[b];
      if (std::next_permutation(order.begin() + lo, order.begin() + hi)) {
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return best;
}

std::string graphlet_token(std::size_t k, std::uint32_t code) {
  std::ostringstream out;
  out << 'g' << k << '_' << std::hex << code;
  return out.str();
}

std::vector<NodeId> sample_connected_set(const Graph& g, std::size_t size, Rng& rng) {
  if (g.num_nodes() == 0) return {};
  const auto start = static_cast<NodeId>(rng.uniform_index(g.num_nodes()));
  return grow_from(g, start, size, rng);
}

Decomposition graphlet_corpus(const GraphDataset& dataset, std::size_t size,
                              std::size_t num_samples, std::uint64_t seed,
                              std::size_t threads) {
  if (size < 2 || size > kMaxGraphletSize) {
    throw InputError("graphlet size must be in [2, 8], got " + std::to_string(size));
  }
  if (num_samples < 1) throw InputError("graphlet sample count must be >= 1");
  auto documents = empty_documents(dataset);
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    const auto& g = dataset.graphs[i];
    const auto components = connected_components(g);
    const std::vector<NodeId>* largest = nullptr;
    for (const auto& c : components) {
      if (!largest || c.size() > largest->size()) largest = &c;
    }
    if (!largest || largest->size() < 2) {
      log::warn("graph '" + g.id() + "' has no connected pair of nodes; no graphlets sampled");
      return;
    }
    Rng rng(mix_seed(seed, i));
    auto& tokens = documents[i].tokens;
    for (std::size_t s = 0; s < num_samples; ++s) {
      std::vector<NodeId> members;
      for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
        members = sample_connected_set(g, size, rng);
        if (members.size() == size) break;
      }
      if (members.size() != size) {
        const auto start = (*largest)[rng.uniform_index(largest->size())];
        members = grow_from(g, start, size, rng);
      }
      tokens.push_back(graphlet_token(members.size(), graphlet_canonical_code(g, members)));
    }
  });
  return finish(std::move(documents));
}

std::string anonymous_walk_token(std::span<const NodeId> walk) {
  std::string token = "aw_";
  std::vector<NodeId> seen;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    auto it = std::find(seen.begin(), seen.end(), walk[i]);
    if (it == seen.end()) {
      seen.push_back(walk[i]);
      it = seen.end() - 1;
    }
    if (i > 0) token += '-';
    token += std::to_string(it - seen.begin() + 1);
  }
  return token;
}

double count_walks(const Graph& g, std::size_t length) {
  std::vector<double> ways(g.num_nodes(), 1.0);
  std::vector<double> next(g.num_nodes());
  for (std::size_t step = 0; step < length; ++step) {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      double sum = 0.0;
      for (NodeId u : g.neighbors(v)) sum += ways[u];
      next[v] = sum;
    }
    ways.swap(next);
  }
  double total = 0.0;
  for (double w : ways) total += w;
  return total;
}

Decomposition anonymous_walk_corpus(const GraphDataset& dataset, std::size_t length,
                                    double walk_budget, std::size_t threads) {
  if (length < 1) throw InputError("anonymous walk length must be >= 1");
  for (const auto& g : dataset.graphs) {
    const double walks = count_walks(g, length);
    if (walk_budget > 0 && walks > walk_budget) {
      std::ostringstream msg;
      msg << "graph '" << g.id() << "' has " << walks << " walks of length " << length
          << ", over the budget of " << walk_budget
          << " walks per graph; lower --length or raise --budget";
      throw BudgetError(msg.str());
    }
  }
  auto documents = empty_documents(dataset);
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    const auto& g = dataset.graphs[i];
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      anonymous_walks_from(g, v, length, documents[i].tokens);
    }
  });
  return finish(std::move(documents));
}

void write_document(const PatternDocument& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (i > 0) out << ' ';
    out << doc.tokens[i];
  }
  out << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

PatternDocument read_document(const std::filesystem::path& path, const std::string& graph_id) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot read document " + path.string());
  PatternDocument doc{graph_id, {}};
  std::string token;
  while (in >> token) doc.tokens.push_back(std::move(token));
  return doc;
}

}  // namespace graphrep
