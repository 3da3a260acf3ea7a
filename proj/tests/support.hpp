#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "graphrep/graph.hpp"
#include "graphrep/rng.hpp"

namespace testing {

namespace fs = std::filesystem;
using graphrep::Edge;
using graphrep::Graph;
using graphrep::NodeId;
using graphrep::Rng;

inline fs::path data_dir() { return GRAPHREP_TEST_DATA; }

// Fresh directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::ostringstream name;
    name << "graphrep_test_" << ::getpid() << '_' << counter++;
    path_ = fs::temp_directory_path() / name.str();
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Erdos-Renyi graph with labels drawn from {A, B, ...}.
inline Graph random_graph(Rng& rng, std::size_t n, double p, std::size_t num_labels,
                          const std::string& id = "g") {
  std::vector<std::string> labels(n);
  for (auto& l : labels) l = std::string(1, static_cast<char>('A' + rng.uniform_index(num_labels)));
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.uniform_real() < p) edges.emplace_back(u, v);
    }
  }
  return Graph(id, std::move(labels), edges);
}

inline std::vector<NodeId> random_permutation(Rng& rng, std::size_t n) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  rng.shuffle(std::span(perm));
  return perm;
}

template <typename T>
std::vector<T> sorted(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// All-pairs hop distances; -1 where unreachable.
inline std::vector<std::vector<int>> floyd_warshall(const Graph& g) {
  const int n = static_cast<int>(g.num_nodes());
  const int inf = n + 1;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int v = 0; v < n; ++v) d[v][v] = 0;
  for (const auto& [u, v] : g.edges()) d[u][v] = d[v][u] = 1;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  for (auto& row : d) {
    for (auto& x : row) {
      if (x >= inf) x = -1;
    }
  }
  return d;
}

// True when some bijection a[i] -> b[perm[i]] preserves adjacency.
inline bool induced_isomorphic(const Graph& g, const std::vector<NodeId>& a,
                               const std::vector<NodeId>& b) {
  if (a.size() != b.size()) return false;
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < a.size() && ok; ++j) {
        ok = g.has_edge(a[i], a[j]) == g.has_edge(b[perm[i]], b[perm[j]]);
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

inline bool induced_connected(const Graph& g, const std::vector<NodeId>& nodes) {
  std::vector<bool> seen(nodes.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (!seen[j] && g.has_edge(nodes[i], nodes[j])) {
        seen[j] = true;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == nodes.size();
}

// Every k-subset of 0..n-1 in lexicographic order.
inline std::vector<std::vector<NodeId>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<NodeId>> out;
  if (k > n) return out;
  std::vector<NodeId> cur(k);
  std::iota(cur.begin(), cur.end(), NodeId{0});
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

// Sequences a_0 = 1, a_{i+1} <= max(prefix) + 1, consecutive entries
// distinct, with l + 1 entries.
inline std::set<std::vector<int>> anonymous_sequences(std::size_t l) {
  std::set<std::vector<int>> out;
  std::vector<int> seq{1};
  auto grow = [&](auto&& self, int top) -> void {
    if (seq.size() == l + 1) {
      out.insert(seq);
      return;
    }
    for (int next = 1; next <= top + 1; ++next) {
      if (next == seq.back()) continue;
      seq.push_back(next);
      self(self, std::max(top, next));
      seq.pop_back();
    }
  };
  grow(grow, 1);
  return out;
}

inline Graph complete_graph(std::size_t n, const std::string& label = "X") {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph("K" + std::to_string(n), std::vector<std::string>(n, label), edges);
}

}  // namespace testing
