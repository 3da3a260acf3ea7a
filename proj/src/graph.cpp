#include "graphrep/graph.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "graphrep/error.hpp"

namespace graphrep {
namespace {

bool has_space(const std::string& s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

Graph::Graph(std::string id, std::vector<std::string> labels, std::span<const Edge> edges)
    : id_(std::move(id)), labels_(std::move(labels)), adjacency_(labels_.size()) {
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    if (labels_[v].empty() || has_space(labels_[v])) {
      throw InputError("graph '" + id_ + "': node " + std::to_string(v) +
                       " has an empty or whitespace-bearing label");
    }
  }
  const auto n = labels_.size();
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw InputError("graph '" + id_ + "': edge (" + std::to_string(u) + ", " +
                       std::to_string(v) + ") references a missing node");
    }
    if (u == v) {
      throw InputError("graph '" + id_ + "': self-loop on node " + std::to_string(u));
    }
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& row : adjacency_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
}

std::size_t Graph::num_edges() const {
  std::size_t total = 0;
  for (const auto& row : adjacency_) total += row.size();
  return total / 2;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto& row = adjacency_[u];
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (NodeId u = 0; u < adjacency_.size(); ++u) {
    for (NodeId v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

int GraphDataset::class_of(const std::string& graph_id) const {
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (graphs[i].id() == graph_id) return classes[i];
  }
  throw InputError("unknown graph id '" + graph_id + "'");
}

void GraphDataset::validate() const {
  if (classes.size() != graphs.size()) {
    throw DataError("dataset '" + name + "': " + std::to_string(graphs.size()) +
                    " graphs but " + std::to_string(classes.size()) + " class labels");
  }
  std::unordered_set<std::string> seen;
  for (const auto& g : graphs) {
    if (!seen.insert(g.id()).second) {
      throw DataError("dataset '" + name + "': duplicate graph id '" + g.id() + "'");
    }
  }
  for (int c : classes) {
    if (c < 0 || static_cast<std::size_t>(c) >= class_values.size()) {
      throw DataError("dataset '" + name + "': class index out of range");
    }
  }
}

std::pair<std::vector<int>, std::vector<int>> remap_classes(std::span<const int> raw) {
  std::unordered_map<int, int> index;
  std::vector<int> remapped;
  std::vector<int> values;
  remapped.reserve(raw.size());
  for (int value : raw) {
    auto [it, inserted] = index.try_emplace(value, static_cast<int>(values.size()));
    if (inserted) values.push_back(value);
    remapped.push_back(it->second);
  }
  return {std::move(remapped), std::move(values)};
}

std::vector<int> hop_distance_row(const Graph& g, NodeId source) {
  if (source >= g.num_nodes()) {
    throw InputError("bfs source " + std::to_string(source) + " not in graph '" + g.id() + "'");
  }
  std::vector<int> dist(g.num_nodes(), -1);
  std::vector<NodeId> queue;
  queue.reserve(g.num_nodes());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::map<NodeId, std::size_t> bfs_distances(const Graph& g, NodeId source) {
  const auto row = hop_distance_row(g, source);
  std::map<NodeId, std::size_t> out;
  for (NodeId v = 0; v < row.size(); ++v) {
    if (row[v] >= 0) out.emplace(v, static_cast<std::size_t>(row[v]));
  }
  return out;
}

Graph permute(const Graph& g, std::span<const NodeId> perm) {
  const auto n = g.num_nodes();
  if (perm.size() != n) {
    throw InputError("permutation has " + std::to_string(perm.size()) +
                     " entries for a graph of " + std::to_string(n) + " nodes");
  }
  std::vector<bool> hit(n, false);
  for (NodeId target : perm) {
    if (target >= n || hit[target]) throw InputError("permutation is not a bijection");
    hit[target] = true;
  }
  std::vector<std::string> labels(n);
  for (NodeId v = 0; v < n; ++v) labels[perm[v]] = g.label(v);
  auto edges = g.edges();
  for (auto& [u, v] : edges) {
    u = perm[u];
    v = perm[v];
  }
  return Graph(g.id(), std::move(labels), edges);
}

std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
  std::vector<std::vector<NodeId>> out;
  std::vector<bool> seen(g.num_nodes(), false);
  for (NodeId start = 0; start < g.num_nodes(); ++start) {
    if (seen[start]) continue;
    std::vector<NodeId> component{start};
    seen[start] = true;
    for (std::size_t head = 0; head < component.size(); ++head) {
      for (NodeId v : g.neighbors(component[head])) {
        if (!seen[v]) {
          seen[v] = true;
          component.push_back(v);
        }
      }
    }
    std::sort(component.begin(), component.end());
    out.push_back(std::move(component));
  }
  return out;
}

}  // namespace graphrep
