#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace graphrep {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Node-labelled, undirected, simple graph with dense node ids 0..n-1.
// Immutable once built; neighbour lists are kept sorted ascending.
class Graph {
 public:
  Graph() = default;

  // Builds the adjacency from an edge list. Each undirected edge may be given
  // once or in both directions; duplicates collapse. Throws InputError on
  // self-loops, out-of-range endpoints, or empty/whitespace-bearing labels.
  Graph(std::string id, std::vector<std::string> labels, std::span<const Edge> edges);

  const std::string& id() const { return id_; }
  std::size_t num_nodes() const { return labels_.size(); }
  std::size_t num_edges() const;

  const std::string& label(NodeId v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  bool has_edge(NodeId u, NodeId v) const;

  // Edges as (u, v) with u < v, in ascending order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::string id_;
  std::vector<std::string> labels_;
  std::vector<std::vector<NodeId>> adjacency_;
};

// A labelled collection of graphs. `classes[i]` is the remapped class
// (0..C-1) of `graphs[i]`; `class_values[c]` is the original integer label
// of class c.
struct GraphDataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<int> classes;
  std::vector<int> class_values;

  std::size_t size() const { return graphs.size(); }
  std::size_t num_classes() const { return class_values.size(); }
  int class_of(const std::string& graph_id) const;

  // Checks id uniqueness and class alignment; throws DataError.
  void validate() const;
};

// Remaps arbitrary integer class labels to 0..C-1 in first-seen order.
// Returns (remapped, original value per class).
std::pair<std::vector<int>, std::vector<int>> remap_classes(std::span<const int> raw);

// Hop distances from `source`. Unreachable nodes are omitted.
std::map<NodeId, std::size_t> bfs_distances(const Graph& g, NodeId source);

// Same as bfs_distances but as a dense row; unreachable nodes hold -1.
std::vector<int> hop_distance_row(const Graph& g, NodeId source);

// Relabels node v as perm[v]. Labels follow their nodes.
Graph permute(const Graph& g, std::span<const NodeId> perm);

// Connected components as lists of node ids (ascending), ordered by smallest
// member.
std::vector<std::vector<NodeId>> connected_components(const Graph& g);

}  // namespace graphrep
