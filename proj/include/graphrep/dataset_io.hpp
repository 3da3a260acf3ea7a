#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "graphrep/graph.hpp"

namespace graphrep {

namespace fs = std::filesystem;

// One line of a `<name>.Labels` file. `graph_path` is relative to the
// directory holding the manifest; `class_label` is the original dataset label.
struct ManifestEntry {
  std::string graph_path;
  int class_label = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::string dataset_name;
  std::vector<ManifestEntry> entries;
};

// Converts a TU-Dortmund flat-file dataset into one GEXF file per graph plus
// a `<name>.Labels` manifest under `output_dir`. `input_dir` may hold the
// `<name>_*.txt` files directly or in a `<name>/` subdirectory. Graphs
// without a node-label file are labelled by node degree.
DatasetManifest format_dataset(const fs::path& input_dir, const std::string& dataset_name,
                               const fs::path& output_dir, std::size_t threads = 1);

// Reads a manifest and every graph file it references. Classes are remapped
// to 0..C-1 in first-seen order. Graph ids are the file stems.
GraphDataset load_dataset(const fs::path& manifest_path, std::size_t threads = 1);

// `data/MUTAG` -> `data/MUTAG.Labels`; a path that already names a manifest
// is returned unchanged.
fs::path manifest_path_for(const fs::path& dataset);

DatasetManifest read_manifest(const fs::path& manifest_path);
void write_manifest(const DatasetManifest& manifest, const fs::path& manifest_path);

// GEXF subset: nodes with a string `Label` attribute plus undirected edges.
std::string to_gexf(const Graph& g);
Graph parse_gexf(const std::string& xml, const std::string& graph_id);
void write_gexf(const Graph& g, const fs::path& path);
Graph read_gexf(const fs::path& path);

// Replaces every node label with its degree in decimal.
Graph degree_labelled(const Graph& g);

}  // namespace graphrep
