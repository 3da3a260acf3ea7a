#include "graphrep/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "graphrep/error.hpp"
#include "graphrep/parallel.hpp"

namespace graphrep {
namespace {

namespace pt = boost::property_tree;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view s, long long& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<long long> read_int_column(const fs::path& path) {
  std::vector<long long> values;
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot read " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    long long v = 0;
    if (!parse_int(line, v)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected an integer");
    }
    values.push_back(v);
  }
  return values;
}

fs::path locate_dortmund_dir(const fs::path& input_dir, const std::string& name) {
  const auto nested = input_dir / name;
  if (fs::exists(nested / (name + "_A.txt"))) return nested;
  return input_dir;
}

fs::path require_file(const fs::path& dir, const std::string& name, const std::string& suffix) {
  auto path = dir / (name + suffix);
  if (!fs::is_regular_file(path)) {
    throw IngestionError("missing dataset file " + path.string());
  }
  return path;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

Graph degree_labelled(const Graph& g) {
  std::vector<std::string> labels(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) labels[v] = std::to_string(g.degree(v));
  const auto edges = g.edges();
  return Graph(g.id(), std::move(labels), edges);
}

std::string to_gexf(const Graph& g) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n"
      << "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n"
      << "    <attributes class=\"node\">\n"
      << "      <attribute id=\"0\" title=\"Label\" type=\"string\"/>\n"
      << "    </attributes>\n"
      << "    <nodes>\n";
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    out << "      <node id=\"" << v << "\" label=\"" << v << "\">\n"
        << "        <attvalues>\n"
        << "          <attvalue for=\"0\" value=\"" << xml_escape(g.label(v)) << "\"/>\n"
        << "        </attvalues>\n"
        << "      </node>\n";
  }
  out << "    </nodes>\n"
      << "    <edges>\n";
  std::size_t edge_id = 0;
  for (const auto& [u, v] : g.edges()) {
    out << "      <edge id=\"" << edge_id++ << "\" source=\"" << u << "\" target=\"" << v
        << "\"/>\n";
  }
  out << "    </edges>\n"
      << "  </graph>\n"
      << "</gexf>\n";
  return out.str();
}

Graph parse_gexf(const std::string& xml, const std::string& graph_id) {
  pt::ptree tree;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("graph '" + graph_id + "': " + e.message());
  }
  const auto gexf = tree.get_child_optional("gexf");
  if (!gexf) throw ParseError("graph '" + graph_id + "': no <gexf> root element");
  const auto graph = gexf->get_child_optional("graph");
  if (!graph) throw ParseError("graph '" + graph_id + "': no <graph> element");

  std::string label_attr;
  for (const auto& [tag, attrs] : *graph) {
    if (tag != "attributes" || attrs.get("<xmlattr>.class", "") != "node") continue;
    for (const auto& [atag, attr] : attrs) {
      if (atag == "attribute" && attr.get("<xmlattr>.title", "") == "Label") {
        label_attr = attr.get("<xmlattr>.id", "");
      }
    }
  }

  std::unordered_map<std::string, NodeId> index;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (const auto& [tag, section] : *graph) {
    if (tag == "nodes") {
      for (const auto& [ntag, node] : section) {
        if (ntag != "node") continue;
        const auto id = node.get_optional<std::string>("<xmlattr>.id");
        if (!id) throw ParseError("graph '" + graph_id + "': node without id");
        std::optional<std::string> value;
        if (const auto attvalues = node.get_child_optional("attvalues")) {
          for (const auto& [vtag, att] : *attvalues) {
            if (vtag == "attvalue" && att.get("<xmlattr>.for", "") == label_attr) {
              if (const auto v = att.get_optional<std::string>("<xmlattr>.value")) value = *v;
            }
          }
        }
        if (!value || label_attr.empty()) {
          throw ParseError("graph '" + graph_id + "': node '" + *id + "' has no Label value");
        }
        if (!index.emplace(*id, static_cast<NodeId>(labels.size())).second) {
          throw ParseError("graph '" + graph_id + "': duplicate node id '" + *id + "'");
        }
        labels.push_back(*value);
      }
    }
  }
  for (const auto& [tag, section] : *graph) {
    if (tag != "edges") continue;
    for (const auto& [etag, edge] : section) {
      if (etag != "edge") continue;
      const auto source = edge.get_optional<std::string>("<xmlattr>.source");
      const auto target = edge.get_optional<std::string>("<xmlattr>.target");
      if (!source || !target) throw ParseError("graph '" + graph_id + "': edge missing endpoint");
      const auto s = index.find(*source);
      const auto t = index.find(*target);
      if (s == index.end() || t == index.end()) {
        throw ParseError("graph '" + graph_id + "': edge references unknown node");
      }
      edges.emplace_back(s->second, t->second);
    }
  }
  try {
    return Graph(graph_id, std::move(labels), edges);
  } catch (const InputError& e) {
    throw ParseError(e.what());
  }
}

void write_gexf(const Graph& g, const fs::path& path) { write_text(path, to_gexf(g)); }

Graph read_gexf(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot read graph file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_gexf(buffer.str(), path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

fs::path manifest_path_for(const fs::path& dataset) {
  if (dataset.extension() == ".Labels") return dataset;
  auto p = dataset;
  if (!p.has_filename()) p = p.parent_path();
  p += ".Labels";
  return p;
}

DatasetManifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IngestionError("cannot read manifest " + manifest_path.string());
  DatasetManifest manifest;
  manifest.dataset_name = manifest_path.stem().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto split = body.find_last_of(" \t");
    long long label = 0;
    if (split == std::string_view::npos || !parse_int(body.substr(split + 1), label)) {
      throw DataError(manifest_path.string() + ":" + std::to_string(line_no) +
                      ": expected '<graph path> <integer class>'");
    }
    manifest.entries.push_back({std::string(trim(body.substr(0, split))), static_cast<int>(label)});
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& manifest_path) {
  std::string text;
  for (const auto& e : manifest.entries) {
    text += e.graph_path + " " + std::to_string(e.class_label) + "\n";
  }
  write_text(manifest_path, text);
}

DatasetManifest format_dataset(const fs::path& input_dir, const std::string& dataset_name,
                               const fs::path& output_dir, std::size_t threads) {
  const auto dir = locate_dortmund_dir(input_dir, dataset_name);
  const auto edges_path = require_file(dir, dataset_name, "_A.txt");
  const auto indicator_path = require_file(dir, dataset_name, "_graph_indicator.txt");
  const auto graph_labels_path = require_file(dir, dataset_name, "_graph_labels.txt");
  const auto node_labels_path = dir / (dataset_name + "_node_labels.txt");
  const bool has_node_labels = fs::is_regular_file(node_labels_path);

  const auto indicator = read_int_column(indicator_path);
  const auto graph_labels = read_int_column(graph_labels_path);
  const auto num_graphs = graph_labels.size();
  const auto num_nodes = indicator.size();

  // Global (1-based) node id -> (graph index, local id).
  std::vector<std::size_t> node_graph(num_nodes);
  std::vector<NodeId> node_local(num_nodes);
  std::vector<std::size_t> graph_sizes(num_graphs, 0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    if (indicator[i] < 1 || static_cast<std::size_t>(indicator[i]) > num_graphs) {
      throw DataError(indicator_path.string() + ":" + std::to_string(i + 1) +
                      ": graph id out of range");
    }
    const auto gi = static_cast<std::size_t>(indicator[i] - 1);
    node_graph[i] = gi;
    node_local[i] = static_cast<NodeId>(graph_sizes[gi]++);
  }

  std::vector<std::vector<std::string>> labels(num_graphs);
  for (std::size_t gi = 0; gi < num_graphs; ++gi) labels[gi].resize(graph_sizes[gi]);
  if (has_node_labels) {
    const auto lines = read_lines(node_labels_path);
    if (lines.size() != num_nodes) {
      throw DataError(node_labels_path.string() + ": " + std::to_string(lines.size()) +
                      " labels for " + std::to_string(num_nodes) + " nodes");
    }
    for (std::size_t i = 0; i < num_nodes; ++i) {
      labels[node_graph[i]][node_local[i]] = std::string(trim(lines[i]));
    }
  }

  std::vector<std::vector<Edge>> edges(num_graphs);
  {
    std::ifstream in(edges_path);
    if (!in) throw IngestionError("cannot read " + edges_path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto body = trim(line);
      if (body.empty()) continue;
      const auto comma = body.find(',');
      long long a = 0;
      long long b = 0;
      if (comma == std::string_view::npos || !parse_int(body.substr(0, comma), a) ||
          !parse_int(body.substr(comma + 1), b)) {
        throw DataError(edges_path.string() + ":" + std::to_string(line_no) +
                        ": expected 'i, j'");
      }
      const auto bad = [&](long long x) {
        return x < 1 || static_cast<std::size_t>(x) > num_nodes;
      };
      if (bad(a) || bad(b)) {
        throw DataError(edges_path.string() + ":" + std::to_string(line_no) +
                        ": node id out of range");
      }
      const auto ga = node_graph[a - 1];
      if (ga != node_graph[b - 1]) {
        throw DataError(edges_path.string() + ":" + std::to_string(line_no) +
                        ": edge joins nodes of different graphs");
      }
      if (a == b) continue;
      edges[ga].emplace_back(node_local[a - 1], node_local[b - 1]);
    }
  }

  const auto graph_dir = output_dir / dataset_name;
  fs::create_directories(graph_dir);
  DatasetManifest manifest;
  manifest.dataset_name = dataset_name;
  manifest.entries.resize(num_graphs);
  parallel_for(num_graphs, threads, [&](std::size_t gi) {
    const auto id = std::to_string(gi);
    Graph g(id, has_node_labels ? labels[gi] : std::vector<std::string>(graph_sizes[gi], "0"),
            edges[gi]);
    if (!has_node_labels) g = degree_labelled(g);
    write_gexf(g, graph_dir / (id + ".gexf"));
    manifest.entries[gi] = {dataset_name + "/" + id + ".gexf", static_cast<int>(graph_labels[gi])};
  });
  write_manifest(manifest, manifest_path_for(output_dir / dataset_name));
  return manifest;
}

GraphDataset load_dataset(const fs::path& manifest_path, std::size_t threads) {
  const auto manifest = read_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  GraphDataset dataset;
  dataset.name = manifest.dataset_name;
  dataset.graphs.resize(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    const auto path = base / e.graph_path;
    if (!fs::is_regular_file(path)) {
      throw IngestionError("manifest " + manifest_path.string() + " references missing file " +
                           path.string());
    }
  }
  parallel_for(manifest.entries.size(), threads, [&](std::size_t i) {
    dataset.graphs[i] = read_gexf(base / manifest.entries[i].graph_path);
  });
  std::vector<int> raw;
  raw.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) raw.push_back(e.class_label);
  std::tie(dataset.classes, dataset.class_values) = remap_classes(raw);
  dataset.validate();
  return dataset;
}

}  // namespace graphrep
