#include "graphrep/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "graphrep/error.hpp"
#include "graphrep/log.hpp"
#include "graphrep/numeric_format.hpp"
#include "graphrep/parallel.hpp"

namespace graphrep {
namespace {

KernelMatrix empty_kernel(std::span<const FrequencyVector> vectors) {
  KernelMatrix k;
  for (const auto& v : vectors) k.graph_ids.push_back(v.graph_id);
  k.values.assign(vectors.size() * vectors.size(), 0.0);
  return k;
}

// Fills the upper triangle row by row and mirrors it.
template <typename Entry>
void fill_symmetric(KernelMatrix& k, std::size_t threads, Entry entry) {
  const auto n = k.size();
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      const double value = entry(i, j);
      k(i, j) = value;
      k(j, i) = value;
    }
  });
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r') {
    cells.back().pop_back();
  }
  return cells;
}

}  // namespace

double FrequencyVector::sum() const {
  double total = 0.0;
  for (const auto& [id, value] : entries) total += value;
  return total;
}

std::vector<FrequencyVector> frequency_vectors(std::span<const PatternDocument> documents,
                                               const Vocabulary& vocab) {
  std::vector<FrequencyVector> out;
  out.reserve(documents.size());
  for (const auto& doc : documents) {
    FrequencyVector vec{doc.graph_id, {}};
    if (doc.tokens.empty()) {
      log::warn("graph '" + doc.graph_id + "' has an empty document; using a zero vector");
      out.push_back(std::move(vec));
      continue;
    }
    std::unordered_map<PatternId, std::size_t> counts;
    for (PatternId id : encode(doc, vocab)) ++counts[id];
    const double length = static_cast<double>(doc.tokens.size());
    vec.entries.reserve(counts.size());
    for (const auto& [id, c] : counts) vec.entries.emplace_back(id, static_cast<double>(c) / length);
    std::sort(vec.entries.begin(), vec.entries.end());
    out.push_back(std::move(vec));
  }
  return out;
}

double sparse_dot(const FrequencyVector& a, const FrequencyVector& b) {
  double sum = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      sum += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return sum;
}

double squared_distance(const FrequencyVector& a, const FrequencyVector& b) {
  double sum = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() || j != b.entries.end()) {
    double diff = 0.0;
    if (j == b.entries.end() || (i != a.entries.end() && i->first < j->first)) {
      diff = i->second;
      ++i;
    } else if (i == a.entries.end() || j->first < i->first) {
      diff = j->second;
      ++j;
    } else {
      diff = i->second - j->second;
      ++i;
      ++j;
    }
    sum += diff * diff;
  }
  return sum;
}

KernelMatrix linear_kernel(std::span<const FrequencyVector> vectors, std::size_t threads) {
  auto k = empty_kernel(vectors);
  fill_symmetric(k, threads, [&](std::size_t i, std::size_t j) {
    return sparse_dot(vectors[i], vectors[j]);
  });
  return k;
}

KernelMatrix rbf_kernel(std::span<const FrequencyVector> vectors, double gamma,
                        std::size_t threads) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InputError("rbf gamma must be a positive finite number");
  }
  auto k = empty_kernel(vectors);
  fill_symmetric(k, threads, [&](std::size_t i, std::size_t j) {
    if (i == j) return 1.0;
    return std::exp(-gamma * squared_distance(vectors[i], vectors[j]));
  });
  return k;
}

double median_heuristic_gamma(std::span<const FrequencyVector> vectors) {
  std::vector<double> distances;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      distances.push_back(std::sqrt(squared_distance(vectors[i], vectors[j])));
    }
  }
  if (distances.empty()) {
    log::warn("median heuristic needs two graphs; using gamma = 1");
    return 1.0;
  }
  std::sort(distances.begin(), distances.end());
  const auto m = distances.size();
  const double median =
      m % 2 == 1 ? distances[m / 2] : 0.5 * (distances[m / 2 - 1] + distances[m / 2]);
  if (!(median > 0.0)) {
    log::warn("median pairwise distance is zero; using gamma = 1");
    return 1.0;
  }
  return 1.0 / (2.0 * median * median);
}

KernelMatrix deep_kernel(std::span<const FrequencyVector> vectors,
                         const Matrix& pattern_embeddings, std::size_t threads) {
  const auto d = pattern_embeddings.cols();
  Matrix projected(vectors.size(), d);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    ids.push_back(vectors[i].graph_id);
    auto row = projected.row(i);
    for (const auto& [id, value] : vectors[i].entries) {
      if (id >= pattern_embeddings.rows()) {
        throw InputError("pattern id " + std::to_string(id) +
                         " has no embedding row; vocabulary and embeddings disagree");
      }
      const auto s = pattern_embeddings.row(id);
      for (std::size_t c = 0; c < d; ++c) row[c] += value * s[c];
    }
  }
  return gram_kernel(projected, ids, threads);
}

KernelMatrix gram_kernel(const Matrix& rows, std::span<const std::string> ids,
                         std::size_t threads) {
  if (ids.size() != rows.rows()) throw InputError("gram kernel: id count differs from rows");
  KernelMatrix k;
  k.graph_ids.assign(ids.begin(), ids.end());
  k.values.assign(ids.size() * ids.size(), 0.0);
  fill_symmetric(k, threads, [&](std::size_t i, std::size_t j) {
    const auto a = rows.row(i);
    const auto b = rows.row(j);
    double sum = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) sum += a[c] * b[c];
    return sum;
  });
  return k;
}

void write_kernel_csv(const KernelMatrix& kernel, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const auto n = kernel.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (kernel.graph_ids[i].find(',') != std::string::npos) {
      throw InputError("graph id '" + kernel.graph_ids[i] + "' contains a comma");
    }
    out << (i ? "," : "") << kernel.graph_ids[i];
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << format_double(kernel(i, j));
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

KernelMatrix read_kernel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot read kernel " + path.string());
  KernelMatrix k;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty kernel file");
  k.graph_ids = split_csv(line);
  const auto n = k.graph_ids.size();
  k.values.reserve(n * n);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != n) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(n) + " values");
    }
    for (const auto& cell : cells) {
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                         cell + "'");
      }
      k.values.push_back(value);
    }
  }
  if (k.values.size() != n * n) throw ParseError(path.string() + ": kernel is not square");
  return k;
}

void write_frequency_json(std::span<const FrequencyVector> vectors, const Vocabulary& vocab,
                          const std::filesystem::path& path) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& v : vectors) {
    auto& entry = out[v.graph_id];
    entry = nlohmann::ordered_json::object();
    for (const auto& [id, value] : v.entries) entry[vocab.token(id)] = value;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file << out.dump() << '\n';
}

}  // namespace graphrep
