#include "graphrep/vocabulary.hpp"

#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "graphrep/error.hpp"

namespace graphrep {

Vocabulary Vocabulary::build(std::span<const PatternDocument> documents) {
  Vocabulary vocab;
  for (const auto& doc : documents) {
    for (const auto& token : doc.tokens) vocab.add(token);
  }
  return vocab;
}

PatternId Vocabulary::add(const std::string& token, std::uint64_t occurrences) {
  auto [it, inserted] = index_.try_emplace(token, static_cast<PatternId>(tokens_.size()));
  if (inserted) {
    tokens_.push_back(token);
    counts_.push_back(0);
  }
  counts_[it->second] += occurrences;
  return it->second;
}

std::optional<PatternId> Vocabulary::find(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PatternId Vocabulary::id(const std::string& token) const {
  const auto found = find(token);
  if (!found) throw ConsistencyError("token '" + token + "' is not in the vocabulary");
  return *found;
}

std::uint64_t Vocabulary::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

void Vocabulary::save_json(const std::filesystem::path& path) const {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (PatternId id = 0; id < tokens_.size(); ++id) {
    out[tokens_[id]] = {{"id", id}, {"count", counts_[id]}};
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file << out.dump(1) << '\n';
}

Vocabulary Vocabulary::load_json(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw IngestionError("cannot read vocabulary " + path.string());
  nlohmann::json in;
  try {
    in = nlohmann::json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  const auto n = in.size();
  std::vector<std::string> tokens(n);
  std::vector<std::uint64_t> counts(n, 0);
  std::vector<bool> seen(n, false);
  for (const auto& [token, entry] : in.items()) {
    const auto id = entry.at("id").get<std::size_t>();
    if (id >= n || seen[id]) throw ParseError(path.string() + ": ids are not dense");
    seen[id] = true;
    tokens[id] = token;
    counts[id] = entry.at("count").get<std::uint64_t>();
  }
  Vocabulary vocab;
  for (std::size_t id = 0; id < n; ++id) vocab.add(tokens[id], counts[id]);
  return vocab;
}

std::vector<PatternId> encode(const PatternDocument& doc, const Vocabulary& vocab) {
  std::vector<PatternId> ids;
  ids.reserve(doc.tokens.size());
  for (const auto& token : doc.tokens) {
    const auto id = vocab.find(token);
    if (!id) {
      throw ConsistencyError("document '" + doc.graph_id + "' uses token '" + token +
                             "' missing from the vocabulary");
    }
    ids.push_back(*id);
  }
  return ids;
}

}  // namespace graphrep
