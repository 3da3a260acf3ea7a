#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace graphrep {

using PatternId = std::uint32_t;

// An ordered list of pattern tokens induced from one graph.
struct PatternDocument {
  std::string graph_id;
  std::vector<std::string> tokens;

  friend bool operator==(const PatternDocument&, const PatternDocument&) = default;
};

// Pattern token <-> dense id, with total occurrence counts. Ids are assigned
// in first-encounter order.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary build(std::span<const PatternDocument> documents);

  // Registers one occurrence of `token`, returning its id.
  PatternId add(const std::string& token, std::uint64_t occurrences = 1);

  std::optional<PatternId> find(const std::string& token) const;
  PatternId id(const std::string& token) const;  // throws ConsistencyError
  const std::string& token(PatternId id) const { return tokens_[id]; }
  std::uint64_t count(PatternId id) const { return counts_[id]; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::uint64_t total() const;

  // JSON object {token: {"id": int, "count": int}}.
  void save_json(const std::filesystem::path& path) const;
  static Vocabulary load_json(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, PatternId> index_;
};

// Document of pattern ids; throws ConsistencyError on an unknown token.
std::vector<PatternId> encode(const PatternDocument& doc, const Vocabulary& vocab);

}  // namespace graphrep
