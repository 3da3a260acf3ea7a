#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace graphrep {

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// Relative path (generic form) -> SHA-256 for every regular file under
// `root`, skipping names listed in `exclude`.
std::map<std::string, std::string> hash_tree(const std::filesystem::path& root,
                                             const std::vector<std::string>& exclude = {});

}  // namespace graphrep
