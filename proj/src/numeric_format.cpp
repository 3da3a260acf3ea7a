#include "graphrep/numeric_format.hpp"

#include <array>
#include <charconv>

namespace graphrep {

std::string format_double(double value) {
  std::array<char, 32> buffer{};
  const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), end);
}

}  // namespace graphrep
