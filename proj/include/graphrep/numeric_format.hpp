#pragma once

#include <string>

namespace graphrep {

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace graphrep
