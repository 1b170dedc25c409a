#pragma once

#include <string>
#include <vector>

namespace sinebeta::cli {

// "2..5" or "2,3,7" (or a mix, "1..3,10").
std::vector<int> parse_int_grid(const std::string& text);

// "0.5,1,2" or "lo..hi:count" for count evenly spaced points.
std::vector<double> parse_real_grid(const std::string& text);

}  // namespace sinebeta::cli
