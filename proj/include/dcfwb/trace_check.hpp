#pragma once

#include "dcfwb/io.hpp"

#include <map>
#include <string>
#include <vector>

namespace dcfwb {

// Problems found in a priority trace: malformed lines, a replay that differs
// from the recorded lines, non-injective h, a U that is not the union of the
// additions, or a report whose claims fail. Empty means the trace verifies.
// Replays are memoized in `cache` by header text when one is given.
using ReplayCache = std::map<std::string, std::vector<Json>>;
std::vector<std::string> check_priority_trace(const std::vector<Json>& lines, bool replay = true,
                                              ReplayCache* cache = nullptr);

} // namespace dcfwb
