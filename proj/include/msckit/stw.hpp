#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "msckit/msc.hpp"

namespace msckit {

inline constexpr std::size_t kStwDefaultMaxEvents = 24;

// Eve wins the decomposition game keeping at most k+1 marked events.
// Throws SizeLimitExceeded above max_events.
bool stw_at_most(const Msc& msc, int k, std::size_t max_events = kStwDefaultMaxEvents);

// least k <= max_k with stw_at_most, empty when none
std::optional<int> special_treewidth(const Msc& msc, int max_k, std::size_t max_events = kStwDefaultMaxEvents);

// Eve's winning strategy as an indented tree of moves, empty when she loses
std::optional<std::string> stw_transcript(const Msc& msc, int k, std::size_t max_events = kStwDefaultMaxEvents);

}  // namespace msckit
