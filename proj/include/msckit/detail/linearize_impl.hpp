#pragma once

// Template body of for_each_linearization; included from msc.hpp.

#include <vector>

namespace msckit {

namespace detail {

template <class F>
bool linearize_dfs(const std::vector<std::vector<EventId>>& succ, std::vector<int>& indeg,
                   std::vector<bool>& used, Linearization& cur, std::size_t n, F& fn) {
    if (cur.size() == n) return fn(static_cast<const Linearization&>(cur));
    for (std::size_t e = 0; e < n; ++e) {
        if (used[e] || indeg[e] != 0) continue;
        used[e] = true;
        cur.push_back(static_cast<EventId>(e));
        for (EventId f : succ[e]) --indeg[f];
        bool go_on = linearize_dfs(succ, indeg, used, cur, n, fn);
        for (EventId f : succ[e]) ++indeg[f];
        cur.pop_back();
        used[e] = false;
        if (!go_on) return false;
    }
    return true;
}

}  // namespace detail

template <class F>
bool for_each_linearization(const Msc& msc, F&& fn) {
    const std::size_t n = msc.size();
    std::vector<std::vector<EventId>> succ(n);
    std::vector<int> indeg(n, 0);
    for (std::size_t e = 0; e < n; ++e) {
        EventId next = msc.proc_next(static_cast<EventId>(e));
        if (next >= 0) {
            succ[e].push_back(next);
            ++indeg[next];
        }
        if (msc.is_send(static_cast<EventId>(e)) && msc.matched(static_cast<EventId>(e))) {
            EventId r = msc.partner(static_cast<EventId>(e));
            succ[e].push_back(r);
            ++indeg[r];
        }
    }
    std::vector<bool> used(n, false);
    Linearization cur;
    cur.reserve(n);
    return detail::linearize_dfs(succ, indeg, used, cur, n, fn);
}

}  // namespace msckit
