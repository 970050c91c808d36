#include "msckit/stw.hpp"

#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "msckit/classify.hpp"

namespace msckit {

namespace {

using Mask = std::uint64_t;

struct Position {
    Mask events;
    Mask marked;
    bool operator==(const Position&) const = default;
};

struct PositionHash {
    std::size_t operator()(const Position& p) const {
        return std::hash<Mask>()(p.events * 0x9E3779B97F4A7C15ULL ^ p.marked);
    }
};

struct Move {
    Mask added = 0;                 // newly marked events
    std::vector<Position> children; // fragments handed to Adam
};

class Game {
public:
    Game(const Msc& msc, int k) : msc_(msc), k_(k), adj_(msc.size(), 0) {
        auto link = [&](EventId a, EventId b) {
            adj_[a] |= Mask(1) << b;
            adj_[b] |= Mask(1) << a;
        };
        for (ProcId p = 0; p < static_cast<ProcId>(msc.process_count()); ++p) {
            const auto& ln = msc.line(p);
            for (std::size_t i = 1; i < ln.size(); ++i) link(ln[i - 1], ln[i]);
        }
        for (auto [s, r] : msc.matching()) link(s, r);
    }

    bool wins(const Position& pos) {
        if (pos.events == pos.marked) return true;
        auto it = memo_.find(pos);
        if (it != memo_.end()) return it->second.has_value();
        auto move = solve(pos);
        bool ok = move.has_value();
        memo_.emplace(pos, std::move(move));
        return ok;
    }

    const std::optional<Move>& move_at(const Position& pos) { return memo_.at(pos); }

    // connected components once edges between marked events are gone
    std::vector<Position> components(Mask events, Mask marked) const {
        std::vector<Position> out;
        Mask left = events;
        while (left) {
            Mask comp = left & (~left + 1);
            Mask frontier = comp;
            while (frontier) {
                int v = std::countr_zero(frontier);
                frontier &= frontier - 1;
                Mask nb = adj_[v] & events;
                if (marked >> v & 1) nb &= ~marked;
                nb &= ~comp;
                comp |= nb;
                frontier |= nb;
            }
            out.push_back({comp, marked & comp});
            left &= ~comp;
        }
        return out;
    }

private:
    std::optional<Move> solve(const Position& pos) {
        const int budget = k_ + 1;
        if (std::popcount(pos.events) <= budget) return Move{pos.events & ~pos.marked, {}};
        auto parts = components(pos.events, pos.marked);
        if (parts.size() >= 2) {
            for (const auto& c : parts)
                if (!wins(c)) return std::nullopt;
            return Move{0, parts};
        }
        std::vector<int> free;
        for (Mask m = pos.events & ~pos.marked; m; m &= m - 1) free.push_back(std::countr_zero(m));
        const int room = budget - std::popcount(pos.marked);
        const int n = static_cast<int>(free.size());
        for (int size = 1; size <= std::min(room, n); ++size) {
            std::vector<int> idx(size);
            for (int i = 0; i < size; ++i) idx[i] = i;
            while (true) {
                Mask add = 0;
                for (int i : idx) add |= Mask(1) << free[i];
                Mask marked = pos.marked | add;
                auto split = components(pos.events, marked);
                if (split.size() >= 2) {
                    bool all = true;
                    for (const auto& c : split)
                        if (!wins(c)) {
                            all = false;
                            break;
                        }
                    if (all) return Move{add, split};
                }
                int i = size - 1;
                while (i >= 0 && idx[i] == n - size + i) --i;
                if (i < 0) break;
                ++idx[i];
                for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
        return std::nullopt;
    }

    const Msc& msc_;
    int k_;
    std::vector<Mask> adj_;
    std::unordered_map<Position, std::optional<Move>, PositionHash> memo_;
};

void check_size(const Msc& msc, std::size_t max_events) {
    const std::size_t cap = std::min<std::size_t>(max_events, 64);
    if (msc.size() > cap)
        throw SizeLimitExceeded("treewidth game limited to " + std::to_string(cap) + " events, MSC has " +
                                std::to_string(msc.size()));
}

Position start(const Msc& msc) {
    Mask all = msc.size() == 64 ? ~Mask(0) : (Mask(1) << msc.size()) - 1;
    return {all, 0};
}

std::string names(const Msc& msc, Mask m) {
    std::string out = "{";
    bool first = true;
    for (; m; m &= m - 1) {
        if (!first) out += ' ';
        out += msc.event_name(std::countr_zero(m));
        first = false;
    }
    return out + "}";
}

void render(const Msc& msc, Game& g, const Position& pos, int depth, std::string& out) {
    std::string pad(2 * depth, ' ');
    out += pad + "fragment " + names(msc, pos.events) + " marked " + names(msc, pos.marked) + "\n";
    if (pos.events == pos.marked) return;
    const auto& mv = g.move_at(pos);
    if (mv->children.empty()) {
        out += pad + "  mark " + names(msc, mv->added) + ", all events marked\n";
        return;
    }
    if (mv->added) {
        out += pad + "  mark " + names(msc, mv->added) + ", split into " + std::to_string(mv->children.size()) + "\n";
    } else {
        out += pad + "  split into " + std::to_string(mv->children.size()) + "\n";
    }
    for (const auto& c : mv->children) render(msc, g, c, depth + 2, out);
}

}  // namespace

bool stw_at_most(const Msc& msc, int k, std::size_t max_events) {
    check_size(msc, max_events);
    if (k < 0) return msc.empty();
    if (msc.empty()) return true;
    Game g(msc, k);
    return g.wins(start(msc));
}

std::optional<int> special_treewidth(const Msc& msc, int max_k, std::size_t max_events) {
    check_size(msc, max_events);
    for (int k = 0; k <= max_k; ++k)
        if (stw_at_most(msc, k, max_events)) return k;
    return std::nullopt;
}

std::optional<std::string> stw_transcript(const Msc& msc, int k, std::size_t max_events) {
    check_size(msc, max_events);
    if (k < 0) return std::nullopt;
    if (msc.empty()) return std::string("empty MSC, nothing to mark\n");
    Game g(msc, k);
    Position s = start(msc);
    if (!g.wins(s)) return std::nullopt;
    std::string out;
    render(msc, g, s, 0, out);
    return out;
}

}  // namespace msckit
