#pragma once

// Test helpers: random MSC generation and brute-force oracles that only use
// linearization enumeration, never the relational characterizations.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msckit/bounded.hpp"
#include "msckit/classify.hpp"
#include "msckit/io.hpp"
#include "msckit/msc.hpp"

namespace testsupport {

using namespace msckit;

inline std::string corpus_dir() { return MSCKIT_CORPUS_DIR; }

inline Msc corpus(const std::string& name) { return load_msc(corpus_dir() + "/" + name + ".msc"); }

inline std::vector<std::pair<std::string, Msc>> all_corpus() {
    std::vector<std::pair<std::string, Msc>> out;
    std::vector<std::filesystem::path> paths;
    for (const auto& de : std::filesystem::directory_iterator(corpus_dir()))
        if (de.path().extension() == ".msc") paths.push_back(de.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) out.emplace_back(p.stem().string(), load_msc(p.string()));
    return out;
}

inline Linearization lin_of(const Msc& msc, const std::string& text) {
    Linearization out;
    std::string tok;
    std::istringstream is(text);
    while (is >> tok) {
        bool found = false;
        for (EventId e = 0; e < static_cast<EventId>(msc.size()); ++e)
            if (msc.event_name(e) == tok) {
                out.push_back(e);
                found = true;
            }
        if (!found) throw std::invalid_argument("no event " + tok);
    }
    return out;
}

// Random asynchronous run: each step sends a fresh message or delivers any
// pending one (no FIFO discipline); leftovers stay unmatched.
inline Msc random_msc(std::mt19937& rng, int max_events, int procs = 0, double drop = 0.15) {
    std::uniform_int_distribution<int> pd(2, 4);
    const int np = procs > 0 ? procs : pd(rng);
    std::vector<std::string> names;
    for (int i = 0; i < np; ++i) names.push_back(std::string(1, static_cast<char>('p' + i)));
    std::vector<Event> evs;
    std::vector<std::vector<EventId>> order(np);
    std::vector<std::pair<EventId, EventId>> matching;
    std::vector<EventId> pending;
    std::vector<bool> dropped;
    int msg = 0;
    std::uniform_real_distribution<double> u01(0, 1);
    const int target = std::uniform_int_distribution<int>(0, max_events)(rng);
    while (static_cast<int>(evs.size()) < target) {
        bool can_send = static_cast<int>(evs.size()) + 1 <= target;
        std::vector<EventId> deliverable;
        for (EventId s : pending)
            if (!dropped[s]) deliverable.push_back(s);
        bool do_send = deliverable.empty() || (can_send && u01(rng) < 0.5);
        if (do_send) {
            int p = std::uniform_int_distribution<int>(0, np - 1)(rng);
            int q = std::uniform_int_distribution<int>(0, np - 2)(rng);
            if (q >= p) ++q;
            EventId id = static_cast<EventId>(evs.size());
            std::string m = std::to_string(++msg);
            evs.push_back(Event{id, Action{ActionKind::send, p, q, m}, m});
            order[p].push_back(id);
            pending.push_back(id);
            dropped.resize(evs.size() + 1, false);
            dropped[id] = u01(rng) < drop;
        } else {
            EventId s = deliverable[std::uniform_int_distribution<std::size_t>(0, deliverable.size() - 1)(rng)];
            const Action& a = evs[s].label;
            EventId id = static_cast<EventId>(evs.size());
            evs.push_back(Event{id, Action{ActionKind::receive, a.sender, a.receiver, a.payload}, evs[s].message});
            order[a.receiver].push_back(id);
            matching.emplace_back(s, id);
            pending.erase(std::find(pending.begin(), pending.end(), s));
            dropped.resize(evs.size() + 1, false);
        }
    }
    return Msc(names, evs, order, matching);
}

// ---- enumeration oracles ----

inline bool oracle_member(const Msc& msc, ModelId m) {
    bool found = false;
    for_each_linearization(msc, [&](const Linearization& lin) {
        found = check_linearization(msc, lin, m);
        return !found;
    });
    return found;
}

inline bool oracle_exists_bounded(const Msc& msc, int k, ModelId m) {
    bool found = false;
    for_each_linearization(msc, [&](const Linearization& lin) {
        found = check_linearization(msc, lin, m) && is_k_bounded_linearization(msc, lin, k);
        return !found;
    });
    return found;
}

inline bool oracle_forall_bounded(const Msc& msc, int k, ModelId m) {
    bool all = true;
    for_each_linearization(msc, [&](const Linearization& lin) {
        if (check_linearization(msc, lin, m) && !is_k_bounded_linearization(msc, lin, k)) all = false;
        return all;
    });
    return all;
}

}  // namespace testsupport
