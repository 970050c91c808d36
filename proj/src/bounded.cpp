#include "msckit/bounded.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "msckit/relations.hpp"

namespace msckit {

namespace {

using Mask = std::uint64_t;

void require_small(const Msc& msc, const char* what) {
    if (msc.size() > 64) throw std::invalid_argument(std::string(what) + " supports at most 64 events");
}

int channel_key(const Msc& msc, EventId e) {
    const Action& a = msc.label(e);
    return a.sender * static_cast<int>(msc.process_count()) + a.receiver;
}

std::size_t channel_count(const Msc& msc) { return msc.process_count() * msc.process_count(); }

// in-transit count right after e when e is a send (global or per channel)
int occupancy_at(const Msc& msc, Mask before, EventId e, bool global) {
    int c = 0;
    const int key = channel_key(msc, e);
    for (EventId f = 0; f < static_cast<EventId>(msc.size()); ++f) {
        if (!(before >> f & 1) || (!global && channel_key(msc, f) != key)) continue;
        c += msc.is_send(f) ? 1 : -1;
    }
    return c + 1;
}

Mask pred_mask_of(const Msc& msc, const RelationGraph& partial, EventId e) {
    Mask m = 0;
    for (EventId f = 0; f < static_cast<EventId>(msc.size()); ++f)
        if (partial.has(f, e)) m |= Mask(1) << f;
    return m;
}

bool verdict_for_model(const Msc& msc, ModelId model, BoundedVerdict& out) {
    if (model == ModelId::rsc) throw std::invalid_argument("boundedness is not defined here for rsc");
    if (model == ModelId::asy) return true;
    Verdict v = is_member(msc, model);
    if (!v.holds) {
        out.status = BoundedVerdict::Status::not_in_model;
        out.witness = v.witness;
        out.reason = "not a " + to_string(model) + " MSC: " + v.reason;
        return false;
    }
    return true;
}

// strict order whose linear extensions are the model linearizations (nn: the bowtie relation)
RelationGraph model_order(const Msc& msc, ModelId model) {
    switch (model) {
        case ModelId::mb: return mb_partial(msc);
        case ModelId::onen: return onen_partial(msc);
        case ModelId::nn: return nn_bowtie(msc).base;
        default: return happens_before_strict(msc);
    }
}

RelationGraph bound_relation(const Msc& msc, int k, ModelId model) {
    return model == ModelId::asy ? relb_asy(msc, k).base : relb(msc, k).base;
}

// channel whose unmatched sends exceed k, with those sends
std::optional<std::vector<EventId>> too_many_unmatched(const Msc& msc, int k) {
    std::map<int, std::vector<EventId>> by;
    for (EventId u : msc.unmatched_sends()) by[channel_key(msc, u)].push_back(u);
    for (auto& [key, us] : by)
        if (static_cast<int>(us.size()) > k) return us;
    return std::nullopt;
}

// DFS over linear extensions of a strict partial order with occupancy tracking
std::optional<Linearization> search_partial(const Msc& msc, const RelationGraph& partial, int k, bool want_bounded) {
    require_small(msc, "linearization search");
    const int n = static_cast<int>(msc.size());
    std::vector<Mask> preds(n);
    for (EventId e = 0; e < n; ++e) preds[e] = pred_mask_of(msc, partial, e);
    const Mask full = n == 64 ? ~Mask(0) : (Mask(1) << n) - 1;
    std::set<std::pair<Mask, bool>> dead;
    Linearization path;
    std::function<bool(Mask, bool)> go = [&](Mask m, bool violated) -> bool {
        if (m == full) return want_bounded || violated;
        if (dead.count({m, violated})) return false;
        for (EventId e = 0; e < n; ++e) {
            if ((m >> e & 1) || (preds[e] & ~m)) continue;
            bool v = violated;
            if (msc.is_send(e) && occupancy_at(msc, m, e, false) > k) {
                if (want_bounded) continue;
                v = true;
            }
            path.push_back(e);
            if (go(m | Mask(1) << e, v)) return true;
            path.pop_back();
        }
        dead.insert({m, violated});
        return false;
    };
    if (go(0, false)) return path;
    return std::nullopt;
}

std::optional<Linearization> search_for(const Msc& msc, ModelId model, int k, bool want_bounded) {
    if (model == ModelId::nn) return search_nn_linearization(msc, k, want_bounded);
    return search_partial(msc, model_order(msc, model), k, want_bounded);
}

}  // namespace

int max_occupancy(const Msc& msc, const Linearization& lin, bool global) {
    std::vector<int> per(channel_count(msc), 0);
    int total = 0, best = 0;
    for (EventId e : lin) {
        int key = channel_key(msc, e);
        if (msc.is_send(e)) {
            ++per[key];
            ++total;
            best = std::max(best, global ? total : per[key]);
        } else {
            --per[key];
            --total;
        }
    }
    return best;
}

bool is_k_bounded_linearization(const Msc& msc, const Linearization& lin, int k, bool global) {
    return max_occupancy(msc, lin, global) <= k;
}

std::optional<Linearization> search_nn_linearization(const Msc& msc, int k, bool want_bounded) {
    require_small(msc, "nn linearization search");
    const int n = static_cast<int>(msc.size());
    const Mask full = n == 64 ? ~Mask(0) : (Mask(1) << n) - 1;
    Mask unmatched = 0;
    for (EventId u : msc.unmatched_sends()) unmatched |= Mask(1) << u;
    std::vector<EventId> prev(n, -1);
    for (ProcId p = 0; p < static_cast<ProcId>(msc.process_count()); ++p) {
        const auto& ln = msc.line(p);
        for (std::size_t i = 1; i < ln.size(); ++i) prev[ln[i]] = ln[i - 1];
    }
    std::set<std::tuple<Mask, std::vector<EventId>, bool>> dead;
    std::vector<EventId> queue;
    Linearization path;
    std::function<bool(Mask, bool)> go = [&](Mask m, bool violated) -> bool {
        if (m == full) return want_bounded || violated;
        auto key = std::make_tuple(m, queue, violated);
        if (dead.count(key)) return false;
        for (EventId e = 0; e < n; ++e) {
            if ((m >> e & 1) || (prev[e] >= 0 && !(m >> prev[e] & 1))) continue;
            bool v = violated;
            if (msc.is_send(e)) {
                // a message stuck in the single queue blocks every later one
                if (msc.matched(e) && (m & unmatched)) continue;
                if (occupancy_at(msc, m, e, false) > k) {
                    if (want_bounded) continue;
                    v = true;
                }
                path.push_back(e);
                if (msc.matched(e)) queue.push_back(e);
                bool ok = go(m | Mask(1) << e, v);
                if (ok) return true;
                if (msc.matched(e)) queue.pop_back();
                path.pop_back();
            } else {
                if (queue.empty() || queue.front() != msc.partner(e)) continue;
                queue.erase(queue.begin());
                path.push_back(e);
                if (go(m | Mask(1) << e, v)) return true;
                path.pop_back();
                queue.insert(queue.begin(), msc.partner(e));
            }
        }
        dead.insert(key);
        return false;
    };
    if (go(0, false)) return path;
    return std::nullopt;
}

BoundedVerdict exists_k_bounded(const Msc& msc, int k, ModelId model) {
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    BoundedVerdict out;
    if (!verdict_for_model(msc, model, out)) return out;
    if (auto us = too_many_unmatched(msc, k)) {
        out.witness = *us;
        out.reason = std::to_string(us->size()) + " unmatched sends on one channel exceed k=" + std::to_string(k);
        return out;
    }
    if (model == ModelId::nn) {
        // the bowtie relation is not an order whose extensions are the nn-linearizations
        out.linearization = search_nn_linearization(msc, k, true);
        if (out.linearization) {
            out.status = BoundedVerdict::Status::holds;
        } else {
            out.reason = "no nn-linearization keeps every channel within k=" + std::to_string(k);
        }
        return out;
    }
    RelationGraph g = model_order(msc, model);
    g.unite(bound_relation(msc, k, model));
    auto ac = is_acyclic(g);
    if (!ac.acyclic) {
        out.witness = ac.cycle;
        out.reason = "order united with the bound relation has a cycle";
        return out;
    }
    out.status = BoundedVerdict::Status::holds;
    auto topo = topological_order(g);
    if (topo && check_linearization(msc, *topo, model) && is_k_bounded_linearization(msc, *topo, k)) {
        out.linearization = *topo;
    } else if (msc.size() <= 64) {
        out.linearization = search_for(msc, model, k, true);
    }
    return out;
}

BoundedVerdict forall_k_bounded(const Msc& msc, int k, ModelId model) {
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    BoundedVerdict out;
    if (!verdict_for_model(msc, model, out)) return out;
    RelationGraph order = model_order(msc, model);
    if (auto us = too_many_unmatched(msc, k)) {
        out.witness = *us;
        out.reason = std::to_string(us->size()) + " unmatched sends on one channel exceed k=" + std::to_string(k);
        if (model == ModelId::nn) {
            out.linearization = search_nn_linearization(msc, k, false);
        } else if (auto t = topological_order(order)) {
            out.linearization = *t;
        }
        return out;
    }
    if (model == ModelId::nn) {
        out.linearization = search_nn_linearization(msc, k, false);
        if (out.linearization) {
            out.reason = "an nn-linearization exceeds k=" + std::to_string(k) + " on some channel";
        } else {
            out.status = BoundedVerdict::Status::holds;
        }
        return out;
    }
    RelationGraph b = bound_relation(msc, k, model);
    auto missing = b.difference(order);
    if (missing.empty()) {
        out.status = BoundedVerdict::Status::holds;
        return out;
    }
    auto [r, s] = missing.front();
    out.witness = {r, s};
    out.reason = msc.event_name(r) + " must precede " + msc.event_name(s) + " for k=" + std::to_string(k) +
                 " but the model order does not force it";
    RelationGraph g = order;
    g.add(s, r);
    auto topo = topological_order(g);
    if (topo && check_linearization(msc, *topo, model) && !is_k_bounded_linearization(msc, *topo, k)) {
        out.linearization = *topo;
    } else if (msc.size() <= 64) {
        out.linearization = search_for(msc, model, k, false);
    }
    return out;
}

std::optional<int> minimal_exists_bound(const Msc& msc, ModelId model, int cap) {
    for (int k = 0; k <= cap; ++k) {
        auto v = exists_k_bounded(msc, k, model);
        if (v.status == BoundedVerdict::Status::not_in_model) return std::nullopt;
        if (v.holds()) return k;
    }
    return std::nullopt;
}

// ---- exchanges ----

namespace {

// A unit is a message: its send plus its receive when matched.
struct UnitGraph {
    std::vector<int> unit_of;              // event -> unit
    std::vector<EventId> send_of;          // unit -> send event
    // (from, to, strict): factor(from) <= factor(to), strictly when strict
    std::vector<std::tuple<int, int, bool>> edges;
    // for strict edges: the receive/send pair that created them
    std::map<std::pair<int, int>, std::pair<EventId, EventId>> origin;
};

UnitGraph unit_graph(const Msc& msc) {
    UnitGraph g;
    g.unit_of.assign(msc.size(), -1);
    for (EventId s : msc.sends()) {
        g.unit_of[s] = static_cast<int>(g.send_of.size());
        g.send_of.push_back(s);
    }
    for (EventId r : msc.receives()) {
        if (!msc.matched(r)) throw std::invalid_argument("receive " + msc.event_name(r) + " has no send");
        g.unit_of[r] = g.unit_of[msc.partner(r)];
    }
    for (ProcId p = 0; p < static_cast<ProcId>(msc.process_count()); ++p) {
        const auto& ln = msc.line(p);
        for (std::size_t i = 1; i < ln.size(); ++i) {
            EventId a = ln[i - 1], b = ln[i];
            bool strict = msc.is_receive(a) && msc.is_send(b);
            g.edges.emplace_back(g.unit_of[a], g.unit_of[b], strict);
            if (strict) g.origin[{g.unit_of[a], g.unit_of[b]}] = {a, b};
        }
    }
    // concatenation is undefined when a matched send follows an unmatched one on
    // its channel in a later factor, so both share a factor
    for (EventId u : msc.unmatched_sends())
        for (EventId s : msc.sends())
            if (msc.matched(s) && channel_key(msc, s) == channel_key(msc, u) && msc.proc_before(u, s))
                g.edges.emplace_back(g.unit_of[s], g.unit_of[u], false);
    return g;
}

}  // namespace

bool is_exchange(const Msc& msc) {
    RelationGraph hb = happens_before_strict(msc);
    for (EventId r : msc.receives())
        for (EventId s : msc.sends())
            if (hb.has(r, s)) return false;
    return true;
}

ExchangeDecomposition decompose_exchanges(const Msc& msc, std::optional<int> k) {
    ExchangeDecomposition out;
    if (k && *k < 0) throw std::invalid_argument("k must be non-negative");
    if (msc.empty()) {
        out.ok = true;
        return out;
    }
    UnitGraph g = unit_graph(msc);
    const int u = static_cast<int>(g.send_of.size());
    RelationGraph reach(u);
    for (auto [a, b, strict] : g.edges) reach.add(a, b);
    reach = transitive_closure(reach, true);
    for (auto [a, b, strict] : g.edges) {
        if (strict && reach.has(b, a)) {
            auto [r, s] = g.origin.at({a, b});
            out.witness = std::make_pair(r, s);
            out.reason = msc.event_name(s) + " follows the receive " + msc.event_name(r) +
                         " but its message must share or precede that factor";
            return out;
        }
    }
    // earliest factor for each unit: longest path with strict edges weighing 1
    std::vector<int> f(u, 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (auto [a, b, strict] : g.edges) {
            int need = f[a] + (strict ? 1 : 0);
            if (f[b] < need) {
                f[b] = need;
                changed = true;
            }
        }
    }
    std::vector<int> assign = f;
    if (k) {
        if (u > 64) throw std::invalid_argument("k-exchange search supports at most 64 messages");
        std::vector<Mask> weak(u, 0), strong(u, 0);
        for (auto [a, b, strict] : g.edges) {
            if (a == b) continue;
            (strict ? strong : weak)[b] |= Mask(1) << a;
        }
        const Mask full = u == 64 ? ~Mask(0) : (Mask(1) << u) - 1;
        std::unordered_set<Mask> dead;
        std::vector<Mask> chosen;
        std::function<bool(Mask)> go = [&](Mask placed) -> bool {
            if (placed == full) return true;
            if (dead.count(placed)) return false;
            std::vector<int> cand;
            for (int x = 0; x < u; ++x)
                if (!(placed >> x & 1) && !(strong[x] & ~placed)) cand.push_back(x);
            // subsets of cand with at most k elements, closed under weak predecessors
            const int c = static_cast<int>(cand.size());
            for (int size = std::min(*k, c); size >= 1; --size) {
                std::vector<int> idx(size);
                for (int i = 0; i < size; ++i) idx[i] = i;
                while (true) {
                    Mask F = 0;
                    for (int i : idx) F |= Mask(1) << cand[i];
                    bool closed = true;
                    for (int i : idx)
                        if (weak[cand[i]] & ~placed & ~F) closed = false;
                    if (closed) {
                        chosen.push_back(F);
                        if (go(placed | F)) return true;
                        chosen.pop_back();
                    }
                    int i = size - 1;
                    while (i >= 0 && idx[i] == c - size + i) --i;
                    if (i < 0) break;
                    ++idx[i];
                    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
                }
            }
            dead.insert(placed);
            return false;
        };
        if (!go(0)) {
            out.reason = "no factorization into exchanges of at most " + std::to_string(*k) + " sends";
            return out;
        }
        for (std::size_t i = 0; i < chosen.size(); ++i)
            for (int x = 0; x < u; ++x)
                if (chosen[i] >> x & 1) assign[x] = static_cast<int>(i);
    }
    int nf = 0;
    for (int x : assign) nf = std::max(nf, x + 1);
    out.factors.assign(nf, {});
    for (EventId e = 0; e < static_cast<EventId>(msc.size()); ++e) out.factors[assign[g.unit_of[e]]].push_back(e);
    out.ok = true;
    return out;
}

std::vector<Msc> factor_mscs(const Msc& msc, const ExchangeDecomposition& d) {
    std::vector<Msc> out;
    for (const auto& fac : d.factors) {
        std::vector<bool> keep(msc.size(), false);
        for (EventId e : fac) keep[e] = true;
        out.push_back(msc.restrict_to(keep));
    }
    return out;
}

bool is_weakly_synchronous(const Msc& msc) { return decompose_exchanges(msc).ok; }

bool is_weakly_k_synchronous(const Msc& msc, int k) { return decompose_exchanges(msc, k).ok; }

}  // namespace msckit
