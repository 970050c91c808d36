#include "msckit/classify.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>

#include "msckit/relations.hpp"

namespace msckit {

std::string to_string(ModelId m) {
    switch (m) {
        case ModelId::asy: return "asy";
        case ModelId::p2p: return "p2p";
        case ModelId::co: return "co";
        case ModelId::mb: return "mb";
        case ModelId::onen: return "1n";
        case ModelId::nn: return "nn";
        case ModelId::rsc: return "rsc";
    }
    return "?";
}

std::optional<ModelId> parse_model(const std::string& s) {
    if (s == "asy") return ModelId::asy;
    if (s == "p2p" || s == "pp" || s == "1-1" || s == "11") return ModelId::p2p;
    if (s == "co") return ModelId::co;
    if (s == "mb" || s == "n1" || s == "n-1") return ModelId::mb;
    if (s == "1n" || s == "onen" || s == "1-n") return ModelId::onen;
    if (s == "nn" || s == "n-n") return ModelId::nn;
    if (s == "rsc") return ModelId::rsc;
    return std::nullopt;
}

namespace {

Verdict holds() {
    Verdict v;
    v.holds = true;
    return v;
}

Verdict fails(std::vector<EventId> w, std::string reason) {
    Verdict v;
    v.holds = false;
    v.witness = std::move(w);
    v.reason = std::move(reason);
    return v;
}

Verdict acyclic_verdict(const RelationGraph& g, const char* what) {
    auto ac = is_acyclic(g);
    if (ac.acyclic) return holds();
    return fails(ac.cycle, std::string("cycle in ") + what);
}

}  // namespace

Verdict is_p2p(const Msc& msc) {
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        const auto& ln = msc.line(static_cast<ProcId>(p));
        for (std::size_t i = 0; i < ln.size(); ++i) {
            EventId s = ln[i];
            if (!msc.is_send(s)) continue;
            for (std::size_t j = i + 1; j < ln.size(); ++j) {
                EventId t = ln[j];
                if (!msc.is_send(t) || msc.label(t).receiver != msc.label(s).receiver) continue;
                if (!msc.matched(t)) continue;
                if (!msc.matched(s))
                    return fails({s, t}, msc.event_name(s) + " is unmatched but the later " + msc.event_name(t) +
                                             " on the same channel is received");
                if (!msc.proc_before(msc.partner(s), msc.partner(t)))
                    return fails({s, t}, msc.event_name(s) + " and " + msc.event_name(t) +
                                             " are received in the opposite order");
            }
        }
    }
    return holds();
}

Verdict is_co(const Msc& msc) {
    const RelationGraph hb = happens_before_strict(msc);
    const int n = static_cast<int>(msc.size());
    for (EventId s = 0; s < n; ++s) {
        if (!msc.is_send(s)) continue;
        for (EventId t = 0; t < n; ++t) {
            if (t == s || !msc.is_send(t) || !hb.has(s, t)) continue;
            if (msc.label(t).receiver != msc.label(s).receiver) continue;
            if (!msc.matched(t)) continue;
            if (!msc.matched(s))
                return fails({s, t}, msc.event_name(s) + " is unmatched but the causally later " +
                                         msc.event_name(t) + " to the same process is received");
            if (!msc.proc_before(msc.partner(s), msc.partner(t)))
                return fails({s, t}, msc.event_name(s) + " causally precedes " + msc.event_name(t) +
                                         " but their receives are reversed");
        }
    }
    return holds();
}

Verdict is_mb(const Msc& msc) { return acyclic_verdict(with_causal_edges(msc, mb_rel(msc).base), "-> u <| u mb"); }

Verdict is_onen(const Msc& msc) {
    return acyclic_verdict(with_causal_edges(msc, onen_rel(msc).base), "-> u <| u 1n");
}

Verdict is_nn(const Msc& msc) { return acyclic_verdict(nn_bowtie(msc).base, "bowtie"); }

std::optional<Crown> find_crown(const Msc& msc) {
    // node i = i-th matched pair; edge i -> j when s_i < r_j, i != j
    std::vector<std::pair<EventId, EventId>> pairs;
    for (EventId s : msc.sends())
        if (msc.matched(s)) pairs.emplace_back(s, msc.partner(s));
    const RelationGraph hb = happens_before_strict(msc);
    RelationGraph g(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j)
            if (i != j && hb.has(pairs[i].first, pairs[j].second)) g.add(static_cast<int>(i), static_cast<int>(j));
    auto ac = is_acyclic(g);
    if (ac.acyclic) return std::nullopt;
    Crown c;
    for (int i : ac.cycle) c.pairs.push_back(pairs[i]);
    return c;
}

Verdict is_rsc(const Msc& msc) {
    auto um = msc.unmatched_sends();
    if (!um.empty()) return fails({um.front()}, msc.event_name(um.front()) + " is unmatched");
    if (auto c = find_crown(msc)) {
        std::vector<EventId> w;
        for (auto [s, r] : c->pairs) {
            w.push_back(s);
            w.push_back(r);
        }
        return fails(w, "crown of size " + std::to_string(c->pairs.size()));
    }
    return holds();
}

Verdict is_member(const Msc& msc, ModelId m) {
    switch (m) {
        case ModelId::asy: return holds();
        case ModelId::p2p: return is_p2p(msc);
        case ModelId::co: return is_co(msc);
        case ModelId::mb: return is_mb(msc);
        case ModelId::onen: return is_onen(msc);
        case ModelId::nn: return is_nn(msc);
        case ModelId::rsc: return is_rsc(msc);
    }
    return holds();
}

namespace {

// Closes the graph under the ordering rules with the graph itself in place of
// the nn relation, so orders forced only through chains of bowtie edges are visible.
RelationGraph saturate_nn(const Msc& msc, RelationGraph g) {
    const int n = static_cast<int>(msc.size());
    for (bool changed = true; changed;) {
        changed = false;
        g = transitive_closure(g);
        for (EventId a = 0; a < n; ++a) {
            if (!msc.matched(a)) continue;
            for (EventId b = 0; b < n; ++b) {
                if (a == b || !msc.matched(b) || msc.is_send(a) != msc.is_send(b)) continue;
                if (g.has(a, b) && !g.has(msc.partner(a), msc.partner(b))) {
                    g.add(msc.partner(a), msc.partner(b));
                    changed = true;
                }
            }
        }
    }
    return g;
}

NnLinearization run_nn_algorithm(const Msc& msc, const RelationGraph& edg) {
    const int n = static_cast<int>(msc.size());
    std::vector<int> indeg(n, 0);
    for (auto [a, b] : edg.edges()) ++indeg[b];
    std::vector<bool> done(n, false);
    int matched_left = 0;
    for (EventId s : msc.sends())
        if (msc.matched(s)) ++matched_left;
    std::deque<EventId> fifo;
    NnLinearization out;
    auto emit = [&](EventId e) {
        done[e] = true;
        out.order.push_back(e);
        const auto& row = edg.successors(e);
        for (auto v = row.find_first(); v != RelationGraph::Row::npos; v = row.find_next(v)) --indeg[v];
    };
    while (static_cast<int>(out.order.size()) < n) {
        // step 1
        EventId pick = -1;
        for (EventId e = 0; e < n && pick < 0; ++e)
            if (!done[e] && msc.is_send(e) && msc.matched(e) && indeg[e] == 0) pick = e;
        if (pick >= 0) {
            emit(pick);
            fifo.push_back(pick);
            --matched_left;
            continue;
        }
        // step 2
        if (matched_left == 0) {
            for (EventId e = 0; e < n && pick < 0; ++e)
                if (!done[e] && msc.is_send(e) && !msc.matched(e) && indeg[e] == 0) pick = e;
            if (pick >= 0) {
                emit(pick);
                continue;
            }
        }
        // step 3
        if (!fifo.empty()) {
            EventId r = msc.partner(fifo.front());
            if (!done[r] && indeg[r] == 0) {
                emit(r);
                fifo.pop_front();
                continue;
            }
        }
        // step 4
        out.ok = false;
        out.error = fifo.empty() ? "no event can be scheduled"
                                 : "receive " + msc.event_name(msc.partner(fifo.front())) + " is blocked";
        return out;
    }
    out.ok = true;
    return out;
}

}  // namespace

NnLinearization nn_linearize(const Msc& msc) {
    const RelationGraph edg = nn_bowtie(msc).base;
    auto out = run_nn_algorithm(msc, edg);
    if (out.ok || !is_acyclic(edg).acyclic) return out;
    // The ascending-id choice can commit to a send order that a chain through an
    // unmatched send later contradicts; retry on the saturated graph.
    auto sat = saturate_nn(msc, edg);
    if (!is_acyclic(sat).acyclic) return out;
    auto retry = run_nn_algorithm(msc, sat);
    return retry.ok ? retry : out;
}

namespace {

Linearization topo_or_throw(const RelationGraph& g, ModelId m) {
    auto t = topological_order(g);
    if (!t) throw NotAMember("not a " + to_string(m) + " MSC");
    return *t;
}

Linearization rsc_linearize(const Msc& msc) {
    const int n = static_cast<int>(msc.size());
    const RelationGraph hb = happens_before_strict(msc);
    std::vector<bool> done(n, false);
    Linearization out;
    auto ready = [&](EventId e, EventId except) {
        for (EventId f = 0; f < n; ++f)
            if (f != except && !done[f] && hb.has(f, e)) return false;
        return true;
    };
    while (static_cast<int>(out.size()) < n) {
        EventId pick = -1;
        for (EventId s = 0; s < n && pick < 0; ++s) {
            if (done[s] || !msc.is_send(s) || !msc.matched(s)) continue;
            if (ready(s, -1) && ready(msc.partner(s), s)) pick = s;
        }
        if (pick < 0) throw NotAMember("not a rsc MSC");
        done[pick] = true;
        done[msc.partner(pick)] = true;
        out.push_back(pick);
        out.push_back(msc.partner(pick));
    }
    return out;
}

}  // namespace

Linearization linearize(const Msc& msc, ModelId m) {
    Linearization lin;
    switch (m) {
        case ModelId::asy:
        case ModelId::p2p:
        case ModelId::co:
            if (!is_member(msc, m).holds) throw NotAMember("not a " + to_string(m) + " MSC");
            lin = topo_or_throw(with_causal_edges(msc, RelationGraph(msc.size())), m);
            break;
        case ModelId::mb: lin = topo_or_throw(with_causal_edges(msc, mb_rel(msc).base), m); break;
        case ModelId::onen: lin = topo_or_throw(with_causal_edges(msc, onen_rel(msc).base), m); break;
        case ModelId::nn: {
            auto r = nn_linearize(msc);
            if (!r.ok) throw NotAMember("not a nn MSC: " + r.error);
            lin = r.order;
            break;
        }
        case ModelId::rsc:
            if (!msc.unmatched_sends().empty()) throw NotAMember("not a rsc MSC");
            lin = rsc_linearize(msc);
            break;
    }
    if (!check_linearization(msc, lin, m))
        throw std::logic_error("internal: produced " + to_string(m) + " linearization fails its check");
    return lin;
}

bool check_linearization(const Msc& msc, const Linearization& lin, ModelId m) {
    if (!is_linearization(msc, lin)) return false;
    const int n = static_cast<int>(msc.size());
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[lin[i]] = i;

    if (m == ModelId::asy) return true;
    if (m == ModelId::rsc) {
        for (int i = 0; i < n; ++i) {
            EventId e = lin[i];
            if (!msc.is_send(e)) continue;
            if (!msc.matched(e)) return false;
            if (i + 1 >= n || lin[i + 1] != msc.partner(e)) return false;
        }
        return true;
    }
    RelationGraph hb;
    if (m == ModelId::co) hb = happens_before_strict(msc);
    // for sends s before s' in lin that the model relates: s' unmatched, or both matched with r before r'
    for (EventId s = 0; s < n; ++s) {
        if (!msc.is_send(s)) continue;
        for (EventId t = 0; t < n; ++t) {
            if (t == s || !msc.is_send(t) || pos[s] > pos[t]) continue;
            const Action& a = msc.label(s);
            const Action& b = msc.label(t);
            bool related = false;
            switch (m) {
                case ModelId::p2p:
                    related = a.sender == b.sender && a.receiver == b.receiver && msc.proc_before(s, t);
                    break;
                case ModelId::co: related = a.receiver == b.receiver && hb.has(s, t); break;
                case ModelId::mb: related = a.receiver == b.receiver; break;
                case ModelId::onen: related = a.sender == b.sender && msc.proc_before(s, t); break;
                case ModelId::nn: related = true; break;
                default: break;
            }
            if (!related || !msc.matched(t)) continue;
            if (!msc.matched(s)) return false;
            if (pos[msc.partner(s)] > pos[msc.partner(t)]) return false;
        }
    }
    return true;
}

std::size_t default_oracle_limit() {
    if (const char* v = std::getenv("MSCKIT_ORACLE_LIMIT")) {
        char* end = nullptr;
        long x = std::strtol(v, &end, 10);
        if (end != v && x > 0) return static_cast<std::size_t>(x);
    }
    return 12;
}

bool oracle_membership(const Msc& msc, ModelId m, std::size_t max_events) {
    if (msc.size() > max_events)
        throw SizeLimitExceeded("oracle limited to " + std::to_string(max_events) + " events, MSC has " +
                                std::to_string(msc.size()));
    if (m == ModelId::asy) return true;
    bool found = false;
    for_each_linearization(msc, [&](const Linearization& lin) {
        if (check_linearization(msc, lin, m)) {
            found = true;
            return false;
        }
        // p2p and co are universal clauses: one failing linearization decides
        if (m == ModelId::p2p || m == ModelId::co) return false;
        return true;
    });
    return found;
}

ClassReport classify(const Msc& msc) {
    ClassReport rep;
    for (ModelId m : kAllModels) {
        Verdict v = is_member(msc, m);
        if (v.holds) v.linearization = linearize(msc, m);
        rep.verdicts[static_cast<int>(m)] = std::move(v);
    }
    for (std::size_t i = 1; i < kAllModels.size(); ++i)
        if (rep.member(kAllModels[i]) && !rep.member(kAllModels[i - 1]))
            throw HierarchyViolation("internal: " + to_string(kAllModels[i]) + " member but not " +
                                     to_string(kAllModels[i - 1]));
    return rep;
}

}  // namespace msckit
