#include "msckit/relations.hpp"

#include <map>

#include "msckit/classify.hpp"

namespace msckit {

std::string to_string(RelKind k) {
    switch (k) {
        case RelKind::mbrel: return "mbrel";
        case RelKind::onenrel: return "onenrel";
        case RelKind::nnrel: return "nnrel";
        case RelKind::nnbowtie: return "nnbowtie";
        case RelKind::relb: return "relb";
        case RelKind::relb_asy: return "relb_asy";
    }
    return "?";
}

RelationGraph with_causal_edges(const Msc& msc, const RelationGraph& extra) {
    RelationGraph g = process_relation(msc);
    g.unite(message_relation(msc));
    g.unite(extra);
    return g;
}

ModelRelation mb_rel(const Msc& msc) {
    const int n = static_cast<int>(msc.size());
    ModelRelation out{RelationGraph(n), RelKind::mbrel};
    for (EventId s = 0; s < n; ++s) {
        if (!msc.is_send(s)) continue;
        for (EventId t = 0; t < n; ++t) {
            if (t == s || !msc.is_send(t)) continue;
            if (msc.label(s).receiver != msc.label(t).receiver) continue;
            bool ms = msc.matched(s), mt = msc.matched(t);
            if (ms && !mt) out.base.add(s, t);
            if (ms && mt && msc.proc_before(msc.partner(s), msc.partner(t))) out.base.add(s, t);
        }
    }
    return out;
}

RelationGraph mb_partial(const Msc& msc) { return transitive_closure(with_causal_edges(msc, mb_rel(msc).base)); }

ModelRelation onen_rel(const Msc& msc) {
    const int n = static_cast<int>(msc.size());
    ModelRelation out{RelationGraph(n), RelKind::onenrel};
    for (EventId a = 0; a < n; ++a) {
        for (EventId b = 0; b < n; ++b) {
            if (a == b) continue;
            const Action& x = msc.label(a);
            const Action& y = msc.label(b);
            if (x.is_send() && y.is_send() && x.sender == y.sender && msc.matched(a) && !msc.matched(b))
                out.base.add(a, b);
            if (x.is_receive() && y.is_receive() && x.sender == y.sender && msc.matched(a) && msc.matched(b) &&
                msc.proc_before(msc.partner(a), msc.partner(b)))
                out.base.add(a, b);
        }
    }
    return out;
}

RelationGraph onen_partial(const Msc& msc) { return transitive_closure(with_causal_edges(msc, onen_rel(msc).base)); }

RelationGraph onen_partial_reflexive(const Msc& msc) {
    return transitive_closure(with_causal_edges(msc, onen_rel(msc).base), true);
}

ModelRelation nn_rel(const Msc& msc) {
    RelationGraph extra = mb_rel(msc).base;
    extra.unite(onen_rel(msc).base);
    return {transitive_closure(with_causal_edges(msc, extra)), RelKind::nnrel};
}

ModelRelation nn_bowtie(const Msc& msc) {
    const int n = static_cast<int>(msc.size());
    const RelationGraph leads = nn_rel(msc).base;
    ModelRelation out{leads, RelKind::nnbowtie};
    for (EventId a = 0; a < n; ++a) {
        for (EventId b = 0; b < n; ++b) {
            if (leads.has(a, b)) continue;
            bool sa = msc.is_send(a), sb = msc.is_send(b);
            bool ma = msc.matched(a), mb = msc.matched(b);
            if (!sa && !sb && ma && mb && leads.has(msc.partner(a), msc.partner(b))) out.base.add(a, b);
            if (sa && sb && ma && mb && leads.has(msc.partner(a), msc.partner(b))) out.base.add(a, b);
            if (sa && sb && ma && !mb) out.base.add(a, b);
        }
    }
    return out;
}

namespace {

struct Channel {
    std::vector<EventId> sends;     // in sender's process order
    std::vector<EventId> receives;  // in receiver's process order
};

std::map<std::pair<ProcId, ProcId>, Channel> channels(const Msc& msc) {
    std::map<std::pair<ProcId, ProcId>, Channel> out;
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        for (EventId e : msc.line(static_cast<ProcId>(p))) {
            const Action& a = msc.label(e);
            auto& ch = out[{a.sender, a.receiver}];
            (a.is_send() ? ch.sends : ch.receives).push_back(e);
        }
    }
    return out;
}

}  // namespace

ModelRelation relb(const Msc& msc, int k) {
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    auto v = is_p2p(msc);
    if (!v.holds) throw NotP2p("relb needs a p2p MSC");
    ModelRelation out{RelationGraph(msc.size()), RelKind::relb};
    for (const auto& [key, ch] : channels(msc)) {
        for (std::size_t i = 0; i < ch.receives.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(k);
            if (j < ch.sends.size()) out.base.add(ch.receives[i], ch.sends[j]);
        }
    }
    return out;
}

ModelRelation relb_asy(const Msc& msc, int k) {
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    ModelRelation out{RelationGraph(msc.size()), RelKind::relb_asy};
    for (const auto& [key, ch] : channels(msc)) {
        const auto& ss = ch.sends;
        // receive of s comes no later than receive of t (or t is unmatched)
        auto not_before = [&](EventId t, EventId r) {
            return !msc.matched(t) || msc.partner(t) == r || msc.proc_before(r, msc.partner(t));
        };
        for (std::size_t j = 0; j < ss.size(); ++j) {
            EventId s = ss[j];
            if (j < static_cast<std::size_t>(k)) continue;
            // candidate earliest matched send t among s_1..s_k, s
            for (std::size_t i = 0; i <= j; ++i) {
                EventId t = ss[i];
                if (!msc.matched(t)) continue;
                EventId r = msc.partner(t);
                std::size_t others = 0;
                for (std::size_t x = 0; x < j; ++x)
                    if (x != i && not_before(ss[x], r)) ++others;
                bool ok;
                if (i == j)
                    ok = others >= static_cast<std::size_t>(k);
                else
                    ok = k >= 1 && others >= static_cast<std::size_t>(k - 1) && not_before(s, r);
                if (ok) out.base.add(r, s);
            }
        }
    }
    return out;
}

}  // namespace msckit
