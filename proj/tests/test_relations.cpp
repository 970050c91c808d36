#include <doctest.h>

#include "msckit/relations.hpp"
#include "support.hpp"

using namespace testsupport;

namespace {

RelationGraph mb_oracle(const Msc& m) {
    RelationGraph g(m.size());
    for (EventId s : m.sends())
        for (EventId t : m.sends()) {
            if (s == t || m.label(s).receiver != m.label(t).receiver) continue;
            bool edge = (m.matched(s) && !m.matched(t)) ||
                        (m.matched(s) && m.matched(t) && m.proc_before(m.partner(s), m.partner(t)));
            if (edge) g.add(s, t);
        }
    return g;
}

RelationGraph onen_oracle(const Msc& m) {
    RelationGraph g(m.size());
    for (EventId a = 0; a < static_cast<EventId>(m.size()); ++a)
        for (EventId b = 0; b < static_cast<EventId>(m.size()); ++b) {
            if (a == b || m.label(a).sender != m.label(b).sender || m.label(a).kind != m.label(b).kind) continue;
            if (m.is_send(a) && m.matched(a) && !m.matched(b)) g.add(a, b);
            if (m.is_receive(a) && m.proc_before(m.partner(a), m.partner(b))) g.add(a, b);
        }
    return g;
}

RelationGraph causal(const Msc& m) {
    RelationGraph g = process_relation(m);
    g.unite(message_relation(m));
    return g;
}

// i-th receive on a channel before the (i+k)-th send on it
RelationGraph relb_oracle(const Msc& m, int k) {
    RelationGraph g(m.size());
    std::map<std::pair<ProcId, ProcId>, std::vector<EventId>> sends, recvs;
    for (const auto& ln : m.order())
        for (EventId e : ln) {
            const Action& a = m.label(e);
            (a.is_send() ? sends : recvs)[{a.sender, a.receiver}].push_back(e);
        }
    for (const auto& [ch, rs] : recvs) {
        const auto& ss = sends[ch];
        for (std::size_t i = 0; i < rs.size(); ++i)
            if (i + k < ss.size()) g.add(rs[i], ss[i + k]);
    }
    return g;
}

}  // namespace

TEST_SUITE("relations") {
    TEST_CASE("relation graph basics") {
        RelationGraph g(4);
        g.add(0, 1);
        g.add(1, 2);
        g.add(2, 3);
        auto c = transitive_closure(g);
        CHECK(c.has(0, 3));
        CHECK_FALSE(c.has(0, 0));
        CHECK(transitive_closure(g, true).has(2, 2));
        CHECK(c.edge_count() == 6);
        CHECK(g.subset_of(c));
        CHECK(c.difference(g).size() == 3);
        CHECK(is_acyclic(g).acyclic);
        CHECK(topological_order(g) == std::vector<int>{0, 1, 2, 3});
        g.add(3, 1);
        auto ac = is_acyclic(g);
        CHECK_FALSE(ac.acyclic);
        CHECK(ac.cycle.size() == 3);
        CHECK_FALSE(topological_order(g));
    }

    TEST_CASE("mb and 1-n relations match their definitions") {
        std::mt19937 rng(21);
        for (int i = 0; i < 300; ++i) {
            Msc m = random_msc(rng, 10);
            CHECK(mb_rel(m).base == mb_oracle(m));
            CHECK(onen_rel(m).base == onen_oracle(m));
            auto mbc = causal(m);
            mbc.unite(mb_oracle(m));
            CHECK(mb_partial(m) == transitive_closure(mbc));
            auto onc = causal(m);
            onc.unite(onen_oracle(m));
            CHECK(onen_partial(m) == transitive_closure(onc));
            CHECK(onen_partial_reflexive(m) == transitive_closure(onc, true));
            auto nnc = causal(m);
            nnc.unite(mb_oracle(m));
            nnc.unite(onen_oracle(m));
            CHECK(nn_rel(m).base == transitive_closure(nnc));
            CHECK(nn_rel(m).base.subset_of(nn_bowtie(m).base));
        }
    }

    TEST_CASE("relb on the three sends in a row") {
        auto m = corpus("three_in_a_row");
        auto r = relb(m, 2).base;
        auto e = r.edges();
        REQUIRE(e.size() == 1);
        CHECK(m.event_name(e[0].first) == "?1");
        CHECK(m.event_name(e[0].second) == "!3");
        CHECK(relb(m, 1).base.edge_count() == 2);
        CHECK(relb(m, 3).base.edge_count() == 0);
        CHECK(relb_asy(m, 2).base.has(e[0].first, e[0].second));
    }

    TEST_CASE("relb needs p2p") { CHECK_THROWS_AS(relb(corpus("crossed_fifo"), 1), NotP2p); }

    TEST_CASE("relb matches channel counting and binds every k-bounded linearization") {
        std::mt19937 rng(8);
        int tested = 0;
        for (int i = 0; i < 400; ++i) {
            Msc m = random_msc(rng, 8);
            if (!is_p2p(m).holds) continue;
            ++tested;
            for (int k = 1; k <= 2; ++k) {
                auto r = relb(m, k).base;
                CHECK(r == relb_oracle(m, k));
                for_each_linearization(m, [&](const Linearization& lin) {
                    if (!is_k_bounded_linearization(m, lin, k)) return true;
                    std::vector<int> at(m.size());
                    for (std::size_t j = 0; j < lin.size(); ++j) at[lin[j]] = static_cast<int>(j);
                    for (auto [a, b] : r.edges()) CHECK(at[a] < at[b]);
                    return true;
                });
            }
        }
        CHECK(tested > 100);
    }

    TEST_CASE("causal edges helper") {
        auto m = corpus("three_party");
        auto g = with_causal_edges(m, RelationGraph(m.size()));
        CHECK(g == causal(m));
    }
}
