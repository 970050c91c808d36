#include <doctest.h>

#include <bit>

#include "msckit/stw.hpp"
#include "support.hpp"

using namespace testsupport;

namespace {

// exact treewidth of the process/message graph by the elimination-ordering DP
int treewidth(const Msc& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return -1;
    std::vector<unsigned> adj(n, 0);
    auto link = [&](int a, int b) {
        adj[a] |= 1u << b;
        adj[b] |= 1u << a;
    };
    for (const auto& ln : m.order())
        for (std::size_t i = 1; i < ln.size(); ++i) link(ln[i - 1], ln[i]);
    for (auto [s, r] : m.matching()) link(s, r);
    // q(S, v): vertices outside S + v reachable from v through S
    auto q = [&](unsigned S, int v) {
        unsigned seen = 1u << v, frontier = 1u << v, out = 0;
        while (frontier) {
            int x = std::countr_zero(frontier);
            frontier &= frontier - 1;
            unsigned nb = adj[x] & ~seen;
            seen |= nb;
            out |= nb & ~S;
            frontier |= nb & S;
        }
        return std::popcount(out);
    };
    const unsigned full = (1u << n) - 1;
    std::vector<int> tw(full + 1, n);
    tw[0] = -1;
    for (unsigned S = 1; S <= full; ++S)
        for (unsigned T = S; T; T &= T - 1) {
            int v = std::countr_zero(T);
            unsigned rest = S & ~(1u << v);
            tw[S] = std::min(tw[S], std::max(tw[rest], q(rest, v)));
        }
    return tw[full];
}

}  // namespace

TEST_SUITE("stw") {
    TEST_CASE("small shapes") {
        CHECK(stw_at_most(corpus("empty"), 0));
        auto one = parse_msc_text("processes p q\nmessage 1 p q\norder p !1\norder q ?1\n");
        CHECK(special_treewidth(one, 5) == 1);
        auto lone = parse_msc_text("processes p q\nmessage 1 p q lost\norder p !1\n");
        CHECK(special_treewidth(lone, 5) == 0);
        // the crown is a 4-cycle
        CHECK(special_treewidth(corpus("crown2"), 5) == 2);
    }

    TEST_CASE("corpus values") {
        CHECK(stw_at_most(corpus("p2p_not_co"), 3));
        CHECK(special_treewidth(corpus("p2p_not_co"), 5) == 2);
        CHECK(special_treewidth(corpus("nn_edg"), 5) == 2);
        CHECK(special_treewidth(corpus("producer"), 6) == 4);
    }

    TEST_CASE("monotone in k and bounded below by treewidth") {
        std::mt19937 rng(2);
        for (int i = 0; i < 150; ++i) {
            Msc m = random_msc(rng, 10);
            auto w = special_treewidth(m, 10);
            REQUIRE(w);
            CAPTURE(write_msc_text(m));
            CHECK(*w >= treewidth(m));
            if (*w > 0) CHECK_FALSE(stw_at_most(m, *w - 1));
            CHECK(stw_at_most(m, *w + 1));
            CHECK(*w <= std::max<int>(0, static_cast<int>(m.size()) - 1));
        }
    }

    TEST_CASE("transcripts") {
        auto m = corpus("p2p_not_co");
        auto t = stw_transcript(m, 2);
        REQUIRE(t);
        CHECK(t->rfind("fragment {", 0) == 0);
        CHECK(t->find("split into") != std::string::npos);
        CHECK_FALSE(stw_transcript(m, 1));
    }

    TEST_CASE("size cap") {
        auto m = corpus("producer");
        CHECK_THROWS_AS(stw_at_most(m, 2, 10), SizeLimitExceeded);
    }
}
