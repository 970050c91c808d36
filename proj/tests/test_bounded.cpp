#include <doctest.h>

#include "support.hpp"

using namespace testsupport;

namespace {

const ModelId kBoundedModels[] = {ModelId::asy, ModelId::p2p, ModelId::co, ModelId::mb, ModelId::onen, ModelId::nn};

// Brute force over assignments of messages to numbered factors: process lines
// must be non-decreasing, no receive may be directly followed by a send of the
// same factor, and an unmatched send must not share a channel with a matched
// send of a later factor.
bool exchanges_oracle(const Msc& m, int cap) {
    std::vector<EventId> sends = m.sends();
    const int n = static_cast<int>(sends.size());
    if (n == 0) return true;
    std::vector<int> msg_of(m.size());
    for (int i = 0; i < n; ++i) {
        msg_of[sends[i]] = i;
        if (m.matched(sends[i])) msg_of[m.partner(sends[i])] = i;
    }
    for (int factors = 1; factors <= n; ++factors) {
        std::vector<int> f(n, 0);
        while (true) {
            bool ok = true;
            std::vector<int> load(factors, 0);
            for (int i = 0; i < n; ++i) ++load[f[i]];
            for (int c : load)
                if (c == 0 || (cap > 0 && c > cap)) ok = false;
            for (const auto& ln : m.order())
                for (std::size_t i = 1; ok && i < ln.size(); ++i) {
                    int a = f[msg_of[ln[i - 1]]], b = f[msg_of[ln[i]]];
                    if (a > b || (a == b && m.is_receive(ln[i - 1]) && m.is_send(ln[i]))) ok = false;
                }
            for (EventId u : sends)
                for (EventId s : sends) {
                    if (!ok) break;
                    if (!m.matched(u) && m.matched(s) && m.label(u).sender == m.label(s).sender &&
                        m.label(u).receiver == m.label(s).receiver && f[msg_of[u]] < f[msg_of[s]])
                        ok = false;
                }
            if (ok) return true;
            int i = 0;
            while (i < n && ++f[i] == factors) f[i++] = 0;
            if (i == n) break;
        }
    }
    return false;
}

}  // namespace

TEST_SUITE("bounded") {
    TEST_CASE("three sends in a row") {
        auto m = corpus("three_in_a_row");
        CHECK(is_k_bounded_linearization(m, lin_of(m, "!1 !2 ?1 !3 ?2 ?3"), 2));
        CHECK_FALSE(is_k_bounded_linearization(m, lin_of(m, "!1 !2 !3 ?1 ?2 ?3"), 2));
        CHECK(max_occupancy(m, lin_of(m, "!1 !2 !3 ?1 ?2 ?3")) == 3);
        CHECK(max_occupancy(m, lin_of(m, "!1 ?1 !2 ?2 !3 ?3")) == 1);
        CHECK(exists_k_bounded(m, 1, ModelId::p2p).holds());
        CHECK_FALSE(forall_k_bounded(m, 2, ModelId::p2p).holds());
        CHECK(forall_k_bounded(m, 3, ModelId::p2p).holds());
        auto v = forall_k_bounded(m, 2, ModelId::p2p);
        REQUIRE(v.linearization);
        CHECK_FALSE(is_k_bounded_linearization(m, *v.linearization, 2));
    }

    TEST_CASE("global occupancy pools channels") {
        auto m = corpus("fork");
        auto lin = lin_of(m, "!1 !2 ?1 ?2");
        CHECK(max_occupancy(m, lin) == 1);
        CHECK(max_occupancy(m, lin, true) == 2);
    }

    TEST_CASE("producer is existentially 1-bounded") {
        auto m = corpus("producer");
        auto v = exists_k_bounded(m, 1, ModelId::p2p);
        CHECK(v.holds());
        REQUIRE(v.linearization);
        CHECK(is_linearization(m, *v.linearization));
        CHECK(check_linearization(m, *v.linearization, ModelId::p2p));
        CHECK(is_k_bounded_linearization(m, *v.linearization, 1));
        CHECK(minimal_exists_bound(m, ModelId::p2p, 5) == 1);
    }

    TEST_CASE("non-members and bad arguments") {
        auto m = corpus("crossed_fifo");
        CHECK(exists_k_bounded(m, 3, ModelId::p2p).status == BoundedVerdict::Status::not_in_model);
        CHECK_THROWS_AS(exists_k_bounded(m, 1, ModelId::rsc), std::invalid_argument);
        CHECK_THROWS_AS(exists_k_bounded(m, -1, ModelId::asy), std::invalid_argument);
        CHECK(exists_k_bounded(m, 2, ModelId::asy).holds());
        // two lost messages on one channel never fit in a 1-bounded channel
        auto lost = parse_msc_text("processes p q\nmessage 1 p q lost\nmessage 2 p q lost\norder p !1 !2\n");
        CHECK_FALSE(exists_k_bounded(lost, 1, ModelId::p2p).holds());
        CHECK(exists_k_bounded(lost, 2, ModelId::p2p).holds());
    }

    TEST_CASE("exists and forall agree with linearization enumeration") {
        std::mt19937 rng(31);
        for (int i = 0; i < 300; ++i) {
            Msc m = random_msc(rng, 9);
            for (ModelId model : kBoundedModels) {
                bool member = oracle_member(m, model);
                for (int k = 0; k <= 2; ++k) {
                    CAPTURE(write_msc_text(m));
                    CAPTURE(to_string(model));
                    CAPTURE(k);
                    auto e = exists_k_bounded(m, k, model);
                    auto f = forall_k_bounded(m, k, model);
                    CHECK(e.holds() == (member && oracle_exists_bounded(m, k, model)));
                    CHECK(f.holds() == (member && oracle_forall_bounded(m, k, model)));
                    if (e.holds()) {
                        REQUIRE(e.linearization);
                        CHECK(check_linearization(m, *e.linearization, model));
                        CHECK(is_k_bounded_linearization(m, *e.linearization, k));
                    }
                }
            }
        }
    }

    TEST_CASE("weak synchronizability of the corpus") {
        auto w = corpus("weak1_three_steps");
        auto d = decompose_exchanges(w, 1);
        REQUIRE(d.ok);
        CHECK(d.factors.size() == 3);
        CHECK(is_weakly_k_synchronous(w, 1));
        auto parts = factor_mscs(w, d);
        REQUIRE(parts.size() == 3);
        Msc joined = parts[0];
        for (std::size_t i = 1; i < parts.size(); ++i) {
            CHECK(is_exchange(parts[i]));
            joined = concatenate(joined, parts[i]);
        }
        CHECK(isomorphic(joined, w));

        auto p = corpus("producer");
        auto dp = decompose_exchanges(p);
        CHECK_FALSE(dp.ok);
        CHECK(dp.witness);
        CHECK_FALSE(is_weakly_synchronous(p));
        CHECK(is_exchange(corpus("crown2")));
        CHECK_FALSE(is_exchange(corpus("rsc_relay")));
    }

    TEST_CASE("decomposition agrees with brute-force factor assignment") {
        std::mt19937 rng(12);
        int nonsync = 0;
        for (int i = 0; i < 400; ++i) {
            Msc m = random_msc(rng, 10);
            if (m.message_count() > 5) continue;
            CAPTURE(write_msc_text(m));
            bool ws = is_weakly_synchronous(m);
            nonsync += !ws;
            CHECK(ws == exchanges_oracle(m, 0));
            for (int k = 1; k <= 2; ++k) CHECK(is_weakly_k_synchronous(m, k) == exchanges_oracle(m, k));
            auto d = decompose_exchanges(m);
            if (d.ok) {
                auto parts = factor_mscs(m, d);
                Msc joined = parts.empty() ? m : parts[0];
                for (std::size_t j = 1; j < parts.size(); ++j) joined = concatenate(joined, parts[j]);
                CHECK(isomorphic(joined, m));
            }
        }
        CHECK(nonsync > 0);
    }
}
