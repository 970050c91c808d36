#include <doctest.h>

#include "msckit/mso.hpp"
#include "support.hpp"

using namespace testsupport;
namespace mso = msckit::mso;

namespace {

bool eval(const Msc& m, const std::string& text, mso::ClosureMode mode = mso::ClosureMode::native) {
    return mso::evaluate(m, mso::parse_formula(text), {}, {mode, 12});
}

const ModelId kBoundedModels[] = {ModelId::asy, ModelId::p2p, ModelId::co, ModelId::mb, ModelId::onen, ModelId::nn};

}  // namespace

TEST_SUITE("mso") {
    TEST_CASE("printing round trips") {
        const char* texts[] = {
            "E x. A y. (x -> y | x <| y) => ~(y <= x)",
            "A X. (E x. x in X) <-> true",
            "E x. lab(x) = !(p,q,_) & matched(x)",
            "TC[u,v: u -> v & send(u)]*(a, b) | a [mb,1n]+ b | a [relb2] b",
            "phi_mb & ~phi_nn",
            "E s, s'. chan(s,s') & s != s' & s < s'",
        };
        for (const char* t : texts) {
            CAPTURE(t);
            auto f = mso::parse_formula(t);
            auto s = mso::to_string(f);
            CHECK(mso::to_string(mso::parse_formula(s)) == s);
        }
    }

    TEST_CASE("syntax errors") {
        CHECK_THROWS_AS(mso::parse_formula("E x. x ->"), mso::SyntaxError);
        CHECK_THROWS_AS(mso::parse_formula("x [foo] y"), mso::SyntaxError);
        CHECK_THROWS_AS(mso::parse_formula("X -> y"), mso::SyntaxError);
        CHECK_THROWS_AS(mso::parse_formula("x in y"), mso::SyntaxError);
        CHECK_THROWS_AS(mso::parse_formula("(true"), mso::SyntaxError);
        CHECK_THROWS_AS(mso::parse_formula("true $"), mso::SyntaxError);
        try {
            mso::parse_formula("true & ]");
        } catch (const mso::SyntaxError& e) {
            CHECK(e.position == 7);
        }
    }

    TEST_CASE("free variables") {
        auto f = mso::parse_formula("E y. x -> y & y in Y");
        CHECK(mso::free_variables(f) == std::set<std::string>{"Y", "x"});
        auto m = corpus("three_in_a_row");
        CHECK_THROWS_AS(mso::evaluate(m, f), std::invalid_argument);
        mso::Assignment env;
        env.events["x"] = lin_of(m, "!1")[0];
        env.sets["Y"] = {lin_of(m, "!2")[0]};
        CHECK(mso::evaluate(m, f, env));
        env.sets["Y"] = {lin_of(m, "!3")[0]};
        CHECK_FALSE(mso::evaluate(m, f, env));
    }

    TEST_CASE("first-order atoms agree with direct counting") {
        std::mt19937 rng(13);
        for (int i = 0; i < 100; ++i) {
            Msc m = random_msc(rng, 9);
            bool any_unmatched = !m.unmatched_sends().empty();
            CHECK(eval(m, "E x. send(x) & ~matched(x)") == any_unmatched);
            CHECK(eval(m, "no_unmatched") == !any_unmatched);
            bool recv_then_send = false;
            for (EventId e = 0; e < static_cast<EventId>(m.size()); ++e)
                if (m.is_receive(e) && m.proc_next(e) >= 0 && m.is_send(m.proc_next(e))) recv_then_send = true;
            CHECK(eval(m, "E x. E y. recv(x) & send(y) & x -> y") == recv_then_send);
            auto hb = happens_before(m);
            CHECK(eval(m, "A x. A y. x <= y <-> (x < y | x = y)"));
            bool total = hb.edge_count() == m.size() * (m.size() + 1) / 2;
            CHECK(eval(m, "A x. A y. x <= y | y <= x") == total);
        }
    }

    TEST_CASE("labels") {
        auto m = corpus("three_party");
        CHECK(eval(m, "E x. lab(x) = !(p,q,1)"));
        CHECK(eval(m, "E x. lab(x) = ?(r,q,_)"));
        CHECK_FALSE(eval(m, "E x. lab(x) = ?(q,r,_)"));
        CHECK_FALSE(eval(m, "E x. lab(x) = !(p,zz,_)"));
        CHECK(eval(m, "A x. (lab(x) = !(_,_,_) <-> send(x))"));
    }

    TEST_CASE("second-order quantifiers") {
        auto m = corpus("fork");
        // a set closed under <| containing !1 holds ?1
        CHECK(eval(m, "A x. A y. x <| y => (A X. (x in X & A u. A v. ((u in X & u <| v) => v in X)) => y in X)"));
        CHECK(eval(m, "E X. A x. (x in X <-> send(x))"));
        CHECK_FALSE(eval(m, "E X. E x. x in X & ~(x in X)"));
        auto big = corpus("producer");
        CHECK_THROWS_AS(eval(big, "E X. true"), SizeLimitExceeded);
    }

    TEST_CASE("builtins match the classifier on the corpus") {
        for (const auto& [name, m] : all_corpus()) {
            if (m.size() > 12) continue;
            auto rep = classify(m);
            for (ModelId id : kAllModels)
                for (auto mode : {mso::BuiltinMode::native, mso::BuiltinMode::formula}) {
                    CAPTURE(name);
                    CAPTURE(to_string(id));
                    CHECK(mso::evaluate(m, mso::builtin(id, mode)) == rep.member(id));
                }
        }
    }

    TEST_CASE("written-out builtins match the classifier on random MSCs") {
        std::mt19937 rng(77);
        for (int i = 0; i < 200; ++i) {
            Msc m = random_msc(rng, 8);
            auto rep = classify(m);
            for (ModelId id : kAllModels) {
                CAPTURE(write_msc_text(m));
                CAPTURE(to_string(id));
                CHECK(mso::evaluate(m, mso::builtin(id, mso::BuiltinMode::formula)) == rep.member(id));
            }
        }
    }

    TEST_CASE("subset closures and second-order expansion match native closures") {
        std::mt19937 rng(23);
        for (int i = 0; i < 60; ++i) {
            Msc m = random_msc(rng, 7);
            for (ModelId id : kAllModels) {
                auto f = mso::builtin(id);
                bool native = mso::evaluate(m, f);
                CHECK(mso::evaluate(m, f, {}, {mso::ClosureMode::subsets, 12}) == native);
                if (m.size() <= 5) CHECK(mso::evaluate(m, mso::expand_closures(f)) == native);
            }
        }
        auto e = mso::expand_closures(mso::parse_formula("E x. E y. x < y"));
        CHECK(mso::to_string(e).find("A X_tc") != std::string::npos);
    }

    TEST_CASE("bounded formulas match the bounded module") {
        std::mt19937 rng(41);
        for (int i = 0; i < 150; ++i) {
            Msc m = random_msc(rng, 8);
            for (ModelId id : kBoundedModels)
                for (int k = 0; k <= 2; ++k) {
                    CAPTURE(write_msc_text(m));
                    CAPTURE(to_string(id));
                    CAPTURE(k);
                    bool en = mso::evaluate(m, mso::exists_bounded(id, k));
                    bool fn = mso::evaluate(m, mso::forall_bounded(id, k));
                    CHECK(mso::evaluate(m, mso::exists_bounded(id, k, mso::BuiltinMode::formula)) == en);
                    CHECK(mso::evaluate(m, mso::forall_bounded(id, k, mso::BuiltinMode::formula)) == fn);
                    // nn boundedness is decided by search in the bounded module; the
                    // relational formulas are only checked for self-consistency above
                    if (id == ModelId::nn) continue;
                    CHECK(en == exists_k_bounded(m, k, id).holds());
                    CHECK(fn == forall_k_bounded(m, k, id).holds());
                }
        }
        CHECK_THROWS_AS(mso::exists_bounded(ModelId::rsc, 1), std::invalid_argument);
    }
}
