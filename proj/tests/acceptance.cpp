// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <functional>
#include <iostream>

#include "msckit/exec.hpp"
#include "msckit/mso.hpp"
#include "msckit/relations.hpp"
#include "msckit/stw.hpp"
#include "support.hpp"

using namespace testsupport;
namespace mso = msckit::mso;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string classes(const ClassReport& rep) {
    std::string out;
    for (ModelId id : kAllModels)
        if (rep.member(id)) out += (out.empty() ? "" : " ") + to_string(id);
    return out;
}

// 1000 random MSCs with at most 8 events plus the corpus MSCs with at most 10
std::vector<Msc> population() {
    std::vector<Msc> out;
    std::mt19937 rng(20240601);
    for (int i = 0; i < 1000; ++i) out.push_back(random_msc(rng, 8));
    for (auto& [name, m] : all_corpus())
        if (m.size() <= 10) out.push_back(m);
    return out;
}

// every downward-closed event set, as keep vectors
std::vector<std::vector<bool>> hb_prefix_sets(const Msc& m) {
    std::vector<std::vector<bool>> out;
    const int n = static_cast<int>(m.size());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<bool> keep(n);
        for (int e = 0; e < n; ++e) keep[e] = mask >> e & 1;
        if (prefix(m, keep, PrefixClosure::hb).prefix) out.push_back(keep);
    }
    return out;
}

Outcome criterion1() {
    const std::map<std::string, std::string> captions = {
        {"co_not_mb", "asy p2p co"},
        {"co_triangle", "asy p2p co mb 1n nn"},
        {"crossed_fifo", "asy"},
        {"crown2", "asy p2p co mb 1n nn"},
        {"empty", "asy p2p co mb 1n nn rsc"},
        {"fork", "asy p2p co mb 1n nn rsc"},
        {"fork_prefix", "asy p2p co mb"},
        {"lost_other_channel", "asy p2p co mb"},
        {"lost_then_sent", "asy"},
        {"nn_edg", "asy p2p co mb 1n nn"},
        {"onen_not_nn", "asy p2p co mb 1n"},
        {"p2p_not_co", "asy p2p"},
        {"producer", "asy p2p co mb 1n nn"},
        {"rsc_relay", "asy p2p co mb 1n nn rsc"},
        {"three_in_a_row", "asy p2p co mb 1n nn rsc"},
        {"three_party", "asy p2p co mb 1n nn rsc"},
        {"weak1_three_steps", "asy p2p co mb 1n nn"},
    };
    Outcome o;
    auto corpus_mscs = all_corpus();
    auto t0 = Clock::now();
    std::size_t seen = 0;
    for (const auto& [name, m] : corpus_mscs) {
        auto it = captions.find(name);
        if (it == captions.end()) continue;
        ++seen;
        auto got = classes(classify(m));
        if (got != it->second) o.fail(name + ": got {" + got + "}, expected {" + it->second + "}");
    }
    double t = seconds_since(t0);
    if (seen != captions.size()) o.fail("corpus incomplete");
    if (t >= 1.0) o.fail("took " + std::to_string(t) + " s");
    if (o.ok) o.detail = std::to_string(seen) + " MSCs in " + std::to_string(t) + " s";
    return o;
}

Outcome criterion2() {
    Outcome o;
    auto m = corpus("nn_edg");
    auto r = nn_linearize(m);
    const std::string expected = "!5 !1 !2 !3 ?5 ?1 ?2 !4 !6 ?3 ?4";
    if (!r.ok) {
        o.fail("nn_linearize failed: " + r.error);
        return o;
    }
    if (m.format(r.order) != expected) o.fail("got " + m.format(r.order));
    if (!check_linearization(m, r.order, ModelId::nn)) o.fail("check_linearization(nn) rejects it");
    if (o.ok) o.detail = expected;
    return o;
}

Outcome criterion3(const std::vector<Msc>& pop) {
    Outcome o;
    auto t0 = Clock::now();
    std::size_t checks = 0;
    for (const auto& m : pop) {
        const std::pair<ModelId, Verdict (*)(const Msc&)> tests[] = {
            {ModelId::mb, is_mb}, {ModelId::onen, is_onen}, {ModelId::nn, is_nn}, {ModelId::rsc, is_rsc}};
        for (auto [id, fn] : tests) {
            ++checks;
            if (fn(m).holds != oracle_member(m, id)) o.fail(to_string(id) + " disagrees on\n" + write_msc_text(m));
        }
    }
    double t = seconds_since(t0);
    if (t >= 60.0) o.fail("took " + std::to_string(t) + " s");
    if (o.ok) o.detail = std::to_string(checks) + " checks in " + std::to_string(t) + " s";
    return o;
}

Outcome criterion4(const std::vector<Msc>& pop) {
    Outcome o;
    // rsc < nn < 1n < mb < co < p2p < asy
    const ModelId chain[] = {ModelId::rsc, ModelId::nn, ModelId::onen, ModelId::mb, ModelId::co, ModelId::p2p,
                             ModelId::asy};
    std::size_t no_unmatched = 0;
    for (const auto& m : pop) {
        auto rep = classify(m);
        for (int i = 0; i + 1 < 7; ++i)
            if (rep.member(chain[i]) && !rep.member(chain[i + 1]))
                o.fail(to_string(chain[i]) + " member outside " + to_string(chain[i + 1]));
        if (m.unmatched_sends().empty()) {
            ++no_unmatched;
            if (rep.member(ModelId::mb) != rep.member(ModelId::onen)) o.fail("mb and 1n differ without lost messages");
        }
    }
    auto corpus_mscs = all_corpus();
    for (int i = 0; i + 1 < 7; ++i) {
        bool strict = false;
        for (const auto& [name, m] : corpus_mscs) {
            auto rep = classify(m);
            if (rep.member(chain[i + 1]) && !rep.member(chain[i])) strict = true;
        }
        if (!strict) o.fail("no corpus MSC separates " + to_string(chain[i]) + " from " + to_string(chain[i + 1]));
    }
    if (o.ok)
        o.detail = std::to_string(pop.size()) + " MSCs, " + std::to_string(no_unmatched) +
                   " without unmatched sends, 6 strict inclusions";
    return o;
}

Outcome criterion5() {
    Outcome o;
    const std::pair<NetworkKind, ModelId> kinds[] = {{NetworkKind::p2p, ModelId::p2p},
                                                     {NetworkKind::mb, ModelId::mb},
                                                     {NetworkKind::onen, ModelId::onen},
                                                     {NetworkKind::nn, ModelId::nn}};
    std::size_t checks = 0;
    for (const auto& [name, m] : all_corpus()) {
        if (m.size() > 10) continue;
        for (auto [kind, id] : kinds) {
            auto net = network_for(kind, m.processes());
            bool runs = false;
            for_each_linearization(m, [&](const Linearization& lin) {
                runs = run_execution(net, linearization_to_execution(m, lin)).ok;
                return !runs;
            });
            ++checks;
            if (runs != is_member(m, id).holds) o.fail(name + " on " + to_string(kind));
        }
    }
    auto a = parse_execution("! p q m1\n! q r m2\n? q r m2\n? p q m1\n");
    auto b = parse_execution("! p q m1\n! r q m2\n? r q m2\n");
    if (classify_execution(a) != std::set<NetworkKind>{NetworkKind::p2p, NetworkKind::mb, NetworkKind::onen})
        o.fail("first example execution");
    if (classify_execution(b) != std::set<NetworkKind>{NetworkKind::p2p, NetworkKind::onen})
        o.fail("second example execution");
    if (o.ok) o.detail = std::to_string(checks) + " MSC/network pairs, both example executions";
    return o;
}

Outcome criterion6() {
    Outcome o;
    auto m = corpus("three_in_a_row");
    auto edges = relb(m, 2).base.edges();
    if (edges.size() != 1 || m.event_name(edges[0].first) != "?1" || m.event_name(edges[0].second) != "!3")
        o.fail("relb edge set for k=2");
    if (!is_k_bounded_linearization(m, lin_of(m, "!1 !2 ?1 !3 ?2 ?3"), 2)) o.fail("!1 !2 ?1 !3 ?2 ?3 rejected");
    if (is_k_bounded_linearization(m, lin_of(m, "!1 !2 !3 ?1 ?2 ?3"), 2)) o.fail("!1 !2 !3 ?1 ?2 ?3 accepted");
    if (!exists_k_bounded(corpus("producer"), 1, ModelId::p2p).holds()) o.fail("producer not exists-1-bounded");

    std::vector<Msc> mscs;
    for (auto& [name, c] : all_corpus())
        if (c.size() <= 9) mscs.push_back(c);
    std::mt19937 rng(77001);
    for (int i = 0; i < 400; ++i) mscs.push_back(random_msc(rng, 9));
    const ModelId models[] = {ModelId::asy, ModelId::p2p, ModelId::co, ModelId::mb, ModelId::onen, ModelId::nn};
    std::size_t checks = 0;
    for (const auto& x : mscs)
        for (ModelId id : models) {
            bool member = oracle_member(x, id);
            for (int k = 0; k <= 3; ++k) {
                checks += 2;
                if (exists_k_bounded(x, k, id).holds() != (member && oracle_exists_bounded(x, k, id)))
                    o.fail("exists " + std::to_string(k) + " " + to_string(id) + " on\n" + write_msc_text(x));
                if (forall_k_bounded(x, k, id).holds() != (member && oracle_forall_bounded(x, k, id)))
                    o.fail("forall " + std::to_string(k) + " " + to_string(id) + " on\n" + write_msc_text(x));
            }
        }
    if (o.ok) o.detail = std::to_string(checks) + " oracle checks";
    return o;
}

Outcome criterion7() {
    Outcome o;
    auto w = corpus("weak1_three_steps");
    auto d = decompose_exchanges(w, 1);
    if (!d.ok || d.factors.size() != 3) o.fail("weak1_three_steps: no 3-factor 1-decomposition");
    if (is_weakly_synchronous(corpus("producer"))) o.fail("producer is weakly synchronous");
    if (o.ok) o.detail = "3 factors; producer rejected";
    return o;
}

Outcome criterion8() {
    Outcome o;
    auto t0 = Clock::now();
    if (!stw_at_most(corpus("p2p_not_co"), 3)) o.fail("stw_at_most(p2p_not_co, 3) is false");
    std::size_t checked = 0;
    for (const auto& [name, m] : all_corpus()) {
        if (m.size() > 14 || !is_p2p(m).holds) continue;
        auto k = minimal_exists_bound(m, ModelId::p2p, 8);
        if (!k) continue;
        const int procs = static_cast<int>(m.process_count());
        const int bound = *k * procs * procs;
        ++checked;
        if (!stw_at_most(m, bound)) o.fail(name + " exceeds " + std::to_string(bound));
    }
    double t = seconds_since(t0);
    if (t >= 120.0) o.fail("took " + std::to_string(t) + " s");
    if (o.ok) o.detail = std::to_string(checked) + " MSCs in " + std::to_string(t) + " s";
    return o;
}

Outcome criterion9() {
    Outcome o;
    const ModelId models[] = {ModelId::p2p, ModelId::co, ModelId::mb, ModelId::onen, ModelId::nn, ModelId::rsc};
    std::size_t checks = 0;
    std::vector<Msc> small;
    for (const auto& [name, m] : all_corpus()) {
        if (m.size() > 12) continue;
        auto rep = classify(m);
        for (ModelId id : models) {
            ++checks;
            if (mso::evaluate(m, mso::builtin(id)) != rep.member(id)) o.fail(name + " " + to_string(id));
        }
        if (m.size() <= 8) small.push_back(m);
    }
    std::mt19937 rng(909);
    for (int i = 0; i < 100; ++i) small.push_back(random_msc(rng, 8));
    for (const auto& m : small)
        for (ModelId id : models) {
            auto f = mso::builtin(id);
            ++checks;
            if (mso::evaluate(m, f) != mso::evaluate(m, f, {}, {mso::ClosureMode::subsets, 12}))
                o.fail("subset closure differs for " + to_string(id) + " on\n" + write_msc_text(m));
        }
    if (o.ok) o.detail = std::to_string(checks) + " evaluations";
    return o;
}

Outcome criterion10() {
    Outcome o;
    std::mt19937 rng(1010);
    std::size_t prefixes = 0;
    for (int i = 0; i < 500; ++i) {
        Msc m = random_msc(rng, 8);
        auto rep = classify(m);
        auto sets = hb_prefix_sets(m);
        for (ModelId id : {ModelId::mb, ModelId::co, ModelId::p2p}) {
            if (!rep.member(id)) continue;
            for (const auto& keep : sets) {
                ++prefixes;
                if (!is_member(*prefix(m, keep, PrefixClosure::hb).prefix, id).holds)
                    o.fail("hb-prefix leaves " + to_string(id) + ":\n" + write_msc_text(m));
            }
        }
        if (rep.member(ModelId::nn)) {
            const int n = static_cast<int>(m.size());
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                std::vector<bool> keep(n);
                for (int e = 0; e < n; ++e) keep[e] = mask >> e & 1;
                auto p = prefix(m, keep, PrefixClosure::nn);
                if (!p.prefix) continue;
                ++prefixes;
                if (!is_nn(*p.prefix).holds) o.fail("nn-prefix leaves nn:\n" + write_msc_text(m));
            }
        }
    }
    auto fork = corpus("fork");
    auto fp = corpus("fork_prefix");
    std::vector<bool> keep(fork.size(), true);
    keep[lin_of(fork, "?1")[0]] = false;
    auto p = prefix(fork, keep, PrefixClosure::hb);
    if (!is_nn(fork).holds) o.fail("fork is not nn");
    if (!p.prefix || !isomorphic(*p.prefix, fp)) o.fail("fork_prefix is not the hb-prefix of fork");
    if (is_onen(fp).holds || is_nn(fp).holds) o.fail("fork_prefix is 1n or nn");
    if (o.ok) o.detail = std::to_string(prefixes) + " prefixes";
    return o;
}

}  // namespace

int main() {
    auto pop = population();
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"corpus classification", criterion1},
        {"nn linearization golden output", criterion2},
        {"relational membership equals enumeration", [&] { return criterion3(pop); }},
        {"hierarchy", [&] { return criterion4(pop); }},
        {"execution correspondence", criterion5},
        {"boundedness", criterion6},
        {"weak synchronizability", criterion7},
        {"special treewidth", criterion8},
        {"MSO cross-validation", criterion9},
        {"prefix closure", criterion10},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        all = all && o.ok;
        std::cout << (o.ok ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << ": " << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
