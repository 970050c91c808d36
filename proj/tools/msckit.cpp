#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <sstream>

#include "msckit/bounded.hpp"
#include "msckit/cfsm.hpp"
#include "msckit/classify.hpp"
#include "msckit/exec.hpp"
#include "msckit/io.hpp"
#include "msckit/mso.hpp"
#include "msckit/stw.hpp"

using namespace msckit;
using json = nlohmann::ordered_json;

namespace {

// exit codes
constexpr int kHolds = 0, kFails = 1, kUsage = 2;

struct Report {
    int code = kHolds;
    json data = json::object();
    std::string text;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string names(const Msc& msc, const std::vector<EventId>& evs) {
    std::string out;
    for (EventId e : evs) out += (out.empty() ? "" : " ") + msc.event_name(e);
    return out;
}

json name_list(const Msc& msc, const std::vector<EventId>& evs) {
    json a = json::array();
    for (EventId e : evs) a.push_back(msc.event_name(e));
    return a;
}

Msc load_valid(const std::string& path) {
    Msc msc = load_msc(path);
    auto rep = validate(msc);
    if (!rep.ok()) {
        std::string msg = path + " is not a valid MSC:";
        for (const auto& v : rep.violations) msg += "\n  (" + v.condition + ") " + v.detail;
        throw UsageError(msg);
    }
    return msc;
}

ModelId model_arg(const std::string& s) {
    auto m = parse_model(s);
    if (!m) throw UsageError("unknown model '" + s + "' (asy, p2p, co, mb, 1n, nn, rsc)");
    return *m;
}

Linearization parse_lin(const Msc& msc, const std::string& text) {
    Linearization out;
    std::istringstream is(text);
    for (std::string tok; is >> tok;) {
        bool found = false;
        for (EventId e = 0; e < static_cast<EventId>(msc.size()) && !found; ++e)
            if (msc.event_name(e) == tok) {
                out.push_back(e);
                found = true;
            }
        if (!found) throw UsageError("no event named " + tok);
    }
    return out;
}

Report cmd_validate(const std::string& path) {
    Msc msc = load_msc(path);
    auto rep = validate(msc);
    Report r;
    r.data["valid"] = rep.ok();
    json vs = json::array();
    for (const auto& v : rep.violations) {
        vs.push_back({{"condition", v.condition}, {"events", name_list(msc, v.events)}, {"detail", v.detail}});
        r.text += "violation (" + v.condition + "): " + v.detail + "\n";
    }
    r.data["violations"] = vs;
    if (rep.ok()) {
        r.text = "valid: " + std::to_string(msc.size()) + " events, " + std::to_string(msc.process_count()) +
                 " processes\n";
    } else {
        r.code = kFails;
    }
    return r;
}

Report cmd_classify(const std::string& path) {
    Msc msc = load_valid(path);
    auto rep = classify(msc);
    Report r;
    json models = json::object();
    for (ModelId m : kAllModels) {
        const auto& v = rep.at(m);
        json o{{"member", v.holds}};
        std::string line = to_string(m);
        line.resize(5, ' ');
        line += v.holds ? "yes" : "no ";
        if (!v.holds) {
            o["reason"] = v.reason;
            o["witness"] = name_list(msc, v.witness);
            line += "  " + v.reason;
            if (!v.witness.empty()) line += " [" + names(msc, v.witness) + "]";
        }
        models[to_string(m)] = o;
        r.text += line + "\n";
    }
    r.data["models"] = models;
    return r;
}

Report cmd_linearize(const std::string& path, const std::string& model) {
    Msc msc = load_valid(path);
    ModelId m = model_arg(model);
    Report r;
    r.data["model"] = to_string(m);
    try {
        auto lin = linearize(msc, m);
        r.data["linearization"] = name_list(msc, lin);
        r.text = msc.format(lin) + "\n";
    } catch (const NotAMember&) {
        auto v = is_member(msc, m);
        r.code = kFails;
        r.data["linearization"] = nullptr;
        r.data["reason"] = v.reason;
        r.data["witness"] = name_list(msc, v.witness);
        r.text = "not a " + to_string(m) + " MSC: " + v.reason +
                 (v.witness.empty() ? "" : " [" + names(msc, v.witness) + "]") + "\n";
    }
    return r;
}

Report cmd_check_lin(const std::string& path, const std::string& model, const std::string& lin_text) {
    Msc msc = load_valid(path);
    ModelId m = model_arg(model);
    auto lin = parse_lin(msc, lin_text);
    Report r;
    bool is_lin = is_linearization(msc, lin);
    bool ok = is_lin && check_linearization(msc, lin, m);
    r.data["model"] = to_string(m);
    r.data["linearization"] = is_lin;
    r.data["accepted"] = ok;
    if (!is_lin) {
        r.text = "rejected: not a linearization of the MSC\n";
    } else {
        r.text = ok ? "accepted by " + to_string(m) + "\n" : "rejected: not executable in " + to_string(m) + "\n";
    }
    r.code = ok ? kHolds : kFails;
    return r;
}

Report cmd_bounded(const std::string& path, const std::string& model, int k, bool universal) {
    Msc msc = load_valid(path);
    ModelId m = model_arg(model);
    if (m == ModelId::rsc) throw UsageError("boundedness is defined for asy, p2p, co, mb, 1n, nn");
    if (k < 0) throw UsageError("--k must be non-negative");
    auto v = universal ? forall_k_bounded(msc, k, m) : exists_k_bounded(msc, k, m);
    Report r;
    const std::string what = std::string(universal ? "forall " : "exists ") + std::to_string(k) + "-bounded " +
                             to_string(m);
    r.data["model"] = to_string(m);
    r.data["k"] = k;
    r.data["quantifier"] = universal ? "forall" : "exists";
    r.data["holds"] = v.holds();
    r.data["in_model"] = v.status != BoundedVerdict::Status::not_in_model;
    r.data["reason"] = v.reason;
    r.data["witness"] = name_list(msc, v.witness);
    r.data["linearization"] = v.linearization ? json(name_list(msc, *v.linearization)) : json(nullptr);
    r.text = what + ": " + (v.holds() ? "yes" : "no") + "\n";
    if (!v.reason.empty()) r.text += "reason: " + v.reason + "\n";
    if (!v.witness.empty()) r.text += "witness: " + names(msc, v.witness) + "\n";
    if (v.linearization) r.text += "linearization: " + msc.format(*v.linearization) + "\n";
    r.code = v.holds() ? kHolds : kFails;
    return r;
}

Report cmd_decompose(const std::string& path, std::optional<int> k) {
    Msc msc = load_valid(path);
    if (k && *k < 1) throw UsageError("--k must be at least 1");
    auto d = decompose_exchanges(msc, k);
    Report r;
    r.data["ok"] = d.ok;
    if (k) r.data["k"] = *k;
    json fs = json::array();
    for (std::size_t i = 0; i < d.factors.size(); ++i) {
        fs.push_back(name_list(msc, d.factors[i]));
        r.text += "factor " + std::to_string(i + 1) + ": " + names(msc, d.factors[i]) + "\n";
    }
    r.data["factors"] = fs;
    if (!d.ok) {
        r.code = kFails;
        r.data["reason"] = d.reason;
        r.text = "not weakly " + (k ? std::to_string(*k) + "-" : std::string()) + "synchronous: " + d.reason + "\n";
        if (d.witness) {
            r.data["witness"] = name_list(msc, {d.witness->first, d.witness->second});
            r.text += "witness: " + names(msc, {d.witness->first, d.witness->second}) + "\n";
        }
    }
    return r;
}

Report cmd_stw(const std::string& path, int max_k, bool transcript, std::size_t max_events) {
    Msc msc = load_valid(path);
    auto w = special_treewidth(msc, max_k, max_events);
    Report r;
    r.data["max"] = max_k;
    r.data["stw"] = w ? json(*w) : json(nullptr);
    if (w) {
        r.text = "stw = " + std::to_string(*w) + "\n";
        if (transcript) {
            auto t = stw_transcript(msc, *w, max_events);
            r.data["transcript"] = *t;
            r.text += *t;
        }
    } else {
        r.code = kFails;
        r.text = "stw > " + std::to_string(max_k) + "\n";
    }
    return r;
}

Report cmd_mso(const std::string& path, const std::string& formula, const std::string& closure) {
    Msc msc = load_valid(path);
    auto f = mso::parse_formula(formula);
    auto free = mso::free_variables(f);
    if (!free.empty()) throw UsageError("formula has free variables: " + *free.begin());
    mso::EvalOptions opts;
    if (closure == "subsets") opts.closure = mso::ClosureMode::subsets;
    bool v = mso::evaluate(msc, f, {}, opts);
    Report r;
    r.data["formula"] = mso::to_string(f);
    r.data["value"] = v;
    r.text = v ? "true\n" : "false\n";
    r.code = v ? kHolds : kFails;
    return r;
}

Report cmd_exec(const std::string& path, const std::string& network) {
    Execution ex = parse_execution(read_file(path));
    auto kinds = classify_execution(ex);
    Report r;
    json ks = json::array();
    std::string line = "runs on:";
    for (auto k : kinds) {
        ks.push_back(to_string(k));
        line += " " + to_string(k);
    }
    if (kinds.empty()) line += " none";
    r.data["networks"] = ks;
    r.text = line + "\n";
    r.code = kinds.empty() ? kFails : kHolds;
    if (!network.empty()) {
        auto kind = parse_network_kind(network);
        if (!kind || *kind == NetworkKind::custom) throw UsageError("unknown network '" + network + "'");
        auto res = run_execution(network_for(*kind, ex.processes), ex);
        r.data["network"] = to_string(*kind);
        r.data["ok"] = res.ok;
        if (res.ok) {
            Msc msc = execution_to_msc(ex, *kind);
            r.data["msc"] = json::parse(write_msc_json(msc));
            r.text += write_msc_text(msc);
            r.code = kHolds;
        } else {
            r.data["failed_at"] = res.failed_at;
            r.text += "blocked at action " + std::to_string(res.failed_at + 1) + " on " + to_string(*kind) + "\n";
            r.code = kFails;
        }
    }
    return r;
}

Report cmd_cfsm_explore(const std::string& path, const std::string& model, int max_events) {
    auto sys = parse_cfsm(read_file(path));
    ModelId m = model_arg(model);
    auto all = explore(sys, m, max_events);
    Report r;
    r.data["model"] = to_string(m);
    r.data["max_events"] = max_events;
    json ms = json::array();
    r.text = std::to_string(all.size()) + " behaviors with at most " + std::to_string(max_events) + " events in " +
             to_string(m) + "\n";
    for (const auto& msc : all) {
        ms.push_back(json::parse(write_msc_json(msc)));
        r.text += "---\n" + write_msc_text(msc);
    }
    r.data["behaviors"] = ms;
    return r;
}

Report cmd_cfsm_synch(const std::string& path, const std::string& model, const std::string& predicate, int k,
                      int max_events) {
    auto sys = parse_cfsm(read_file(path));
    ModelId m = model_arg(model);
    auto p = parse_sync_predicate(predicate);
    if (!p) throw UsageError("unknown predicate '" + predicate + "'");
    if (k < 0) throw UsageError("--k must be non-negative");
    auto res = bounded_synchronizability(sys, m, {*p, k}, max_events);
    Report r;
    r.data["model"] = to_string(m);
    r.data["predicate"] = to_string(*p);
    r.data["k"] = k;
    r.data["max_events"] = max_events;
    r.data["violation"] = res.violation;
    r.data["verdict"] = res.verdict;
    r.data["explored"] = res.explored;
    r.data["counterexample"] = res.counterexample ? json::parse(write_msc_json(*res.counterexample)) : json(nullptr);
    r.text = res.verdict + " (" + std::to_string(res.explored) + " behaviors explored)\n";
    if (res.counterexample) r.text += write_msc_text(*res.counterexample);
    r.code = res.violation ? kFails : kHolds;
    return r;
}

Report cmd_dot(const std::string& path) {
    Msc msc = load_valid(path);
    Report r;
    r.text = to_dot(msc);
    r.data["dot"] = r.text;
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"msckit: message sequence chart analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));

    std::string file, model = "p2p", lin, formula, closure = "native", network, predicate = "weakly-sync";
    int k = 1, max_k = 4, max_events = 6;
    std::size_t stw_events = kStwDefaultMaxEvents;
    bool universal = false, transcript = false;
    std::optional<int> dk;

    auto input = [&](CLI::App* s, const char* what) { s->add_option("file", file, what)->required(); };

    auto* v = app.add_subcommand("validate", "check the MSC conditions");
    input(v, "MSC file (.msc text or JSON)");
    auto* c = app.add_subcommand("classify", "membership in all seven models");
    input(c, "MSC file");
    auto* l = app.add_subcommand("linearize", "a linearization valid in a model");
    input(l, "MSC file");
    l->add_option("--model", model, "asy, p2p, co, mb, 1n, nn, rsc")->required();
    auto* cl = app.add_subcommand("check-lin", "check that a linearization runs in a model");
    input(cl, "MSC file");
    cl->add_option("--model", model, "model")->required();
    cl->add_option("--lin", lin, "space separated event names, e.g. \"!1 !2 ?1 ?2\"")->required();
    auto* b = app.add_subcommand("bounded", "existential (or universal) k-boundedness");
    input(b, "MSC file");
    b->add_option("--model", model, "asy, p2p, co, mb, 1n, nn")->required();
    b->add_option("--k", k, "channel bound")->required();
    b->add_flag("--universal", universal, "every model linearization must be k-bounded");
    auto* d = app.add_subcommand("decompose", "split into exchanges (weak synchronizability)");
    input(d, "MSC file");
    d->add_option("--k", dk, "at most k sends per exchange");
    auto* s = app.add_subcommand("stw", "special treewidth by the decomposition game");
    input(s, "MSC file");
    s->add_option("--max", max_k, "largest width tried")->capture_default_str();
    s->add_option("--max-events", stw_events, "refuse larger MSCs")->capture_default_str();
    s->add_flag("--transcript", transcript, "print the winning strategy");
    auto* mo = app.add_subcommand("mso", "evaluate a closed MSO sentence");
    input(mo, "MSC file");
    mo->add_option("--formula", formula, "sentence, e.g. \"phi_mb & ~(E x. recv(x))\"")->required();
    mo->add_option("--closure", closure, "native or subsets")
        ->check(CLI::IsMember({"native", "subsets"}))
        ->capture_default_str();
    auto* e = app.add_subcommand("exec", "networks an execution runs on");
    input(e, "execution file: one action per line, \"! p q m\" or \"? p q m\"");
    e->add_option("--network", network, "replay on p2p, mb, 1n or nn and print the MSC");
    auto* cf = app.add_subcommand("cfsm", "communicating finite-state machines");
    cf->require_subcommand(1);
    auto* ce = cf->add_subcommand("explore", "behaviors up to a size");
    input(ce, "system file");
    ce->add_option("--model", model, "communication model")->capture_default_str();
    ce->add_option("--max", max_events, "largest number of events")->capture_default_str();
    auto* cs = cf->add_subcommand("synch", "search a behavior outside a class");
    input(cs, "system file");
    cs->add_option("--model", model, "communication model")->capture_default_str();
    cs->add_option("--predicate", predicate, "weakly-sync, weakly-k-sync, exists-bounded, forall-bounded")
        ->capture_default_str();
    cs->add_option("--k", k, "bound for the k predicates")->capture_default_str();
    cs->add_option("--max", max_events, "largest number of events")->capture_default_str();
    auto* dt = app.add_subcommand("dot", "Graphviz rendering");
    input(dt, "MSC file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int rc = app.exit(err);
        return rc == 0 ? 0 : kUsage;
    }

    Report r;
    try {
        if (*v) r = cmd_validate(file);
        else if (*c) r = cmd_classify(file);
        else if (*l) r = cmd_linearize(file, model);
        else if (*cl) r = cmd_check_lin(file, model, lin);
        else if (*b) r = cmd_bounded(file, model, k, universal);
        else if (*d) r = cmd_decompose(file, dk);
        else if (*s) r = cmd_stw(file, max_k, transcript, stw_events);
        else if (*mo) r = cmd_mso(file, formula, closure);
        else if (*e) r = cmd_exec(file, network);
        else if (*ce) r = cmd_cfsm_explore(file, model, max_events);
        else if (*cs) r = cmd_cfsm_synch(file, model, predicate, k, max_events);
        else if (*dt) r = cmd_dot(file);
    } catch (const std::exception& ex) {
        if (format == "json") {
            std::cout << json{{"error", ex.what()}}.dump(2) << "\n";
        } else {
            std::cerr << "error: " << ex.what() << "\n";
        }
        return kUsage;
    }
    if (format == "json") {
        json out{{"command", app.get_subcommands().front()->get_name()}, {"file", file}, {"exit", r.code}};
        out.update(r.data);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << r.text;
    }
    return r.code;
}
