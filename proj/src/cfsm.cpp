#include "msckit/cfsm.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "msckit/bounded.hpp"
#include "msckit/io.hpp"

namespace msckit {

const CfsmMachine* CfsmSystem::machine(const std::string& process) const {
    for (const auto& m : machines)
        if (m.process == process) return &m;
    return nullptr;
}

std::vector<std::string> CfsmSystem::processes() const {
    std::vector<std::string> out;
    for (const auto& m : machines) out.push_back(m.process);
    return out;
}

namespace {

struct Statement {
    std::vector<std::string> tokens;
    int line;
};

std::vector<Statement> statements(const std::string& text) {
    std::vector<Statement> out;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string part;
        std::istringstream ls(raw);
        while (std::getline(ls, part, ';')) {
            std::istringstream ts(part);
            Statement st{{}, lineno};
            for (std::string t; ts >> t;) st.tokens.push_back(t);
            if (!st.tokens.empty()) out.push_back(std::move(st));
        }
    }
    return out;
}

}  // namespace

CfsmSystem parse_cfsm(const std::string& text) {
    CfsmSystem sys;
    CfsmMachine* cur = nullptr;
    std::vector<std::pair<std::string, int>> peers;  // checked once all machines are known
    for (auto st : statements(text)) {
        auto& t = st.tokens;
        if (t[0] == "machine") {
            if (t.size() < 2) throw ParseError("expected: machine NAME:", st.line);
            std::string name = t[1];
            std::size_t rest = 2;
            if (!name.empty() && name.back() == ':') {
                name.pop_back();
            } else if (rest < t.size() && t[rest] == ":") {
                ++rest;
            }
            if (name.empty()) throw ParseError("missing machine name", st.line);
            if (sys.machine(name)) throw ParseError("machine " + name + " declared twice", st.line);
            sys.machines.push_back({name, {}, "", {}});
            cur = &sys.machines.back();
            t.erase(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(rest));
            if (t.empty()) continue;
        }
        if (!cur) throw ParseError("'" + t[0] + "' outside a machine block", st.line);
        if (t[0] == "state") {
            if (t.size() < 2 || t.size() > 3 || (t.size() == 3 && t[2] != "init"))
                throw ParseError("expected: state NAME [init]", st.line);
            if (std::count(cur->states.begin(), cur->states.end(), t[1]))
                throw ParseError("state " + t[1] + " declared twice in machine " + cur->process, st.line);
            cur->states.push_back(t[1]);
            if (t.size() == 3) {
                if (!cur->initial.empty())
                    throw ParseError("machine " + cur->process + " has two initial states", st.line);
                cur->initial = t[1];
            }
        } else if (t[0] == "trans") {
            // trans A -> B on !q m   (also "! q m")
            std::vector<std::string> act(t.begin() + std::min<std::size_t>(5, t.size()), t.end());
            if (t.size() < 6 || t[2] != "->" || t[4] != "on")
                throw ParseError("expected: trans FROM -> TO on !PEER MSG | ?PEER MSG", st.line);
            if (act.size() == 3 && (act[0] == "!" || act[0] == "?")) act = {act[0] + act[1], act[2]};
            if (act.size() != 2 || act[0].size() < 2 || (act[0][0] != '!' && act[0][0] != '?'))
                throw ParseError("expected an action !PEER MSG or ?PEER MSG", st.line);
            CfsmTransition tr;
            tr.from = t[1];
            tr.to = t[3];
            tr.kind = act[0][0] == '!' ? ActionKind::send : ActionKind::receive;
            tr.peer = act[0].substr(1);
            tr.payload = act[1];
            for (const auto& s : {tr.from, tr.to})
                if (!std::count(cur->states.begin(), cur->states.end(), s))
                    throw ParseError("undeclared state " + s + " in machine " + cur->process, st.line);
            if (tr.peer == cur->process)
                throw ParseError("machine " + cur->process + " cannot talk to itself", st.line);
            peers.emplace_back(tr.peer, st.line);
            cur->transitions.push_back(tr);
        } else {
            throw ParseError("unknown statement '" + t[0] + "'", st.line);
        }
    }
    for (const auto& m : sys.machines)
        if (m.initial.empty()) throw ParseError("machine " + m.process + " has no initial state", 0);
    for (const auto& [peer, line] : peers)
        if (!sys.machine(peer)) throw ParseError("unknown process " + peer, line);
    return sys;
}

std::string write_cfsm(const CfsmSystem& sys) {
    std::ostringstream os;
    for (const auto& m : sys.machines) {
        os << "machine " << m.process << ":\n";
        for (const auto& s : m.states) os << "  state " << s << (s == m.initial ? " init" : "") << "\n";
        for (const auto& t : m.transitions)
            os << "  trans " << t.from << " -> " << t.to << " on " << (t.kind == ActionKind::send ? "!" : "?")
               << t.peer << " " << t.payload << "\n";
    }
    return os.str();
}

namespace {

bool label_matches(const Msc& msc, const CfsmTransition& t, const Action& a) {
    if (t.kind != a.kind || t.payload != a.payload) return false;
    ProcId peer = a.is_send() ? a.receiver : a.sender;
    return msc.processes()[peer] == t.peer;
}

}  // namespace

std::optional<Run> find_run(const CfsmSystem& sys, const Msc& msc) {
    Run run(msc.size());
    for (ProcId p = 0; p < static_cast<ProcId>(msc.process_count()); ++p) {
        const auto& ln = msc.line(p);
        if (ln.empty()) continue;
        const CfsmMachine* m = sys.machine(msc.processes()[p]);
        if (!m) return std::nullopt;
        const int mi = static_cast<int>(m - sys.machines.data());
        // layered reachability over (position, state) with one parent transition per node
        std::vector<std::map<std::string, int>> parent(ln.size() + 1);
        parent[0][m->initial] = -1;
        for (std::size_t i = 0; i < ln.size(); ++i) {
            const Action& a = msc.label(ln[i]);
            for (const auto& [state, _] : parent[i])
                for (int ti = 0; ti < static_cast<int>(m->transitions.size()); ++ti) {
                    const auto& t = m->transitions[ti];
                    if (t.from == state && label_matches(msc, t, a)) parent[i + 1].emplace(t.to, ti);
                }
            if (parent[i + 1].empty()) return std::nullopt;
        }
        std::string state = parent[ln.size()].begin()->first;
        for (std::size_t i = ln.size(); i-- > 0;) {
            int ti = parent[i + 1].at(state);
            run[ln[i]] = {mi, ti};
            state = m->transitions[ti].from;
        }
    }
    return run;
}

namespace {

struct Partial {
    std::vector<Event> events;
    std::vector<std::vector<EventId>> order;
    std::vector<std::pair<EventId, EventId>> matching;
    std::vector<bool> received;  // per event, sends only
    std::vector<int> states;     // per machine, index into states
    std::set<std::string> message_ids;

    Msc msc(const std::vector<std::string>& procs) const { return Msc(procs, events, order, matching); }
};

std::string fresh_message(Partial& p, const std::string& payload) {
    std::string id = payload;
    for (int n = 2; p.message_ids.count(id); ++n) id = payload + "_" + std::to_string(n);
    p.message_ids.insert(id);
    return id;
}

bool keep_growing(const Msc& msc, ModelId model) {
    switch (model) {
        case ModelId::asy: return true;
        case ModelId::rsc: return is_member(msc, ModelId::nn).holds;  // rsc members are reached through nn ones
        default: return is_member(msc, model).holds;
    }
}

}  // namespace

std::vector<Msc> explore(const CfsmSystem& sys, ModelId model, int max_events) {
    const auto procs = sys.processes();
    const int nm = static_cast<int>(sys.machines.size());
    std::vector<std::map<std::string, int>> state_index(nm);
    for (int i = 0; i < nm; ++i)
        for (std::size_t s = 0; s < sys.machines[i].states.size(); ++s)
            state_index[i][sys.machines[i].states[s]] = static_cast<int>(s);
    std::map<std::string, int> proc_index;
    for (int i = 0; i < nm; ++i) proc_index[procs[i]] = i;

    Partial root;
    root.order.resize(nm);
    for (int i = 0; i < nm; ++i) root.states.push_back(state_index[i].at(sys.machines[i].initial));

    auto state_key = [](const Partial& p, const Msc& m) {
        std::string k = canonical_form(m) + "#";
        for (int s : p.states) k += std::to_string(s) + ",";
        return k;
    };

    std::map<std::string, Msc> found;  // canonical form -> representative
    auto record = [&](const Msc& m) {
        if (model == ModelId::rsc && !is_member(m, ModelId::rsc).holds) return;
        found.emplace(canonical_form(m), m);
    };

    std::map<std::string, Partial> level;
    {
        Msc m = root.msc(procs);
        record(m);
        level.emplace(state_key(root, m), root);
    }
    for (int size = 1; size <= max_events && !level.empty(); ++size) {
        std::map<std::string, Partial> next;
        for (const auto& [_, cur] : level) {
            for (int pi = 0; pi < nm; ++pi) {
                const auto& mach = sys.machines[pi];
                for (const auto& t : mach.transitions) {
                    if (state_index[pi].at(t.from) != cur.states[pi]) continue;
                    const int peer = proc_index.at(t.peer);
                    auto grow = [&](Partial q) {
                        q.states[pi] = state_index[pi].at(t.to);
                        Msc m = q.msc(procs);
                        if (!keep_growing(m, model)) return;
                        auto key = state_key(q, m);
                        if (next.count(key)) return;
                        record(m);
                        next.emplace(std::move(key), std::move(q));
                    };
                    const EventId id = static_cast<EventId>(cur.events.size());
                    if (t.kind == ActionKind::send) {
                        Partial q = cur;
                        q.events.push_back({id, Action{ActionKind::send, pi, peer, t.payload}, fresh_message(q, t.payload)});
                        q.order[pi].push_back(id);
                        q.received.push_back(false);
                        grow(std::move(q));
                        continue;
                    }
                    for (EventId s = 0; s < id; ++s) {
                        const Event& se = cur.events[s];
                        if (!se.label.is_send() || cur.received[s] || se.label.sender != peer ||
                            se.label.receiver != pi || se.label.payload != t.payload)
                            continue;
                        Partial q = cur;
                        q.events.push_back({id, Action{ActionKind::receive, peer, pi, t.payload}, se.message});
                        q.order[pi].push_back(id);
                        q.matching.emplace_back(s, id);
                        q.received[s] = true;
                        q.received.push_back(false);
                        grow(std::move(q));
                    }
                }
            }
        }
        level = std::move(next);
    }

    std::vector<Msc> out;
    for (auto& [_, m] : found) out.push_back(std::move(m));
    std::stable_sort(out.begin(), out.end(), [](const Msc& a, const Msc& b) { return a.size() < b.size(); });
    return out;
}

std::string to_string(SyncPredicate p) {
    switch (p) {
        case SyncPredicate::weakly_synchronous: return "weakly-sync";
        case SyncPredicate::weakly_k_synchronous: return "weakly-k-sync";
        case SyncPredicate::exists_bounded: return "exists-bounded";
        case SyncPredicate::forall_bounded: return "forall-bounded";
    }
    return "?";
}

std::optional<SyncPredicate> parse_sync_predicate(const std::string& s) {
    for (auto p : {SyncPredicate::weakly_synchronous, SyncPredicate::weakly_k_synchronous,
                   SyncPredicate::exists_bounded, SyncPredicate::forall_bounded})
        if (to_string(p) == s) return p;
    return std::nullopt;
}

SyncResult bounded_synchronizability(const CfsmSystem& sys, ModelId model, const SyncQuery& query, int max_events) {
    if (query.k < 0) throw std::invalid_argument("k must be non-negative");
    if (model == ModelId::rsc &&
        (query.predicate == SyncPredicate::exists_bounded || query.predicate == SyncPredicate::forall_bounded))
        throw std::invalid_argument("boundedness is not defined for rsc");
    auto in_class = [&](const Msc& m) {
        switch (query.predicate) {
            case SyncPredicate::weakly_synchronous: return is_weakly_synchronous(m);
            case SyncPredicate::weakly_k_synchronous: return is_weakly_k_synchronous(m, query.k);
            case SyncPredicate::exists_bounded: return exists_k_bounded(m, query.k, model).holds();
            case SyncPredicate::forall_bounded: return forall_k_bounded(m, query.k, model).holds();
        }
        return true;
    };
    SyncResult res;
    res.max_events = max_events;
    auto behaviors = explore(sys, model, max_events);
    res.explored = behaviors.size();
    for (auto& m : behaviors) {
        if (in_class(m)) continue;
        res.violation = true;
        res.verdict = "violation at " + std::to_string(m.size()) + " events";
        res.counterexample = std::move(m);
        return res;
    }
    res.verdict = "no violation up to " + std::to_string(max_events) + " events";
    return res;
}

}  // namespace msckit
