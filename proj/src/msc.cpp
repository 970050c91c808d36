#include "msckit/msc.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "msckit/relations.hpp"

namespace msckit {

Msc::Msc(std::vector<std::string> processes, std::vector<Event> events,
         std::vector<std::vector<EventId>> order,
         std::vector<std::pair<EventId, EventId>> matching)
    : procs_(std::move(processes)),
      events_(std::move(events)),
      order_(std::move(order)),
      matching_(std::move(matching)) {
    const int np = static_cast<int>(procs_.size());
    const int n = static_cast<int>(events_.size());
    order_.resize(procs_.size());
    for (int i = 0; i < n; ++i) {
        Event& ev = events_[i];
        ev.id = i;
        const Action& a = ev.label;
        if (a.sender < 0 || a.sender >= np || a.receiver < 0 || a.receiver >= np)
            throw std::invalid_argument("event " + std::to_string(i) + " names an unknown process");
        if (a.sender == a.receiver)
            throw std::invalid_argument("self-send on process " + procs_[a.sender] + " is not allowed");
        if (ev.message.empty()) ev.message = a.payload;
    }
    where_.assign(n, {-1, -1});
    for (int p = 0; p < np; ++p) {
        for (int pos = 0; pos < static_cast<int>(order_[p].size()); ++pos) {
            EventId e = order_[p][pos];
            if (e < 0 || e >= n) throw std::invalid_argument("process order names an unknown event");
            if (where_[e].first < 0) where_[e] = {p, pos};
        }
    }
    partner_.assign(n, -1);
    for (auto [s, r] : matching_) {
        if (s < 0 || s >= n || r < 0 || r >= n) throw std::invalid_argument("matching names an unknown event");
        if (partner_[s] < 0 && partner_[r] < 0 && s != r) {
            partner_[s] = r;
            partner_[r] = s;
        }
    }
}

bool Msc::proc_before(EventId e, EventId f) const {
    auto [pe, ie] = where_.at(e);
    auto [pf, jf] = where_.at(f);
    return pe >= 0 && pe == pf && ie < jf;
}

EventId Msc::proc_next(EventId e) const {
    auto [p, i] = where_.at(e);
    if (p < 0) return -1;
    if (i + 1 < static_cast<int>(order_[p].size())) return order_[p][i + 1];
    return -1;
}

std::vector<EventId> Msc::sends() const {
    std::vector<EventId> out;
    for (const auto& ev : events_)
        if (ev.label.is_send()) out.push_back(ev.id);
    return out;
}

std::vector<EventId> Msc::receives() const {
    std::vector<EventId> out;
    for (const auto& ev : events_)
        if (ev.label.is_receive()) out.push_back(ev.id);
    return out;
}

std::vector<EventId> Msc::unmatched_sends() const {
    std::vector<EventId> out;
    for (const auto& ev : events_)
        if (ev.label.is_send() && partner_[ev.id] < 0) out.push_back(ev.id);
    return out;
}

std::size_t Msc::message_count() const { return sends().size(); }

std::optional<ProcId> Msc::find_process(const std::string& name) const {
    for (std::size_t i = 0; i < procs_.size(); ++i)
        if (procs_[i] == name) return static_cast<ProcId>(i);
    return std::nullopt;
}

std::string Msc::event_name(EventId e) const {
    const Event& ev = events_.at(e);
    return (ev.label.is_send() ? "!" : "?") + ev.message;
}

std::string Msc::format(const Linearization& lin) const {
    std::string out;
    for (std::size_t i = 0; i < lin.size(); ++i) {
        if (i) out += ' ';
        out += event_name(lin[i]);
    }
    return out;
}

std::string Msc::describe(const Action& a) const {
    return std::string(a.is_send() ? "!" : "?") + "(" + procs_.at(a.sender) + "," + procs_.at(a.receiver) +
           "," + a.payload + ")";
}

Msc Msc::restrict_to(const std::vector<bool>& keep) const {
    const int n = static_cast<int>(events_.size());
    std::vector<EventId> remap(n, -1);
    std::vector<Event> evs;
    for (int e = 0; e < n; ++e) {
        if (!keep.at(e)) continue;
        remap[e] = static_cast<EventId>(evs.size());
        evs.push_back(events_[e]);
    }
    std::vector<std::vector<EventId>> ord(procs_.size());
    for (std::size_t p = 0; p < procs_.size(); ++p)
        for (EventId e : order_[p])
            if (keep[e]) ord[p].push_back(remap[e]);
    std::vector<std::pair<EventId, EventId>> m;
    for (auto [s, r] : matching_)
        if (keep[s] && keep[r]) m.emplace_back(remap[s], remap[r]);
    return Msc(procs_, std::move(evs), std::move(ord), std::move(m));
}

ValidationReport validate(const Msc& msc) {
    ValidationReport rep;
    const int n = static_cast<int>(msc.size());
    auto add = [&](std::string cond, std::vector<EventId> evs, std::string detail) {
        rep.violations.push_back({std::move(cond), std::move(evs), std::move(detail)});
    };

    // (1) each event on exactly one line, the line of the process executing it
    std::vector<int> seen(n, 0);
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        for (EventId e : msc.line(static_cast<ProcId>(p))) {
            ++seen[e];
            if (msc.label(e).owner() != static_cast<ProcId>(p))
                add("1", {e}, msc.event_name(e) + " placed on process " + msc.processes()[p] +
                                  " but executed by " + msc.processes()[msc.label(e).owner()]);
        }
    }
    for (EventId e = 0; e < n; ++e) {
        if (seen[e] == 0) add("1", {e}, msc.event_name(e) + " is on no process line");
        if (seen[e] > 1) add("1", {e}, msc.event_name(e) + " appears " + std::to_string(seen[e]) + " times");
    }

    // (2a) matched pairs agree on sender, receiver, payload
    std::vector<int> as_send(n, 0), as_recv(n, 0);
    for (auto [s, r] : msc.matching()) {
        const Action& a = msc.label(s);
        const Action& b = msc.label(r);
        if (!a.is_send() || !b.is_receive()) {
            add("2a", {s, r}, "matching pair is not a send followed by a receive");
        } else if (a.sender != b.sender || a.receiver != b.receiver || a.payload != b.payload) {
            add("2a", {s, r}, msc.describe(a) + " matched with " + msc.describe(b));
        }
        ++as_send[s];
        ++as_recv[r];
    }
    // (2b) every receive matched exactly once
    for (EventId e = 0; e < n; ++e) {
        if (!msc.is_receive(e)) continue;
        if (as_recv[e] != 1)
            add("2b", {e}, msc.event_name(e) + " is matched " + std::to_string(as_recv[e]) + " times");
    }
    // (2c) every send matched at most once
    for (EventId e = 0; e < n; ++e) {
        if (msc.is_send(e) && as_send[e] > 1)
            add("2c", {e}, msc.event_name(e) + " is matched " + std::to_string(as_send[e]) + " times");
    }

    // (3) (-> u <|)* is a partial order, i.e. -> u <| is acyclic
    RelationGraph g(n);
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        const auto& ln = msc.line(static_cast<ProcId>(p));
        for (std::size_t i = 0; i + 1 < ln.size(); ++i) g.add(ln[i], ln[i + 1]);
    }
    for (auto [s, r] : msc.matching()) g.add(s, r);
    auto ac = is_acyclic(g);
    if (!ac.acyclic) add("3", ac.cycle, "causality cycle");
    return rep;
}

RelationGraph process_relation(const Msc& msc) {
    RelationGraph g(msc.size());
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        const auto& ln = msc.line(static_cast<ProcId>(p));
        for (std::size_t i = 0; i + 1 < ln.size(); ++i) g.add(ln[i], ln[i + 1]);
    }
    return g;
}

RelationGraph message_relation(const Msc& msc) {
    RelationGraph g(msc.size());
    for (EventId e = 0; e < static_cast<EventId>(msc.size()); ++e)
        if (msc.is_send(e) && msc.matched(e)) g.add(e, msc.partner(e));
    return g;
}

RelationGraph happens_before_strict(const Msc& msc) {
    RelationGraph g = process_relation(msc);
    g.unite(message_relation(msc));
    return transitive_closure(g, false);
}

RelationGraph happens_before(const Msc& msc) {
    RelationGraph g = process_relation(msc);
    g.unite(message_relation(msc));
    return transitive_closure(g, true);
}

LinearizationSet enumerate_linearizations(const Msc& msc, std::size_t limit) {
    LinearizationSet out;
    for_each_linearization(msc, [&](const Linearization& lin) {
        if (out.items.size() >= limit) {
            out.truncated = true;
            return false;
        }
        out.items.push_back(lin);
        return true;
    });
    return out;
}

bool is_linearization(const Msc& msc, const Linearization& lin) {
    const std::size_t n = msc.size();
    if (lin.size() != n) return false;
    std::vector<int> pos(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (lin[i] < 0 || static_cast<std::size_t>(lin[i]) >= n || pos[lin[i]] >= 0) return false;
        pos[lin[i]] = static_cast<int>(i);
    }
    for (EventId e = 0; e < static_cast<EventId>(n); ++e) {
        EventId nx = msc.proc_next(e);
        if (nx >= 0 && pos[nx] < pos[e]) return false;
        if (msc.is_send(e) && msc.matched(e) && pos[msc.partner(e)] < pos[e]) return false;
    }
    return true;
}

Msc concatenate(const Msc& m1, const Msc& m2) {
    std::vector<std::string> procs = m1.processes();
    std::vector<ProcId> map2(m2.process_count());
    for (std::size_t p = 0; p < m2.process_count(); ++p) {
        auto it = std::find(procs.begin(), procs.end(), m2.processes()[p]);
        if (it == procs.end()) {
            map2[p] = static_cast<ProcId>(procs.size());
            procs.push_back(m2.processes()[p]);
        } else {
            map2[p] = static_cast<ProcId>(it - procs.begin());
        }
    }
    for (EventId u : m1.unmatched_sends())
        for (EventId s : m2.sends()) {
            const Action& a = m1.label(u);
            const Action& b = m2.label(s);
            if (m2.matched(s) && m1.processes()[a.sender] == m2.processes()[b.sender] &&
                m1.processes()[a.receiver] == m2.processes()[b.receiver])
                throw std::invalid_argument("concatenation undefined: " + m1.event_name(u) +
                                            " is unmatched and " + m2.event_name(s) + " is matched on the same channel");
        }
    std::vector<Event> evs = m1.events();
    const EventId off = static_cast<EventId>(m1.size());
    for (const Event& ev : m2.events()) {
        Event c = ev;
        c.label.sender = map2[ev.label.sender];
        c.label.receiver = map2[ev.label.receiver];
        evs.push_back(c);
    }
    std::vector<std::vector<EventId>> ord(procs.size());
    for (std::size_t p = 0; p < m1.process_count(); ++p) ord[p] = m1.line(static_cast<ProcId>(p));
    for (std::size_t p = 0; p < m2.process_count(); ++p)
        for (EventId e : m2.line(static_cast<ProcId>(p))) ord[map2[p]].push_back(e + off);
    auto m = m1.matching();
    for (auto [s, r] : m2.matching()) m.emplace_back(s + off, r + off);
    return Msc(std::move(procs), std::move(evs), std::move(ord), std::move(m));
}

PrefixResult prefix(const Msc& msc, const std::vector<bool>& keep, PrefixClosure closure) {
    PrefixResult res;
    RelationGraph rel;
    switch (closure) {
        case PrefixClosure::hb: rel = happens_before_strict(msc); break;
        case PrefixClosure::onen: rel = onen_partial(msc); break;
        case PrefixClosure::nn: rel = nn_bowtie(msc).base; break;
    }
    for (auto [e, f] : rel.edges()) {
        if (keep.at(f) && !keep.at(e)) {
            res.violation = std::make_pair(e, f);
            return res;
        }
    }
    res.prefix = msc.restrict_to(keep);
    return res;
}

PrefixResult prefix(const Msc& msc, const std::set<EventId>& keep, PrefixClosure closure) {
    std::vector<bool> k(msc.size(), false);
    for (EventId e : keep) k.at(e) = true;
    return prefix(msc, k, closure);
}

std::string canonical_form(const Msc& msc) {
    // processes by name; empty lines are dropped so unused declarations do not matter
    std::vector<std::pair<std::string, ProcId>> named;
    for (std::size_t p = 0; p < msc.process_count(); ++p)
        if (!msc.line(static_cast<ProcId>(p)).empty())
            named.emplace_back(msc.processes()[p], static_cast<ProcId>(p));
    std::sort(named.begin(), named.end());
    std::ostringstream os;
    for (auto& [name, p] : named) {
        os << name << ':';
        for (EventId e : msc.line(p)) {
            const Action& a = msc.label(e);
            os << (a.is_send() ? '!' : '?') << msc.processes()[a.is_send() ? a.receiver : a.sender] << ','
               << a.payload;
            if (a.is_send()) {
                EventId r = msc.partner(e);
                if (r < 0)
                    os << "~";
                else
                    os << "@" << msc.processes()[msc.process_of(r)] << '.' << msc.position(r);
            }
            os << ';';
        }
        os << '|';
    }
    return os.str();
}

bool isomorphic(const Msc& a, const Msc& b) { return canonical_form(a) == canonical_form(b); }

std::string to_dot(const Msc& msc) {
    std::ostringstream os;
    os << "digraph msc {\n";
    if (!msc.empty()) os << "  rankdir=TB;\n  node [shape=plaintext];\n";
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        const auto& ln = msc.line(static_cast<ProcId>(p));
        if (ln.empty()) continue;
        os << "  subgraph cluster_" << p << " {\n    label=\"" << msc.processes()[p] << "\";\n";
        for (EventId e : ln) os << "    e" << e << " [label=\"" << msc.event_name(e) << "\"];\n";
        os << "  }\n";
    }
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        const auto& ln = msc.line(static_cast<ProcId>(p));
        for (std::size_t i = 0; i + 1 < ln.size(); ++i)
            os << "  e" << ln[i] << " -> e" << ln[i + 1] << " [style=solid, arrowhead=none];\n";
    }
    for (EventId e = 0; e < static_cast<EventId>(msc.size()); ++e) {
        if (!msc.is_send(e)) continue;
        if (msc.matched(e)) {
            os << "  e" << e << " -> e" << msc.partner(e) << " [style=solid, arrowhead=normal, constraint=false];\n";
        } else {
            os << "  lost" << e << " [shape=point, label=\"\"];\n";
            os << "  e" << e << " -> lost" << e << " [style=dashed, arrowhead=normal];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace msckit
