#include "msckit/exec.hpp"

#include <map>
#include <stdexcept>

namespace msckit {

std::string to_string(NetworkKind k) {
    switch (k) {
        case NetworkKind::p2p: return "p2p";
        case NetworkKind::mb: return "mb";
        case NetworkKind::onen: return "1n";
        case NetworkKind::nn: return "nn";
        case NetworkKind::custom: return "custom";
    }
    return "?";
}

std::optional<NetworkKind> parse_network_kind(const std::string& s) {
    if (s == "p2p" || s == "pp") return NetworkKind::p2p;
    if (s == "mb") return NetworkKind::mb;
    if (s == "1n" || s == "onen") return NetworkKind::onen;
    if (s == "nn") return NetworkKind::nn;
    return std::nullopt;
}

QueueNetwork network_for(NetworkKind kind, const std::vector<std::string>& processes) {
    if (processes.empty()) throw std::invalid_argument("network needs at least one process");
    const std::size_t n = processes.size();
    QueueNetwork net;
    net.kind = kind;
    net.process_count = n;
    net.assign.assign(n, std::vector<int>(n, -1));
    switch (kind) {
        case NetworkKind::p2p:
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q) {
                    if (p == q) continue;
                    net.assign[p][q] = static_cast<int>(net.queue_names.size());
                    net.queue_names.push_back("(" + processes[p] + "," + processes[q] + ")");
                }
            break;
        case NetworkKind::mb:
        case NetworkKind::onen:
            for (std::size_t p = 0; p < n; ++p) net.queue_names.push_back(processes[p]);
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q)
                    if (p != q) net.assign[p][q] = static_cast<int>(kind == NetworkKind::mb ? q : p);
            break;
        case NetworkKind::nn:
            net.queue_names.push_back("0");
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q)
                    if (p != q) net.assign[p][q] = 0;
            break;
        case NetworkKind::custom: throw std::invalid_argument("custom networks are built by hand");
    }
    return net;
}

bool NetworkConfig::empty() const {
    for (const auto& q : queues)
        if (!q.empty()) return false;
    return true;
}

NetworkConfig initial_config(const QueueNetwork& net) {
    NetworkConfig c;
    c.queues.resize(net.queue_names.size());
    return c;
}

std::optional<NetworkConfig> step(const QueueNetwork& net, const NetworkConfig& config, const Action& action,
                                  EventId origin) {
    int qid = net.queue_of(action.sender, action.receiver);
    if (qid < 0) return std::nullopt;
    NetworkConfig next = config;
    auto& q = next.queues.at(qid);
    QueueEntry entry{action.sender, action.receiver, action.payload, origin};
    if (action.is_send()) {
        q.push_back(entry);
        return next;
    }
    if (q.empty() || !(q.front() == entry)) return std::nullopt;
    q.erase(q.begin());
    return next;
}

RunResult run_execution(const QueueNetwork& net, const Execution& exec) {
    RunResult res;
    res.config = initial_config(net);
    for (std::size_t i = 0; i < exec.actions.size(); ++i) {
        auto next = step(net, res.config, exec.actions[i]);
        if (!next) {
            res.failed_at = i;
            return res;
        }
        res.config = std::move(*next);
    }
    res.ok = true;
    return res;
}

std::set<NetworkKind> classify_execution(const Execution& exec) {
    std::set<NetworkKind> out;
    std::vector<std::string> procs = exec.processes;
    if (procs.empty()) procs.push_back("_");
    for (NetworkKind k : {NetworkKind::p2p, NetworkKind::mb, NetworkKind::onen, NetworkKind::nn})
        if (run_execution(network_for(k, procs), exec).ok) out.insert(k);
    return out;
}

Execution linearization_to_execution(const Msc& msc, const Linearization& lin) {
    Execution ex;
    ex.processes = msc.processes();
    for (EventId e : lin) ex.actions.push_back(msc.label(e));
    return ex;
}

Msc execution_to_msc(const Execution& exec, NetworkKind kind) {
    std::vector<std::string> procs = exec.processes;
    if (procs.empty()) procs.push_back("_");
    QueueNetwork net = network_for(kind, procs);
    NetworkConfig cfg = initial_config(net);
    std::vector<Event> evs;
    std::vector<std::vector<EventId>> order(procs.size());
    std::vector<std::pair<EventId, EventId>> matching;
    for (std::size_t i = 0; i < exec.actions.size(); ++i) {
        const Action& a = exec.actions[i];
        EventId id = static_cast<EventId>(evs.size());
        EventId origin = -1;
        if (a.is_receive()) {
            int qid = net.queue_of(a.sender, a.receiver);
            if (qid >= 0 && !cfg.queues[qid].empty()) origin = cfg.queues[qid].front().origin;
        }
        auto next = step(net, cfg, a, id);
        if (!next) throw ExecutionRejected("action " + std::to_string(i) + " is not enabled on the " + to_string(kind) + " network");
        cfg = std::move(*next);
        evs.push_back(Event{id, a, a.payload});
        order[a.owner()].push_back(id);
        if (a.is_receive()) matching.emplace_back(origin, id);
    }
    // message display names: payload, disambiguated when payloads repeat
    std::map<std::string, int> uses;
    for (const auto& ev : evs)
        if (ev.label.is_send()) ++uses[ev.label.payload];
    std::map<std::string, int> seen;
    std::vector<std::string> name(evs.size());
    for (auto& ev : evs) {
        if (!ev.label.is_send()) continue;
        const std::string& p = ev.label.payload;
        name[ev.id] = uses[p] > 1 ? p + "." + std::to_string(++seen[p]) : p;
        ev.message = name[ev.id];
    }
    for (auto [s, r] : matching) evs[r].message = name[s];
    return Msc(std::move(procs), std::move(evs), std::move(order), std::move(matching));
}

std::string format_execution(const Execution& exec) {
    std::string out;
    for (const Action& a : exec.actions) {
        out += a.is_send() ? "! " : "? ";
        out += exec.processes.at(a.sender) + " " + exec.processes.at(a.receiver) + " " + a.payload + "\n";
    }
    return out;
}

}  // namespace msckit
