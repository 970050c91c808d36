#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msckit/msc.hpp"

namespace msckit {

enum class NetworkKind { p2p, mb, onen, nn, custom };

std::string to_string(NetworkKind k);
std::optional<NetworkKind> parse_network_kind(const std::string& s);

struct QueueNetwork {
    NetworkKind kind = NetworkKind::custom;
    std::size_t process_count = 0;
    std::vector<std::string> queue_names;
    // assign[p][q] = queue id, p != q
    std::vector<std::vector<int>> assign;

    int queue_of(ProcId p, ProcId q) const { return assign.at(p).at(q); }
};

// processes are 0..n-1; names only label the queues
QueueNetwork network_for(NetworkKind kind, const std::vector<std::string>& processes);

struct QueueEntry {
    ProcId sender;
    ProcId receiver;
    std::string payload;
    // send event that produced the entry when replaying a linearization, else -1
    EventId origin = -1;
    friend bool operator==(const QueueEntry& a, const QueueEntry& b) {
        return a.sender == b.sender && a.receiver == b.receiver && a.payload == b.payload;
    }
};

struct NetworkConfig {
    std::vector<std::vector<QueueEntry>> queues;
    bool empty() const;
};

NetworkConfig initial_config(const QueueNetwork& net);

struct Execution {
    std::vector<std::string> processes;
    std::vector<Action> actions;
};

// absent when the action is not enabled
std::optional<NetworkConfig> step(const QueueNetwork& net, const NetworkConfig& config, const Action& action,
                                  EventId origin = -1);

struct RunResult {
    bool ok = false;
    NetworkConfig config;      // final (ok) or last reached configuration
    std::size_t failed_at = 0; // index of the first non-step when !ok
};

RunResult run_execution(const QueueNetwork& net, const Execution& exec);

std::set<NetworkKind> classify_execution(const Execution& exec);

Execution linearization_to_execution(const Msc& msc, const Linearization& lin);

struct ExecutionRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Msc execution_to_msc(const Execution& exec, NetworkKind kind);

std::string format_execution(const Execution& exec);

}  // namespace msckit
