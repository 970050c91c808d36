#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msckit/classify.hpp"
#include "msckit/msc.hpp"

namespace msckit {

struct CfsmTransition {
    std::string from, to;
    ActionKind kind = ActionKind::send;
    // receiver of a send, sender of a receive
    std::string peer;
    std::string payload;
};

struct CfsmMachine {
    std::string process;
    std::vector<std::string> states;
    std::string initial;
    std::vector<CfsmTransition> transitions;
};

struct CfsmSystem {
    std::vector<CfsmMachine> machines;

    const CfsmMachine* machine(const std::string& process) const;
    std::vector<std::string> processes() const;
};

// Text format, statements separated by ';' or newlines, '#' comments:
//   machine p:
//   state l0 init
//   trans l0 -> l1 on !q m
//   trans l1 -> l0 on ?q ack
// A "machine" line opens the block the following statements belong to.
// Throws ParseError. Transitions must use declared states and another process as peer.
CfsmSystem parse_cfsm(const std::string& text);
std::string write_cfsm(const CfsmSystem& sys);

struct RunStep {
    int machine = -1;
    int transition = -1;
};

// transition executed at each event, indexed by event id
using Run = std::vector<RunStep>;

// empty when some process line is not a path from its initial state
std::optional<Run> find_run(const CfsmSystem& sys, const Msc& msc);

// Every MSC with at most max_events events that admits a run and belongs to the
// model, up to isomorphism, ordered by size then canonical form. Non-members are
// pruned while growing: each member is reached from the member obtained by
// dropping the last event of one of its model linearizations.
std::vector<Msc> explore(const CfsmSystem& sys, ModelId model, int max_events);

enum class SyncPredicate { weakly_synchronous, weakly_k_synchronous, exists_bounded, forall_bounded };

struct SyncQuery {
    SyncPredicate predicate = SyncPredicate::weakly_synchronous;
    int k = 1;
};

struct SyncResult {
    bool violation = false;
    std::optional<Msc> counterexample;
    int max_events = 0;
    std::size_t explored = 0;
    // "no violation up to N events" or "violation at N events"
    std::string verdict;
};

std::string to_string(SyncPredicate p);
std::optional<SyncPredicate> parse_sync_predicate(const std::string& s);

// Searches explore(sys, model, max_events) for a behavior outside the class,
// smallest first. A clean result only speaks for behaviors up to the bound.
SyncResult bounded_synchronizability(const CfsmSystem& sys, ModelId model, const SyncQuery& query, int max_events);

}  // namespace msckit
