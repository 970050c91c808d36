#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msckit/relation.hpp"

namespace msckit {

using EventId = int;
using ProcId = int;

enum class ActionKind { send, receive };

struct Action {
    ActionKind kind = ActionKind::send;
    ProcId sender = 0;
    ProcId receiver = 0;
    std::string payload;

    bool is_send() const { return kind == ActionKind::send; }
    bool is_receive() const { return kind == ActionKind::receive; }
    // process executing the action
    ProcId owner() const { return is_send() ? sender : receiver; }

    friend bool operator==(const Action&, const Action&) = default;
};

struct Event {
    EventId id = 0;
    Action label;
    // display name of the message this event belongs to
    std::string message;
};

using Linearization = std::vector<EventId>;

class Msc {
public:
    Msc() = default;
    // Throws std::invalid_argument on self-sends, out-of-range process or event
    // references. Anything else (bad placement, cycles, ...) is left to validate().
    Msc(std::vector<std::string> processes, std::vector<Event> events,
        std::vector<std::vector<EventId>> order,
        std::vector<std::pair<EventId, EventId>> matching);

    const std::vector<std::string>& processes() const { return procs_; }
    std::size_t process_count() const { return procs_.size(); }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    const Event& event(EventId e) const { return events_.at(e); }
    const Action& label(EventId e) const { return events_.at(e).label; }
    const std::vector<Event>& events() const { return events_; }
    const std::vector<EventId>& line(ProcId p) const { return order_.at(p); }
    const std::vector<std::vector<EventId>>& order() const { return order_; }
    const std::vector<std::pair<EventId, EventId>>& matching() const { return matching_; }

    bool is_send(EventId e) const { return label(e).is_send(); }
    bool is_receive(EventId e) const { return label(e).is_receive(); }
    // partner under the matching, -1 when none (first pair wins on malformed input)
    EventId partner(EventId e) const { return partner_.at(e); }
    bool matched(EventId e) const { return partner_.at(e) >= 0; }
    // process whose line contains e, -1 if none
    ProcId process_of(EventId e) const { return where_.at(e).first; }
    int position(EventId e) const { return where_.at(e).second; }
    // e -> f immediate process successor, or e ->+ f
    bool proc_before(EventId e, EventId f) const;
    EventId proc_next(EventId e) const;

    std::vector<EventId> sends() const;
    std::vector<EventId> receives() const;
    std::vector<EventId> unmatched_sends() const;
    std::size_t message_count() const;

    std::optional<ProcId> find_process(const std::string& name) const;
    // "!m1" / "?m1"
    std::string event_name(EventId e) const;
    std::string format(const Linearization& lin) const;
    std::string describe(const Action& a) const;

    // restriction to a set of events; sends whose receive is dropped become unmatched
    Msc restrict_to(const std::vector<bool>& keep) const;

private:
    std::vector<std::string> procs_;
    std::vector<Event> events_;
    std::vector<std::vector<EventId>> order_;
    std::vector<std::pair<EventId, EventId>> matching_;
    std::vector<EventId> partner_;
    std::vector<std::pair<ProcId, int>> where_;
};

struct Violation {
    // "1", "2a", "2b", "2c", "3"
    std::string condition;
    std::vector<EventId> events;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Msc& msc);

// immediate successor edges of -> and <|
RelationGraph process_relation(const Msc& msc);
RelationGraph message_relation(const Msc& msc);
// (-> u <|)*
RelationGraph happens_before(const Msc& msc);
// (-> u <|)+
RelationGraph happens_before_strict(const Msc& msc);

struct LinearizationSet {
    std::vector<Linearization> items;
    bool truncated = false;
};

// Linear extensions of <= in lexicographic order of event ids.
LinearizationSet enumerate_linearizations(const Msc& msc, std::size_t limit);
// Visits linear extensions until the callback returns false. Returns false if stopped.
template <class F>
bool for_each_linearization(const Msc& msc, F&& fn);
bool is_linearization(const Msc& msc, const Linearization& lin);

Msc concatenate(const Msc& m1, const Msc& m2);

enum class PrefixClosure { hb, onen, nn };

struct PrefixResult {
    std::optional<Msc> prefix;
    // (e, f): e is a required predecessor of kept f but is not kept
    std::optional<std::pair<EventId, EventId>> violation;
};

PrefixResult prefix(const Msc& msc, const std::vector<bool>& keep, PrefixClosure closure);
PrefixResult prefix(const Msc& msc, const std::set<EventId>& keep, PrefixClosure closure);

// normal form keyed by (process name, position); equal iff isomorphic
std::string canonical_form(const Msc& msc);
bool isomorphic(const Msc& a, const Msc& b);

std::string to_dot(const Msc& msc);

}  // namespace msckit

#include "msckit/detail/linearize_impl.hpp"
