#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msckit/classify.hpp"
#include "msckit/msc.hpp"

namespace msckit {

// Occupancy of channel (p,q) at a send: sends on (p,q) up to and including it
// minus receives of (p,q)-messages before it. With global = true all channels
// are pooled into one count.
bool is_k_bounded_linearization(const Msc& msc, const Linearization& lin, int k, bool global = false);

// largest occupancy seen at a send of lin
int max_occupancy(const Msc& msc, const Linearization& lin, bool global = false);

struct BoundedVerdict {
    enum class Status { holds, fails, not_in_model };
    Status status = Status::fails;
    // exists: a k-bounded model linearization when holding.
    // forall: a model linearization that is not k-bounded when failing.
    std::optional<Linearization> linearization;
    // relation cycle (exists, failing) or missing pair (forall, failing)
    std::vector<EventId> witness;
    std::string reason;

    bool holds() const { return status == Status::holds; }
};

// model in {asy, p2p, co, mb, onen, nn}; rsc is rejected with std::invalid_argument.
// asy: hb u relb_asy acyclic; p2p/co/mb/onen: model order u relb acyclic (exists)
// or relb inside the model order (forall); all of them also need at most k
// unmatched sends per channel. nn is decided by search_nn_linearization.
BoundedVerdict exists_k_bounded(const Msc& msc, int k, ModelId model);
BoundedVerdict forall_k_bounded(const Msc& msc, int k, ModelId model);

// smallest k <= cap with exists_k_bounded, if any
std::optional<int> minimal_exists_bound(const Msc& msc, ModelId model, int cap);

// Exhaustive search over nn-linearizations, tracking the single FIFO queue.
// want_bounded = true looks for a k-bounded one, false for one that is not.
std::optional<Linearization> search_nn_linearization(const Msc& msc, int k, bool want_bounded);

struct ExchangeDecomposition {
    bool ok = false;
    // factors in concatenation order, event ids ascending inside each
    std::vector<std::vector<EventId>> factors;
    // on failure: a receive and a send that no cut can separate in the right order
    std::optional<std::pair<EventId, EventId>> witness;
    std::string reason;
};

bool is_exchange(const Msc& msc);

// Without k: earliest-factor assignment, which succeeds whenever any
// factorization exists. With k: backtracking search for factors of at most k sends.
ExchangeDecomposition decompose_exchanges(const Msc& msc, std::optional<int> k = std::nullopt);

std::vector<Msc> factor_mscs(const Msc& msc, const ExchangeDecomposition& d);

bool is_weakly_synchronous(const Msc& msc);
bool is_weakly_k_synchronous(const Msc& msc, int k);

}  // namespace msckit
