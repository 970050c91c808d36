#pragma once

#include <stdexcept>
#include <string>

#include "msckit/msc.hpp"
#include "msckit/relation.hpp"

namespace msckit {

enum class RelKind { mbrel, onenrel, nnrel, nnbowtie, relb, relb_asy };

std::string to_string(RelKind k);

struct ModelRelation {
    RelationGraph base;
    RelKind kind = RelKind::mbrel;
};

struct NotP2p : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// s [= s': both sends address the same process and either s matched and s'
// unmatched, or both matched with receives r ->+ r'
ModelRelation mb_rel(const Msc& msc);
// (-> u <| u [=)+
RelationGraph mb_partial(const Msc& msc);

// same-sender matched-before-unmatched sends; receives of messages from one
// sender whose sends are ->+ ordered
ModelRelation onen_rel(const Msc& msc);
// (-> u <| u 1n)+ ; the reflexive view adds the diagonal
RelationGraph onen_partial(const Msc& msc);
RelationGraph onen_partial_reflexive(const Msc& msc);

// (-> u <| u [= u 1n)+
ModelRelation nn_rel(const Msc& msc);
// nn_rel plus the receive-receive, send-send and matched-to-unmatched edges,
// each added only when the pair is not already in nn_rel; not re-closed
ModelRelation nn_bowtie(const Msc& msc);

// i-th receive on (p,q) before the (i+k)-th send on (p,q); throws NotP2p
ModelRelation relb(const Msc& msc, int k);
// k+1 ->+-chained sends on a channel, at least one matched: earliest receive
// among them before the last send
ModelRelation relb_asy(const Msc& msc, int k);

// immediate -> and <| edges plus the given relation
RelationGraph with_causal_edges(const Msc& msc, const RelationGraph& extra);

}  // namespace msckit
