#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msckit/msc.hpp"

namespace msckit {

enum class ModelId { asy, p2p, co, mb, onen, nn, rsc };

inline constexpr std::array<ModelId, 7> kAllModels = {ModelId::asy, ModelId::p2p, ModelId::co, ModelId::mb,
                                                      ModelId::onen, ModelId::nn,  ModelId::rsc};

std::string to_string(ModelId m);
std::optional<ModelId> parse_model(const std::string& s);

struct Verdict {
    bool holds = false;
    // violating pair or relation cycle (negative), empty otherwise
    std::vector<EventId> witness;
    std::string reason;
    std::optional<Linearization> linearization;
};

struct Crown {
    std::vector<std::pair<EventId, EventId>> pairs;
};

Verdict is_p2p(const Msc& msc);
Verdict is_co(const Msc& msc);
Verdict is_mb(const Msc& msc);
Verdict is_onen(const Msc& msc);
Verdict is_nn(const Msc& msc);
std::optional<Crown> find_crown(const Msc& msc);
Verdict is_rsc(const Msc& msc);
Verdict is_member(const Msc& msc, ModelId m);

struct NnLinearization {
    bool ok = false;
    Linearization order;  // partial when !ok
    std::string error;
};

NnLinearization nn_linearize(const Msc& msc);

struct NotAMember : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws NotAMember when msc is not in the model.
Linearization linearize(const Msc& msc, ModelId m);

bool check_linearization(const Msc& msc, const Linearization& lin, ModelId m);

struct SizeLimitExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t default_oracle_limit();
// Enumerates linearizations; throws SizeLimitExceeded above the event bound.
bool oracle_membership(const Msc& msc, ModelId m, std::size_t max_events = default_oracle_limit());

struct ClassReport {
    std::array<Verdict, 7> verdicts;
    const Verdict& at(ModelId m) const { return verdicts[static_cast<int>(m)]; }
    bool member(ModelId m) const { return at(m).holds; }
};

struct HierarchyViolation : std::logic_error {
    using std::logic_error::logic_error;
};

ClassReport classify(const Msc& msc);

}  // namespace msckit
