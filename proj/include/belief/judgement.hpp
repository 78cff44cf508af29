#pragma once

// Soft deduplication of same-polarity claims. A new record is compared to its
// nearest active same-polarity neighbour; at or above the threshold only the
// stronger of the two stays active (ties keep the existing record).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "belief/embedding.hpp"
#include "belief/memory.hpp"
#include "belief/types.hpp"

namespace belief {

struct ResolutionOutcome {
    bool new_active = true;
    std::optional<RecordId> nearest;     // j*, if any candidate was compared
    double similarity = 0.0;
    std::optional<RecordId> archived_existing;  // existing record superseded by the new one
    std::vector<std::string> warnings;

    bool archived_new() const noexcept { return !new_active; }
};

using PoolFilter = std::function<bool(const ArgumentRecord&)>;

// `incoming` is the record about to be inserted; on return its active flag and
// archived_by are set. When the new record wins, the existing one is archived
// in `memory` and points at the id the new record will receive on insert.
inline ResolutionOutcome resolve_in_pool(ArgumentRecord& incoming, MemoryStore& memory, double threshold,
                                         const PoolFilter& in_pool) {
    ResolutionOutcome out;
    incoming.active = true;
    incoming.archived_by.reset();

    const bool new_zero = l2_norm(incoming.embedding) == 0.0;
    if (new_zero) out.warnings.push_back("zero-norm embedding for new claim; similarity treated as 0");

    double best = -2.0;
    std::optional<RecordId> best_id;
    for (const auto& r : memory.records()) {
        if (!r.active || r.polarity != incoming.polarity || !in_pool(r)) continue;
        double sim = 0.0;
        if (!new_zero) {
            if (l2_norm(r.embedding) == 0.0)
                out.warnings.push_back("zero-norm embedding for record " + std::to_string(r.id) +
                                       "; similarity treated as 0");
            else
                sim = cosine_similarity(incoming.embedding, r.embedding);
        }
        // strict > keeps the lowest id on ties
        if (sim > best) {
            best = sim;
            best_id = r.id;
        }
    }
    if (!best_id) return out;

    out.nearest = best_id;
    out.similarity = best;
    if (best < threshold) return out;

    const ArgumentRecord& existing = memory.get(*best_id);
    if (incoming.judged_strength() > existing.judged_strength()) {
        memory.archive(existing.id, memory.next_id());
        out.archived_existing = existing.id;
    } else {
        incoming.active = false;
        incoming.archived_by = existing.id;
        out.new_active = false;
    }
    return out;
}

inline ResolutionOutcome resolve_conflict(ArgumentRecord& incoming, MemoryStore& memory, double theta) {
    return resolve_in_pool(incoming, memory, theta, [](const ArgumentRecord&) { return true; });
}

// Self-generated claims are only compared against the agent's own seed and
// self records.
inline ResolutionOutcome resolve_self_conflict(ArgumentRecord& incoming, MemoryStore& memory, double theta_self) {
    if (incoming.role != Role::self) throw ContractViolation("resolve_self_conflict requires role=self");
    return resolve_in_pool(incoming, memory, theta_self,
                           [](const ArgumentRecord& r) { return r.role == Role::self || r.role == Role::seed; });
}

} // namespace belief
