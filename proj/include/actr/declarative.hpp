#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "actr/params.hpp"
#include "actr/types.hpp"

namespace actr {

/// One usage of a memory trace. The decay rate is fixed when the event is
/// created (by the active decay mode) and never recomputed.
struct UsageEvent {
    Time time = 0.0;
    double decay = 0.5;  // > 0
};

/// A declarative memory unit: named slots plus the usage history that
/// drives its activation.
struct Chunk {
    ChunkId id = kNoChunk;
    std::string name;  // display name; auto-generated when not declared
    std::string kind;
    std::vector<std::pair<std::string, SlotValue>> slots;  // ordered
    Time creation_time = 0.0;
    std::vector<UsageEvent> events;

    const SlotValue* slot(std::string_view name) const;
    /// Chunk ids appearing in slot values, in slot order (may repeat).
    std::vector<ChunkId> references() const;
    Time last_event_time() const;
};

/// Power-law trace sum: sum_k age_k^(-d_k) over events with age > 0.
/// Events of age exactly zero are excluded (their trace diverges; activation
/// is only queried strictly after an event).
double power_law_trace_sum(std::span<const UsageEvent> events, Time now);

/// ln(trace sum) + B; -infinity for an empty (or all zero-age) history.
double base_level(std::span<const UsageEvent> events, Time now, double offset_B);

/// Declarative memory: owns chunks and answers activation, recall
/// probability and retrieval latency queries. Single writer; all queries are
/// pure functions of (state, now).
class Memory {
public:
    Memory() = default;
    explicit Memory(DeclarativeParams params) : params_(std::move(params)) {}

    DeclarativeParams& params() { return params_; }
    const DeclarativeParams& params() const { return params_; }

    /// Stores a chunk; its creation is recorded as the first usage event.
    /// Throws ReferenceError if a slot references an unknown chunk.
    ChunkId add_chunk(std::string kind,
                      std::vector<std::pair<std::string, SlotValue>> slots,
                      Time now, std::string name = {});

    /// Two-phase creation for parsers that allow forward references:
    /// declare first, fill slots after every chunk exists.
    ChunkId declare_chunk(std::string kind, Time now, std::string name = {});
    void set_slots(ChunkId id,
                   const std::vector<std::pair<std::string, SlotValue>>& slots);

    bool has(ChunkId id) const;
    const Chunk& chunk(ChunkId id) const;  // throws ReferenceError
    const std::vector<Chunk>& chunks() const { return chunks_; }
    ChunkId find(std::string_view name) const;  // kNoChunk when absent
    const std::string& name_of(ChunkId id) const { return chunk(id).name; }

    /// Appends a usage event with a decay chosen by the active decay mode.
    /// Throws OrderingError if `now` precedes the chunk's last event.
    UsageEvent record_use(ChunkId id, Time now);

    /// B(t) = ln sum_k age_k^(-d_k) + B. -infinity for empty history.
    double base_activation(ChunkId id, Time now) const;

    /// A(t) = B(t) + sum_j w_j * s_ij over the context.
    double activation(ChunkId id, const Context& context,
                      const AssociativeSource& assoc, Time now) const;

    /// P = 1 / (1 + e^(-(A - tau)/s)); 0 when A = -infinity.
    double recall_probability(ChunkId id, const Context& context,
                              const AssociativeSource& assoc, Time now) const;

    /// L = F * e^(-A) + C; +infinity when A = -infinity.
    Time retrieval_latency(ChunkId id, const Context& context,
                           const AssociativeSource& assoc, Time now) const;

    std::string display(const SlotValue& v) const;

private:
    double decay_for_new_event(const Chunk& c, Time now) const;
    void validate_references(
        const std::vector<std::pair<std::string, SlotValue>>& slots) const;

    DeclarativeParams params_;
    std::vector<Chunk> chunks_;
    std::unordered_map<std::string, ChunkId> by_name_;
};

}  // namespace actr
