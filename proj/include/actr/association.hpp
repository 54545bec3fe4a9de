#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "actr/declarative.hpp"
#include "actr/params.hpp"
#include "actr/types.hpp"

namespace actr {

/// Co-occurrence statistics between chunks matching fired productions and
/// context elements, smoothed with symmetric pseudo-counts. Strengths
/// s_ij estimate log p(N_i | C_j) / p(N_i): how much more often chunk i
/// matches a fired production when chunk j is in context.
class AssocStats final : public AssociativeSource {
public:
    AssocStats() = default;
    explicit AssocStats(AssocParams params) : params_(params) {}

    /// Records one production firing: which chunks matched it and what the
    /// context was at that moment.
    void observe_firing(const std::vector<ChunkId>& matched_chunks,
                        const Context& context);

    /// s_ij, finite for every reachable count state.
    double strength(ChunkId i, ChunkId j) const override;

    // Raw counters, exposed for the replay oracle.
    std::int64_t firings() const { return firings_; }
    std::int64_t context_count(ChunkId j) const;
    std::int64_t fire_total(ChunkId i) const;
    std::int64_t fire_with(ChunkId i, ChunkId j) const;

    const AssocParams& params() const { return params_; }

private:
    AssocParams params_;
    std::int64_t firings_ = 0;
    std::unordered_map<ChunkId, std::int64_t> context_count_;
    std::unordered_map<ChunkId, std::int64_t> fire_total_;
    std::unordered_map<std::int64_t, std::int64_t> fire_with_;  // key: (i<<32)|j
};

/// Context = chunks referenced by the goal's slots plus the perceptual set,
/// deduplicated, each with weight 1/n.
Context build_context(const Memory& memory, ChunkId goal,
                      const std::vector<ChunkId>& perceptual = {});

}  // namespace actr
