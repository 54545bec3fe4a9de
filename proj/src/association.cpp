#include "actr/association.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace actr {

namespace {
std::int64_t pair_key(ChunkId i, ChunkId j) {
    return (static_cast<std::int64_t>(i) << 32) |
           static_cast<std::int64_t>(static_cast<std::uint32_t>(j));
}
}  // namespace

void AssocStats::observe_firing(const std::vector<ChunkId>& matched_chunks,
                                const Context& context) {
    ++firings_;
    for (const auto& el : context) ++context_count_[el.id];
    for (ChunkId i : matched_chunks) {
        ++fire_total_[i];
        for (const auto& el : context) ++fire_with_[pair_key(i, el.id)];
    }
}

std::int64_t AssocStats::context_count(ChunkId j) const {
    auto it = context_count_.find(j);
    return it == context_count_.end() ? 0 : it->second;
}

std::int64_t AssocStats::fire_total(ChunkId i) const {
    auto it = fire_total_.find(i);
    return it == fire_total_.end() ? 0 : it->second;
}

std::int64_t AssocStats::fire_with(ChunkId i, ChunkId j) const {
    auto it = fire_with_.find(pair_key(i, j));
    return it == fire_with_.end() ? 0 : it->second;
}

double AssocStats::strength(ChunkId i, ChunkId j) const {
    // s_ij = ln p(N_i | C_j) - ln p(N_i), both estimated with smoothing
    // pseudo-counts so the log stays finite for every count state.
    const double a = params_.prior_a;
    const double b = params_.prior_b;
    const double cond =
        (static_cast<double>(fire_with(i, j)) + a) /
        (static_cast<double>(context_count(j)) + a + b);
    const double marginal =
        (static_cast<double>(fire_total(i)) + a) /
        (static_cast<double>(firings_) + a + b);
    return std::log(cond) - std::log(marginal);
}

Context build_context(const Memory& memory, ChunkId goal,
                      const std::vector<ChunkId>& perceptual) {
    std::set<ChunkId> ids;
    for (ChunkId id : memory.chunk(goal).references()) ids.insert(id);
    for (ChunkId id : perceptual) ids.insert(id);
    Context out;
    if (ids.empty()) return out;
    const double w = 1.0 / static_cast<double>(ids.size());
    for (ChunkId id : ids) out.push_back({id, w});
    return out;
}

}  // namespace actr
