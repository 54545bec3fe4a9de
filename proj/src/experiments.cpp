#include "actr/experiments.hpp"

#include <cmath>

#include "actr/association.hpp"
#include "actr/declarative.hpp"

namespace actr {

PowerLawResult powerlaw_experiment(double d, double dt, int K) {
    if (K < 10)
        throw DomainError("powerlaw experiment needs K >= 10 for a meaningful fit");
    if (dt <= 0.0) throw DomainError("dt must be positive");
    if (d <= 0.0 || d >= 1.0) throw DomainError("d must lie in (0,1)");

    // The derivation this reproduces folds the associative term, B and the
    // fixed cost C into the scale, so latency is the pure power-law part.
    DeclarativeParams params;
    params.decay_mode = ConstantDecay{d};
    params.base_B = 0.0;
    params.retrieval_F = 1.0;
    params.retrieval_C = 0.0;
    Memory memory(params);
    NullAssociativeSource no_assoc;

    const ChunkId item = memory.add_chunk("item", {}, 0.0);
    PowerLawResult result;
    for (int k = 1; k <= K; ++k) {
        memory.record_use(item, static_cast<double>(k) * dt);
        // Latency of the next retrieval attempt, one spacing later.
        const Time eval = static_cast<double>(k + 1) * dt;
        result.rows.push_back(
            {k, eval, memory.retrieval_latency(item, {}, no_assoc, eval)});
    }

    // Ordinary least squares on (ln k, ln L) over k in [5, K].
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const PowerLawRow& row : result.rows) {
        if (row.k < 5) continue;
        const double x = std::log(static_cast<double>(row.k));
        const double y = std::log(row.latency);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    result.slope = (static_cast<double>(n) * sxy - sx * sy) /
                   (static_cast<double>(n) * sxx - sx * sx);
    return result;
}

std::string powerlaw_csv(const PowerLawResult& r) {
    std::string out = "k,age_profile,latency\n";
    for (const PowerLawRow& row : r.rows) {
        out += std::to_string(row.k);
        out += ',';
        out += format_number(row.eval_time);
        out += ',';
        out += format_number(row.latency);
        out += '\n';
    }
    return out;
}

std::vector<SpacingRow> spacing_experiment(const DecayMode& mode,
                                           const std::vector<ScheduleSpec>& schedules,
                                           double test_delay,
                                           const DeclarativeParams& base) {
    if (schedules.size() < 2)
        throw DomainError("spacing experiment needs at least two schedules");
    for (const ScheduleSpec& s : schedules) {
        if (s.count != schedules.front().count)
            throw DomainError("schedules must have equal event counts ('" +
                              schedules.front().name + "' has " +
                              std::to_string(schedules.front().count) + ", '" +
                              s.name + "' has " + std::to_string(s.count) + ")");
        if (s.count < 1) throw DomainError("schedules need at least one event");
        if (s.gap <= 0.0) throw DomainError("schedule gaps must be positive");
    }

    std::vector<SpacingRow> rows;
    NullAssociativeSource no_assoc;
    for (const ScheduleSpec& s : schedules) {
        DeclarativeParams params = base;
        params.decay_mode = mode;
        Memory memory(params);
        const ChunkId item = memory.add_chunk("item", {}, 0.0);
        for (int k = 1; k < s.count; ++k)
            memory.record_use(item, static_cast<double>(k) * s.gap);
        const Time last = static_cast<double>(s.count - 1) * s.gap;
        const Time test = last + test_delay;
        rows.push_back({s.name, memory.base_activation(item, test),
                        memory.recall_probability(item, {}, no_assoc, test)});
    }
    return rows;
}

std::string spacing_csv(const std::vector<SpacingRow>& rows) {
    std::string out = "schedule,activation,recall_prob\n";
    for (const SpacingRow& r : rows) {
        out += r.name;
        out += ',';
        out += format_number(r.activation);
        out += ',';
        out += format_number(r.recall_prob);
        out += '\n';
    }
    return out;
}

}  // namespace actr
