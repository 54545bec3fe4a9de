#pragma once

#include <string>
#include <vector>

#include "actr/params.hpp"
#include "actr/types.hpp"

namespace actr {

struct PowerLawRow {
    int k = 0;            // practice uses so far
    Time eval_time = 0;   // when the next retrieval would occur
    Time latency = 0;
};

struct PowerLawResult {
    std::vector<PowerLawRow> rows;  // k = 1..K
    double slope = 0.0;             // log-log regression over k in [5, K]
};

/// Practices one chunk K times at spacing dt under constant decay d and
/// records the retrieval latency of the next attempt after each use.
/// Latency is the pure power-law component (F = 1, C = 0, B = 0), matching
/// the derivation the experiment reproduces. Throws DomainError for K < 10.
PowerLawResult powerlaw_experiment(double d, double dt, int K);

std::string powerlaw_csv(const PowerLawResult& r);

struct ScheduleSpec {
    std::string name;
    double gap = 1.0;  // seconds between events
    int count = 0;     // number of events; first at t = 0
};

struct SpacingRow {
    std::string name;
    double activation = 0.0;
    double recall_prob = 0.0;
};

/// Replays each schedule through a fresh memory under the given decay mode
/// and reports activation and recall probability at (last event + test_delay).
/// Requires two or more schedules with equal event counts.
std::vector<SpacingRow> spacing_experiment(const DecayMode& mode,
                                           const std::vector<ScheduleSpec>& schedules,
                                           double test_delay,
                                           const DeclarativeParams& base = {});

std::string spacing_csv(const std::vector<SpacingRow>& rows);

}  // namespace actr
