#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

#include "actr/types.hpp"

namespace actr {

// ---------------------------------------------------------------------------
// Decay regimes for usage-event traces.
// ---------------------------------------------------------------------------

/// Every event decays at the same fixed rate d.
struct ConstantDecay {
    double d = 0.5;
};

/// Spacing-sensitive decay: d_k = max{d1, b * gap^(-d1)}, where gap is the
/// positive interval since the previous event. The first event of a chunk
/// decays at d1. Tight spacing yields faster decay.
struct SpacingAS91 {
    double d1 = 0.5;
    double b = 1.0;
};

/// Spacing-sensitive decay: d_k = c * e^m + alpha, where m is the chunk's
/// activation just before the new event. High activation at practice time
/// yields faster decay of the new trace.
struct SpacingPA08 {
    double c = 0.25;
    double alpha = 0.1;
};

using DecayMode = std::variant<ConstantDecay, SpacingAS91, SpacingPA08>;

/// Parameters of declarative memory: decay regime, base-activation offset,
/// retrieval latency constants and the recall sigmoid.
struct DeclarativeParams {
    DecayMode decay_mode = ConstantDecay{};
    double base_B = 0.0;             // additive constant of base activation
    double retrieval_F = 1.0;        // seconds, latency scale
    double retrieval_C = 0.05;       // seconds, fixed retrieval cost
    double recall_threshold_tau = 0.0;
    double recall_noise_s = 0.4;     // > 0
};

/// Smoothing pseudo-counts for associative strength estimates.
struct AssocParams {
    double prior_a = 1.0;
    double prior_b = 1.0;
};

/// Production strength: same functional form as base activation, over fire
/// events with a constant decay. Never-fired productions report `initial`.
struct StrengthParams {
    double d = 0.5;
    double B = 0.0;
    double initial = 0.0;
};

/// Match latency constants: L = sum_i B * e^(-b * (A_i + S)).
struct LatencyParams {
    double B = 0.05;  // seconds, > 0
    double b = 1.0;   // > 0
};

/// Conflict resolution: goal reward G and the fixed cost of waiting for a
/// better production to match.
struct ConflictParams {
    double goal_value_G = 20.0;
    double waiting_cost_tau = 1.0;
};

/// Goal-achievement probability r as a fixed constant.
struct RConstant {
    double r0 = 1.0;
};

/// r discounted by cost already spent: max(0, 1 - spent/budget).
struct RCostDiscount {
    double budget = 20.0;
};

using RMode = std::variant<RConstant, RCostDiscount>;

struct UtilityParams {
    double q_prior_alpha = 1.0;
    double q_prior_beta = 1.0;
    double cost_prior = 0.05;
    RMode r_mode = RConstant{};
};

struct EngineParams {
    double action_time = 0.05;  // seconds per executed action
    int max_cycles = 1000;
    bool strengthen_losers = false;  // also record_use on losing instantiations
};

/// One home for every global constant of the theory. Model files assign
/// these by key; unknown keys are rejected.
struct Parameters {
    DeclarativeParams declarative;
    AssocParams assoc;
    StrengthParams strength;
    LatencyParams latency;
    ConflictParams conflict;
    UtilityParams utility;
    EngineParams engine;

    /// Assigns a parameter by key, validating the value against the
    /// parameter's invariants. Throws DomainError on unknown key or
    /// out-of-range value.
    void set(const std::string& key, const std::string& value);
};

}  // namespace actr
