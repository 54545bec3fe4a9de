#pragma once

#include <cstdint>

#include "actr/params.hpp"

namespace actr {

/// Learned utility components of one production: success probability q
/// (Beta posterior mean), goal-achievement probability r (pluggable
/// heuristic) and expected cost C (running mean with a prior).
struct UtilityStats {
    double q_alpha = 1.0;  // > 0
    double q_beta = 1.0;   // > 0
    double cost_sum = 0.0;
    std::int64_t cost_n = 0;
    double cost_prior = 0.05;
    RMode r_mode = RConstant{};

    static UtilityStats from(const UtilityParams& p) {
        UtilityStats s;
        s.q_alpha = p.q_prior_alpha;
        s.q_beta = p.q_prior_beta;
        s.cost_prior = p.cost_prior;
        s.r_mode = p.r_mode;
        return s;
    }

    void update_q(bool success) { (success ? q_alpha : q_beta) += 1.0; }
    double estimate_q() const { return q_alpha / (q_alpha + q_beta); }

    /// Constant mode returns r0; CostDiscount returns max(0, 1 - spent/budget).
    double estimate_r(double spent_cost) const;

    void update_cost(double observed) {
        cost_sum += observed;
        ++cost_n;
    }
    double estimate_C() const {
        return cost_n == 0 ? cost_prior : cost_sum / static_cast<double>(cost_n);
    }

    /// p = q * r, in [0,1].
    double success_probability(double spent_cost) const {
        return estimate_q() * estimate_r(spent_cost);
    }
};

}  // namespace actr
