#include "actr/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace actr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double expected_value(const UtilityStats& stats, const ConflictParams& params,
                      double spent_cost) {
    return stats.success_probability(spent_cost) * params.goal_value_G -
           stats.estimate_C();
}

double z_density(double x, double V, double G, double t) {
    if (t <= 0.0) throw DomainError("z_density: t must be positive");
    if (V >= G) throw DomainError("z_density: V must be below G");
    const double scale = t * (G - V);
    return std::exp(-(G - x) / scale) / scale;
}

double expected_gain(double V, double G, double t) {
    if (t <= 0.0) throw DomainError("expected_gain: t must be positive");
    if (V > G) throw DomainError("expected_gain: V must not exceed G");
    if (V == G) return 0.0;
    // integral_V^G (x - V) Z_t(x; V) dx, in closed form. -expm1 keeps
    // 1 - e^(-1/t) accurate for large t.
    return (G - V) * (1.0 - t * (-std::expm1(-1.0 / t)));
}

Decision decide(double V, double G, double t, double waiting_cost_tau) {
    return expected_gain(V, G, t) <= waiting_cost_tau ? Decision::Fire
                                                      : Decision::Wait;
}

double waiting_window(double V, double G, const ConflictParams& params) {
    const double tau = params.waiting_cost_tau;
    const double delta = G - V;
    if (tau >= delta) return 0.0;  // gain < delta everywhere: fire now
    if (tau <= 0.0) return kInf;   // gain > 0 everywhere: wait forever
    // gain(t) is strictly decreasing from delta (t -> 0) to 0 (t -> inf),
    // so the root is unique. Bracket it, then bisect.
    double lo = 1.0, hi = 1.0;
    while (expected_gain(V, G, lo) <= tau) lo *= 0.5;
    while (expected_gain(V, G, hi) > tau) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (expected_gain(V, G, mid) > tau ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Resolution resolve(std::vector<ValuedMatch> matches, const ConflictParams& params) {
    if (matches.empty()) throw NoMatchError("resolve: no matched production");
    std::sort(matches.begin(), matches.end(),
              [](const ValuedMatch& a, const ValuedMatch& b) {
                  if (a.inst.match_time != b.inst.match_time)
                      return a.inst.match_time < b.inst.match_time;
                  return a.inst.production_id < b.inst.production_id;
              });

    const ValuedMatch* best = &matches.front();
    Time origin = best->inst.match_time;
    double window = waiting_window(best->value, params.goal_value_G, params);

    for (size_t i = 1; i < matches.size(); ++i) {
        const ValuedMatch& next = matches[i];
        if (next.inst.match_time - origin > window) {
            // The window expired before this arrival; the incumbent fired.
            return {*best, origin + window};
        }
        if (next.value > best->value) {
            best = &next;
            origin = next.inst.match_time;
            window = waiting_window(best->value, params.goal_value_G, params);
        }
    }
    // Closed world: no unprocessed match remains, so the incumbent fires
    // without sitting out the rest of its window.
    return {*best, origin};
}

}  // namespace actr
