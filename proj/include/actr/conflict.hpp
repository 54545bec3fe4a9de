#pragma once

#include <vector>

#include "actr/params.hpp"
#include "actr/procedural.hpp"
#include "actr/utility.hpp"

namespace actr {

/// An instantiation together with its expected value V = p*G - C.
struct ValuedMatch {
    Instantiation inst;
    double value = 0.0;
};

/// V = p*G - C with p = q*r.
double expected_value(const UtilityStats& stats, const ConflictParams& params,
                      double spent_cost = 0.0);

/// Density that a production of value x will ever match from time t on:
/// Z_t(x; V) = 1/(t(G-V)) * e^(-(G-x)/(t(G-V))), defined for x <= G.
/// Throws DomainError when t <= 0 or V >= G.
double z_density(double x, double V, double G, double t);

/// Expected improvement over V of waiting at time t:
/// integral_V^G (x - V) Z_t(x; V) dx = (G-V) * (1 - t*(1 - e^(-1/t))).
/// Strictly decreasing in t, in [0, G-V]. V = G returns 0.
double expected_gain(double V, double G, double t);

enum class Decision { Fire, Wait };

/// Fire iff the expected gain of waiting does not exceed the waiting cost.
Decision decide(double V, double G, double t, double waiting_cost_tau);

/// The waiting window T solving expected_gain(V, G, T) = tau (bisection on
/// the strictly decreasing gain). 0 when tau >= G-V; +infinity when tau = 0.
double waiting_window(double V, double G, const ConflictParams& params);

struct Resolution {
    ValuedMatch winner;
    Time fire_time = 0.0;
};

/// Processes matches in ascending match time, keeping the best value seen.
/// A strictly better arrival resets the clock origin; the incumbent fires
/// once the next arrival falls beyond its waiting window, or immediately
/// when no unprocessed match remains. Ties on value break by earlier match
/// time, then lower production id. Throws NoMatchError on an empty list.
Resolution resolve(std::vector<ValuedMatch> matches, const ConflictParams& params);

}  // namespace actr
