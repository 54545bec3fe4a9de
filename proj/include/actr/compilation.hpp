#pragma once

#include <string>

#include "actr/engine.hpp"
#include "actr/model.hpp"
#include "actr/procedural.hpp"

namespace actr {

/// Builds a specialized production from one complete goal episode in a
/// trace: the precondition is the episode's initial goal with every value
/// hard-coded, the actions are the episode's external writes (internal
/// subgoal traffic and memory bookkeeping are dropped) followed by a pop.
/// The episode is the first GoalPushed whose chunk matches `goal_pattern`,
/// through its balancing GoalPopped. Throws EpisodeError when no complete
/// episode exists.
Production proceduralize(const Trace& trace, const Pattern& goal_pattern,
                         const Model& model, std::string new_name);

/// Combines two productions that fire in sequence into one. p_b's patterns
/// are unified against p_a's post-state: the goal position must chain, and
/// patterns whose kind p_a produces or modifies must unify with that
/// product (otherwise CompositionError); untouched-kind patterns are carried
/// over as extra preconditions. Slot updates are folded through p_b with
/// arithmetic simplification; chunks written by p_a and consumed only by
/// p_b are elided. The result starts with fresh utility and strength.
Production compose(const Production& p_a, const Production& p_b,
                   const Model& model, std::string new_name);

}  // namespace actr
