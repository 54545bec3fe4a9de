#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "actr/association.hpp"
#include "actr/conflict.hpp"
#include "actr/model.hpp"

namespace actr {

enum class TraceKind {
    Matched,
    Fired,
    ChunkWritten,
    GoalPushed,
    GoalPopped,
    ExternalAction,
    Halted,
};

std::string to_string(TraceKind k);
TraceKind trace_kind_from(std::string_view s);

/// One simulation event. Payload is an ordered key=value list with a stable
/// field order per kind, so traces are golden-file comparable.
struct TraceEvent {
    Time time = 0.0;
    TraceKind kind = TraceKind::Halted;
    std::vector<std::pair<std::string, std::string>> payload;

    const std::string* field(std::string_view key) const;
};

struct Trace {
    std::vector<TraceEvent> events;
};

/// Line format: time<TAB>kind<TAB>key=value key=value ...
std::string serialize(const Trace& trace);
Trace parse_trace(const std::string& text);

/// One external side effect (a write to the environment).
struct ExternalWrite {
    Time time = 0.0;
    std::string name;
    std::vector<std::pair<std::string, SlotValue>> args;
};

enum class HaltReason { Complete, Impasse, CycleLimit };

/// The simulation interpreter. Owns the goal stack, the clock and all
/// learning state; strictly single-threaded. Each cycle: build context,
/// match, resolve, execute the winner's actions, then apply learning
/// updates (fire/use events, association counts, utility statistics).
class Engine {
public:
    explicit Engine(Model model);

    const Model& model() const { return model_; }
    Model& model() { return model_; }
    Time now() const { return now_; }
    const Trace& trace() const { return trace_; }
    const std::vector<ExternalWrite>& environment() const { return environment_; }
    const AssocStats& assoc() const { return assoc_; }
    AssocStats& assoc() { return assoc_; }
    const std::vector<ChunkId>& goal_stack() const { return stack_; }
    bool halted() const { return halt_.has_value(); }
    std::optional<HaltReason> halt_reason() const { return halt_; }
    int cycles() const { return cycles_; }

    /// Chunks treated as perceived in addition to the goal's references.
    std::vector<ChunkId> perceptual;

    /// Runs one match-resolve-fire-learn cycle. Returns false once halted
    /// (goal stack empty, impasse, or cycle limit).
    bool step();

    /// Steps until halted; returns the reason.
    HaltReason run();

    /// Matches one production against the current state and fires its first
    /// instantiation, bypassing conflict resolution. Used to replay compiled
    /// productions in isolation. Throws NoMatchError if it does not match.
    void fire_production(std::string_view name);

    /// Deterministic dump of memory, fire histories and learning state;
    /// equal digests mean equal end states.
    std::string state_digest() const;

private:
    struct GoalEntry {
        ChunkId id;
        Time pushed_at;
    };

    void emit(Time t, TraceKind kind,
              std::vector<std::pair<std::string, std::string>> payload);
    void halt(Time t, HaltReason reason);
    ChunkId instantiate_template(const ChunkTemplate& tmpl, const Bindings& b,
                                 Time t);
    /// Executes the instantiation's actions starting at fire_time and
    /// applies learning updates; returns the post-action clock.
    Time execute(const Instantiation& inst,
                 const std::vector<Instantiation>& all, Time fire_time,
                 const Context& context);
    std::string display_chunk_name(ChunkId id) const;
    std::map<std::string, std::string> display_bindings(const Bindings& b) const;

    friend Engine replay_fired_sequence(Model model, const Trace& recorded);

    Model model_;
    AssocStats assoc_;
    std::vector<GoalEntry> stack_;
    Trace trace_;
    std::vector<ExternalWrite> environment_;
    Time now_ = 0.0;
    int cycles_ = 0;
    int fresh_counter_ = 0;
    std::optional<HaltReason> halt_;
    // Replay support: when set, cycle i fires the i-th recorded production
    // at its recorded time instead of resolving the conflict set.
    struct ForcedFire {
        std::string production;
        std::map<std::string, std::string> bindings;  // recorded display form
        Time time;
    };
    std::optional<std::vector<ForcedFire>> forced_;
    size_t forced_next_ = 0;
};

/// Re-runs a model following the Fired decisions recorded in `recorded`.
/// The returned engine's state digest must equal the original run's.
Engine replay_fired_sequence(Model model, const Trace& recorded);

}  // namespace actr
