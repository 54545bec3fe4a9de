#include "actr/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace actr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(TraceKind k) {
    switch (k) {
        case TraceKind::Matched: return "Matched";
        case TraceKind::Fired: return "Fired";
        case TraceKind::ChunkWritten: return "ChunkWritten";
        case TraceKind::GoalPushed: return "GoalPushed";
        case TraceKind::GoalPopped: return "GoalPopped";
        case TraceKind::ExternalAction: return "ExternalAction";
        case TraceKind::Halted: return "Halted";
    }
    return "?";
}

TraceKind trace_kind_from(std::string_view s) {
    if (s == "Matched") return TraceKind::Matched;
    if (s == "Fired") return TraceKind::Fired;
    if (s == "ChunkWritten") return TraceKind::ChunkWritten;
    if (s == "GoalPushed") return TraceKind::GoalPushed;
    if (s == "GoalPopped") return TraceKind::GoalPopped;
    if (s == "ExternalAction") return TraceKind::ExternalAction;
    if (s == "Halted") return TraceKind::Halted;
    throw ParseError("unknown trace event kind '" + std::string(s) + "'");
}

const std::string* TraceEvent::field(std::string_view key) const {
    for (const auto& [k, v] : payload)
        if (k == key) return &v;
    return nullptr;
}

std::string serialize(const Trace& trace) {
    std::string out;
    for (const TraceEvent& e : trace.events) {
        out += format_fixed(e.time, 6);
        out += '\t';
        out += to_string(e.kind);
        out += '\t';
        bool first = true;
        for (const auto& [k, v] : e.payload) {
            if (!first) out += ' ';
            first = false;
            out += k;
            out += '=';
            out += v;
        }
        out += '\n';
    }
    return out;
}

Trace parse_trace(const std::string& text) {
    Trace trace;
    int line_no = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;

        const size_t tab1 = line.find('\t');
        const size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                      : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos)
            throw ParseError(line_no, "malformed trace line (expected two tabs)");

        TraceEvent e;
        const std::string time_text = line.substr(0, tab1);
        const char* b = time_text.c_str();
        auto [p, ec] = std::from_chars(b, b + time_text.size(), e.time);
        if (ec != std::errc{} || p != b + time_text.size())
            throw ParseError(line_no, "bad trace timestamp '" + time_text + "'");
        e.kind = trace_kind_from(line.substr(tab1 + 1, tab2 - tab1 - 1));

        std::istringstream rest(line.substr(tab2 + 1));
        std::string token;
        while (rest >> token) {
            const size_t eq = token.find('=');
            if (eq == std::string::npos)
                throw ParseError(line_no, "malformed payload token '" + token + "'");
            e.payload.emplace_back(token.substr(0, eq), token.substr(eq + 1));
        }
        trace.events.push_back(std::move(e));
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

Engine::Engine(Model model) : model_(std::move(model)), assoc_(model_.params.assoc) {
    // Cycle zero begins one action tick after the model was encoded, so the
    // initial chunks already have positive trace ages.
    now_ = model_.params.engine.action_time;
    if (model_.goal != kNoChunk) {
        const Chunk& g = model_.memory.chunk(model_.goal);
        stack_.push_back({model_.goal, g.creation_time});
        std::vector<std::pair<std::string, std::string>> payload;
        payload.emplace_back("goal", g.name);
        payload.emplace_back("kind", g.kind);
        for (const auto& [slot, value] : g.slots)
            payload.emplace_back("s." + slot, model_.memory.display(value));
        emit(g.creation_time, TraceKind::GoalPushed, std::move(payload));
    }
}

void Engine::emit(Time t, TraceKind kind,
                  std::vector<std::pair<std::string, std::string>> payload) {
    trace_.events.push_back({t, kind, std::move(payload)});
}

void Engine::halt(Time t, HaltReason reason) {
    halt_ = reason;
    const char* text = reason == HaltReason::Complete  ? "complete"
                       : reason == HaltReason::Impasse ? "impasse"
                                                       : "cycles";
    emit(t, TraceKind::Halted, {{"reason", text}});
}

std::string Engine::display_chunk_name(ChunkId id) const {
    return model_.memory.name_of(id);
}

std::map<std::string, std::string> Engine::display_bindings(const Bindings& b) const {
    std::map<std::string, std::string> out;
    for (const auto& [var, value] : b) out[var] = model_.memory.display(value);
    return out;
}

ChunkId Engine::instantiate_template(const ChunkTemplate& tmpl, const Bindings& b,
                                     Time t) {
    std::vector<std::pair<std::string, SlotValue>> slots;
    slots.reserve(tmpl.slots.size());
    for (const auto& [name, expr] : tmpl.slots)
        slots.emplace_back(name, eval_expr(*expr, b));
    return model_.memory.add_chunk(tmpl.kind, std::move(slots), t);
}

bool Engine::step() {
    if (halt_) return false;
    if (stack_.empty()) {
        halt(now_, HaltReason::Complete);
        return false;
    }
    if (cycles_ >= model_.params.engine.max_cycles) {
        halt(now_, HaltReason::CycleLimit);
        return false;
    }

    const ChunkId goal = stack_.back().id;
    const Context context = build_context(model_.memory, goal, perceptual);
    std::vector<Instantiation> insts =
        match(model_.memory, goal, model_.productions, now_,
              model_.params.latency, model_.params.strength, context, assoc_);
    // A chunk with -infinity activation never finishes matching.
    std::erase_if(insts, [](const Instantiation& i) {
        return std::isinf(i.match_time);
    });
    if (insts.empty()) {
        halt(now_, HaltReason::Impasse);
        return false;
    }

    const Instantiation* chosen = nullptr;
    Time fire_time = 0.0;
    if (forced_) {
        if (forced_next_ >= forced_->size()) {
            halt(now_, HaltReason::CycleLimit);
            return false;
        }
        const ForcedFire& f = (*forced_)[forced_next_++];
        for (const Instantiation& inst : insts) {
            if (model_.productions.at(inst.production_id).name != f.production)
                continue;
            if (display_bindings(inst.bindings) == f.bindings) {
                chosen = &inst;
                break;
            }
        }
        if (!chosen)
            throw NoMatchError("replay: recorded firing of '" + f.production +
                               "' does not match any instantiation");
        fire_time = f.time;
    } else {
        const double spent = now_ - stack_.back().pushed_at;
        std::vector<ValuedMatch> valued;
        valued.reserve(insts.size());
        for (const Instantiation& inst : insts) {
            const Production& p = model_.productions.at(inst.production_id);
            valued.push_back(
                {inst, expected_value(p.utility, model_.params.conflict, spent)});
        }
        const Resolution res = resolve(std::move(valued), model_.params.conflict);
        fire_time = res.fire_time;
        for (const Instantiation& inst : insts) {
            if (inst.production_id == res.winner.inst.production_id &&
                bindings_key(inst.bindings) == bindings_key(res.winner.inst.bindings)) {
                chosen = &inst;
                break;
            }
        }
    }

    // Matches that arrived before the decision, in arrival order.
    std::vector<const Instantiation*> arrived;
    for (const Instantiation& inst : insts)
        if (inst.match_time <= fire_time) arrived.push_back(&inst);
    std::stable_sort(arrived.begin(), arrived.end(),
                     [](const Instantiation* a, const Instantiation* b) {
                         return a->match_time < b->match_time;
                     });
    for (const Instantiation* inst : arrived) {
        std::vector<std::pair<std::string, std::string>> payload;
        payload.emplace_back("production",
                             model_.productions.at(inst->production_id).name);
        for (const auto& [var, value] : inst->bindings)
            payload.emplace_back("b." + var, model_.memory.display(value));
        emit(inst->match_time, TraceKind::Matched, std::move(payload));
    }

    now_ = execute(*chosen, insts, fire_time, context);
    ++cycles_;
    return true;
}

Time Engine::execute(const Instantiation& inst,
                     const std::vector<Instantiation>& all, Time fire_time,
                     const Context& context) {
    Production& prod = model_.productions.at(inst.production_id);
    const double action_time = model_.params.engine.action_time;

    {
        std::vector<std::pair<std::string, std::string>> payload;
        payload.emplace_back("production", prod.name);
        for (const auto& [var, value] : inst.bindings)
            payload.emplace_back("b." + var, model_.memory.display(value));
        emit(fire_time, TraceKind::Fired, std::move(payload));
    }

    // Execute actions in order; action i starts at fire_time + i*action_time.
    Time t = fire_time;
    for (size_t i = 0; i < prod.actions.size(); ++i) {
        t = fire_time + static_cast<double>(i) * action_time;
        const Action& action = prod.actions[i];
        if (const auto* push = std::get_if<PushGoal>(&action)) {
            const ChunkId id = instantiate_template(push->goal, inst.bindings, t);
            stack_.push_back({id, t});
            const Chunk& c = model_.memory.chunk(id);
            std::vector<std::pair<std::string, std::string>> payload;
            payload.emplace_back("goal", c.name);
            payload.emplace_back("kind", c.kind);
            for (const auto& [slot, value] : c.slots)
                payload.emplace_back("s." + slot, model_.memory.display(value));
            emit(t, TraceKind::GoalPushed, std::move(payload));
        } else if (std::get_if<PopGoal>(&action)) {
            if (stack_.empty())
                throw StackError("'" + prod.name + "': pop on empty goal stack");
            const ChunkId popped = stack_.back().id;
            stack_.pop_back();
            emit(t, TraceKind::GoalPopped, {{"goal", display_chunk_name(popped)}});
        } else if (const auto* write = std::get_if<WriteChunk>(&action)) {
            const ChunkId id = instantiate_template(write->chunk, inst.bindings, t);
            const Chunk& c = model_.memory.chunk(id);
            std::vector<std::pair<std::string, std::string>> payload;
            payload.emplace_back("chunk", c.name);
            payload.emplace_back("kind", c.kind);
            payload.emplace_back("mode", "create");
            for (const auto& [slot, value] : c.slots)
                payload.emplace_back("s." + slot, model_.memory.display(value));
            emit(t, TraceKind::ChunkWritten, std::move(payload));
        } else if (const auto* set = std::get_if<SetSlot>(&action)) {
            auto it = inst.bindings.find(set->target_var);
            if (it == inst.bindings.end())
                throw DomainError("'" + prod.name + "': unbound set target ?" +
                                  set->target_var);
            const auto* ref = std::get_if<ChunkRef>(&it->second);
            if (!ref)
                throw DomainError("'" + prod.name + "': set target ?" +
                                  set->target_var + " is not a chunk");
            std::vector<std::pair<std::string, SlotValue>> slots;
            for (const auto& [name, expr] : set->slots)
                slots.emplace_back(name, eval_expr(*expr, inst.bindings));
            model_.memory.set_slots(ref->id, slots);
            const Chunk& c = model_.memory.chunk(ref->id);
            std::vector<std::pair<std::string, std::string>> payload;
            payload.emplace_back("chunk", c.name);
            payload.emplace_back("kind", c.kind);
            payload.emplace_back("mode", "update");
            for (const auto& [slot, value] : slots)
                payload.emplace_back("s." + slot, model_.memory.display(value));
            emit(t, TraceKind::ChunkWritten, std::move(payload));
        } else if (const auto* ext = std::get_if<EmitExternal>(&action)) {
            ExternalWrite w;
            w.time = t;
            w.name = ext->name;
            for (const auto& [key, expr] : ext->args)
                w.args.emplace_back(key, eval_expr(*expr, inst.bindings));
            std::vector<std::pair<std::string, std::string>> payload;
            payload.emplace_back("name", w.name);
            for (const auto& [key, value] : w.args)
                payload.emplace_back("a." + key, model_.memory.display(value));
            environment_.push_back(std::move(w));
            emit(t, TraceKind::ExternalAction, std::move(payload));
        }
    }
    const Time end =
        fire_time + static_cast<double>(prod.actions.size()) * action_time;

    // Learning updates, timestamped at the fire time.
    record_fire(prod, model_.params.strength, fire_time);
    for (ChunkId id : inst.matched) model_.memory.record_use(id, fire_time);
    if (model_.params.engine.strengthen_losers) {
        std::vector<ChunkId> extra;
        for (const Instantiation& other : all)
            for (ChunkId id : other.matched) extra.push_back(id);
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
        for (ChunkId id : extra)
            if (!std::binary_search(inst.matched.begin(), inst.matched.end(), id))
                model_.memory.record_use(id, fire_time);
    }
    assoc_.observe_firing(inst.matched, context);
    prod.utility.update_q(true);
    prod.utility.update_cost(static_cast<double>(prod.actions.size()) * action_time);
    return end;
}

HaltReason Engine::run() {
    while (step()) {
    }
    return *halt_;
}

void Engine::fire_production(std::string_view name) {
    const Production* prod = model_.productions.by_name(name);
    if (!prod) throw NoMatchError("unknown production '" + std::string(name) + "'");
    if (stack_.empty()) throw NoMatchError("goal stack is empty");
    const ChunkId goal = stack_.back().id;
    const Context context = build_context(model_.memory, goal, perceptual);
    std::vector<Instantiation> insts =
        match(model_.memory, goal, model_.productions, now_,
              model_.params.latency, model_.params.strength, context, assoc_);
    for (const Instantiation& inst : insts) {
        if (inst.production_id == prod->id && !std::isinf(inst.match_time)) {
            now_ = execute(inst, insts, inst.match_time, context);
            ++cycles_;
            return;
        }
    }
    throw NoMatchError("production '" + std::string(name) +
                       "' does not match the current state");
}

std::string Engine::state_digest() const {
    std::string out;
    for (const Chunk& c : model_.memory.chunks()) {
        out += "chunk " + c.name + " kind=" + c.kind;
        for (const auto& [slot, value] : c.slots)
            out += " " + slot + "=" + model_.memory.display(value);
        out += " events=";
        for (const UsageEvent& e : c.events)
            out += "(" + format_number(e.time) + "," + format_number(e.decay) + ")";
        out += '\n';
    }
    for (const Production& p : model_.productions.all()) {
        out += "prod " + p.name + " fires=";
        for (const UsageEvent& e : p.fire_events)
            out += "(" + format_number(e.time) + "," + format_number(e.decay) + ")";
        out += " q=" + format_number(p.utility.q_alpha) + "/" +
               format_number(p.utility.q_beta);
        out += " cost=" + format_number(p.utility.cost_sum) + "/" +
               std::to_string(p.utility.cost_n);
        out += '\n';
    }
    out += "assoc firings=" + std::to_string(assoc_.firings());
    std::vector<std::string> entries;
    for (const Chunk& ci : model_.memory.chunks()) {
        if (assoc_.fire_total(ci.id) > 0)
            entries.push_back("N(" + ci.name +
                              ")=" + std::to_string(assoc_.fire_total(ci.id)));
        if (assoc_.context_count(ci.id) > 0)
            entries.push_back("C(" + ci.name +
                              ")=" + std::to_string(assoc_.context_count(ci.id)));
        for (const Chunk& cj : model_.memory.chunks())
            if (assoc_.fire_with(ci.id, cj.id) > 0)
                entries.push_back("NC(" + ci.name + "," + cj.name + ")=" +
                                  std::to_string(assoc_.fire_with(ci.id, cj.id)));
    }
    for (const std::string& e : entries) out += " " + e;
    out += '\n';
    out += "stack=";
    for (const GoalEntry& g : stack_) out += display_chunk_name(g.id) + ",";
    out += "\nenv=";
    for (const ExternalWrite& w : environment_) {
        out += w.name + "(";
        for (const auto& [key, value] : w.args)
            out += key + "=" + model_.memory.display(value) + ";";
        out += ")";
    }
    out += '\n';
    return out;
}

Engine replay_fired_sequence(Model model, const Trace& recorded) {
    std::vector<Engine::ForcedFire> forced;
    for (const TraceEvent& e : recorded.events) {
        if (e.kind != TraceKind::Fired) continue;
        Engine::ForcedFire f;
        const std::string* name = e.field("production");
        if (!name) throw ParseError("Fired event lacks production field");
        f.production = *name;
        f.time = e.time;
        for (const auto& [key, value] : e.payload)
            if (key.rfind("b.", 0) == 0) f.bindings[key.substr(2)] = value;
        forced.push_back(std::move(f));
    }
    Engine engine(std::move(model));
    engine.forced_ = std::move(forced);
    const size_t n = engine.forced_->size();
    for (size_t i = 0; i < n && engine.step(); ++i) {
    }
    return engine;
}

}  // namespace actr
