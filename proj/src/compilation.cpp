#include "actr/compilation.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>

namespace actr {

namespace {

SlotValue parse_payload_value(const Memory& memory, const std::string& text) {
    if (!text.empty() && text[0] == '@') {
        const ChunkId id = memory.find(text.substr(1));
        if (id == kNoChunk)
            throw EpisodeError("trace references unknown chunk '" + text + "'");
        return ChunkRef{id};
    }
    const char* b = text.c_str();
    double v = 0.0;
    auto [p, ec] = std::from_chars(b, b + text.size(), v);
    if (ec == std::errc{} && p == b + text.size()) return v;
    return text;
}

bool slot_values_equal(const SlotValue& a, const SlotValue& b) {
    return !slot_value_less(a, b) && !slot_value_less(b, a);
}

ExprPtr constant_expr(const SlotValue& v) {
    if (const auto* n = std::get_if<double>(&v)) return make_number(*n);
    if (const auto* s = std::get_if<std::string>(&v)) return make_symbol(*s);
    return make_chunk_ref(std::get<ChunkRef>(v).id);
}

/// Does a recorded goal event satisfy the selection pattern? Variables are
/// treated as wildcards here; this only selects the episode.
bool event_matches_pattern(const TraceEvent& e, const Pattern& pat,
                           const Memory& memory) {
    const std::string* kind = e.field("kind");
    if (!kind || *kind != pat.kind) return false;
    for (const auto& [slot, sp] : pat.slots) {
        const std::string* have = e.field("s." + slot);
        if (!have) return false;
        if (sp.kind == SlotPattern::Kind::Constant &&
            !slot_values_equal(parse_payload_value(memory, *have), sp.constant))
            return false;
    }
    return true;
}

}  // namespace

Production proceduralize(const Trace& trace, const Pattern& goal_pattern,
                         const Model& model, std::string new_name) {
    const auto& events = trace.events;
    size_t start = events.size();
    for (size_t i = 0; i < events.size(); ++i) {
        if (events[i].kind == TraceKind::GoalPushed &&
            event_matches_pattern(events[i], goal_pattern, model.memory)) {
            start = i;
            break;
        }
    }
    if (start == events.size())
        throw EpisodeError("no pushed goal matches kind '" + goal_pattern.kind + "'");

    // Walk to the balancing pop of the selected goal.
    int depth = 1;
    size_t end = start;
    for (size_t i = start + 1; i < events.size(); ++i) {
        if (events[i].kind == TraceKind::GoalPushed) ++depth;
        if (events[i].kind == TraceKind::GoalPopped && --depth == 0) {
            end = i;
            break;
        }
    }
    if (end == start)
        throw EpisodeError("episode for goal '" + goal_pattern.kind +
                           "' is incomplete (no balancing pop)");

    Production out;
    out.name = std::move(new_name);
    out.strength_B = model.params.strength.B;
    out.utility = UtilityStats::from(model.params.utility);

    // Precondition: the episode's initial goal with every value hard-coded.
    Pattern pre;
    pre.kind = *events[start].field("kind");
    for (const auto& [key, value] : events[start].payload) {
        if (key.rfind("s.", 0) != 0) continue;
        SlotPattern sp;
        sp.kind = SlotPattern::Kind::Constant;
        sp.constant = parse_payload_value(model.memory, value);
        pre.slots.emplace_back(key.substr(2), sp);
    }
    out.preconditions.push_back(std::move(pre));

    // Actions: the episode's external writes, then the pop that closed it.
    for (size_t i = start; i <= end; ++i) {
        if (events[i].kind != TraceKind::ExternalAction) continue;
        EmitExternal emit;
        emit.name = *events[i].field("name");
        for (const auto& [key, value] : events[i].payload) {
            if (key.rfind("a.", 0) != 0) continue;
            emit.args.emplace_back(key.substr(2),
                                   constant_expr(parse_payload_value(model.memory, value)));
        }
        out.actions.emplace_back(std::move(emit));
    }
    out.actions.emplace_back(PopGoal{});
    return out;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

namespace {

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
    if (const auto* v = std::get_if<VarRef>(&e->node)) {
        auto it = sub.find(v->name);
        return it == sub.end() ? e : it->second;
    }
    if (const auto* bin = std::get_if<BinaryExpr>(&e->node)) {
        ExprPtr l = substitute(bin->lhs, sub);
        ExprPtr r = substitute(bin->rhs, sub);
        if (l == bin->lhs && r == bin->rhs) return e;
        return make_binary(bin->op, std::move(l), std::move(r));
    }
    return e;
}

void collect_production_vars(const Production& p, std::set<std::string>& out) {
    for (const Pattern& pat : p.preconditions) {
        if (!pat.id_var.empty()) out.insert(pat.id_var);
        for (const auto& [slot, sp] : pat.slots)
            if (sp.kind == SlotPattern::Kind::Variable) out.insert(sp.var);
    }
    for (const Guard& g : p.guards)
        if (g.kind == Guard::Kind::Bind) out.insert(g.bind_var);
}

std::string fresh_name(std::string base, std::set<std::string>& used) {
    std::string name = std::move(base);
    int suffix = 2;
    while (used.count(name)) name = name + "_" + std::to_string(suffix++);
    used.insert(name);
    return name;
}

/// Renames every variable of `p` that clashes with `used`.
Production rename_apart(const Production& p, std::set<std::string>& used) {
    std::map<std::string, std::string> renames;
    std::set<std::string> own;
    collect_production_vars(p, own);
    for (const std::string& v : own) {
        if (used.count(v)) {
            renames[v] = fresh_name(v, used);
        } else {
            used.insert(v);
        }
    }
    if (renames.empty()) return p;

    std::map<std::string, ExprPtr> sub;
    for (const auto& [from, to] : renames) sub[from] = make_var(to);
    auto rn = [&](const std::string& v) {
        auto it = renames.find(v);
        return it == renames.end() ? v : it->second;
    };
    Production out = p;
    for (Pattern& pat : out.preconditions) {
        if (!pat.id_var.empty()) pat.id_var = rn(pat.id_var);
        for (auto& [slot, sp] : pat.slots)
            if (sp.kind == SlotPattern::Kind::Variable) sp.var = rn(sp.var);
    }
    for (Guard& g : out.guards) {
        if (g.kind == Guard::Kind::Bind) g.bind_var = rn(g.bind_var);
        if (g.lhs) g.lhs = substitute(g.lhs, sub);
        if (g.rhs) g.rhs = substitute(g.rhs, sub);
        for (auto& [slot, e] : g.query.slots) e = substitute(e, sub);
    }
    for (Action& a : out.actions) {
        if (auto* push = std::get_if<PushGoal>(&a))
            for (auto& [slot, e] : push->goal.slots) e = substitute(e, sub);
        if (auto* write = std::get_if<WriteChunk>(&a))
            for (auto& [slot, e] : write->chunk.slots) e = substitute(e, sub);
        if (auto* set = std::get_if<SetSlot>(&a)) {
            set->target_var = rn(set->target_var);
            for (auto& [slot, e] : set->slots) e = substitute(e, sub);
        }
        if (auto* emit = std::get_if<EmitExternal>(&a))
            for (auto& [key, e] : emit->args) e = substitute(e, sub);
    }
    return out;
}

/// Symbolic chunk of p_a's post-state. Slots map to expressions over the
/// composite's variables; nullopt means unconstrained (pattern wildcard).
struct Product {
    std::string kind;
    std::vector<std::pair<std::string, std::optional<ExprPtr>>> slots;
    int pattern_index = -1;  // composite precondition it came from, or
    int write_index = -1;    // index of the producing WriteChunk action
    std::string id_var;
    bool consumed = false;
    bool write_folded = false;
};

std::optional<ExprPtr>* find_slot(Product& p, const std::string& name) {
    for (auto& [slot, e] : p.slots)
        if (slot == name) return &e;
    return nullptr;
}

bool exprs_definitely_equal(const ExprPtr& a, const SlotValue& want) {
    if (const auto* n = std::get_if<double>(&a->node))
        return std::holds_alternative<double>(want) && *n == std::get<double>(want);
    if (const auto* s = std::get_if<std::string>(&a->node))
        return std::holds_alternative<std::string>(want) &&
               *s == std::get<std::string>(want);
    if (const auto* r = std::get_if<ChunkRef>(&a->node))
        return std::holds_alternative<ChunkRef>(want) &&
               r->id == std::get<ChunkRef>(want).id;
    return false;  // contains variables: cannot verify statically
}

void collect_expr_vars_of(const Production& p, std::set<std::string>& out) {
    std::vector<std::string> vars;
    for (const Guard& g : p.guards) {
        if (g.lhs) collect_vars(*g.lhs, vars);
        if (g.rhs) collect_vars(*g.rhs, vars);
        for (const auto& [slot, e] : g.query.slots) collect_vars(*e, vars);
    }
    for (const Action& a : p.actions) {
        if (const auto* push = std::get_if<PushGoal>(&a))
            for (const auto& [slot, e] : push->goal.slots) collect_vars(*e, vars);
        if (const auto* write = std::get_if<WriteChunk>(&a))
            for (const auto& [slot, e] : write->chunk.slots) collect_vars(*e, vars);
        if (const auto* set = std::get_if<SetSlot>(&a))
            for (const auto& [slot, e] : set->slots) collect_vars(*e, vars);
        if (const auto* emit = std::get_if<EmitExternal>(&a))
            for (const auto& [key, e] : emit->args) collect_vars(*e, vars);
    }
    out.insert(vars.begin(), vars.end());
}

}  // namespace

Production compose(const Production& p_a, const Production& p_b,
                   const Model& model, std::string new_name) {
    if (p_a.preconditions.empty() || p_b.preconditions.empty())
        throw CompositionError("both productions need preconditions");

    std::set<std::string> used;
    collect_production_vars(p_a, used);
    const Production b = rename_apart(p_b, used);

    Production out;
    out.name = std::move(new_name);
    out.strength_B = model.params.strength.B;
    out.utility = UtilityStats::from(model.params.utility);
    out.preconditions = p_a.preconditions;
    out.guards = p_a.guards;
    out.actions = p_a.actions;

    // --- p_a's symbolic post-state ----------------------------------------
    std::vector<Product> products;
    for (size_t i = 0; i < out.preconditions.size(); ++i) {
        const Pattern& pat = out.preconditions[i];
        Product prod;
        prod.kind = pat.kind;
        prod.pattern_index = static_cast<int>(i);
        prod.id_var = pat.id_var;
        for (const auto& [slot, sp] : pat.slots) {
            switch (sp.kind) {
                case SlotPattern::Kind::Constant:
                    prod.slots.emplace_back(slot, constant_expr(sp.constant));
                    break;
                case SlotPattern::Kind::Variable:
                    prod.slots.emplace_back(slot, make_var(sp.var));
                    break;
                case SlotPattern::Kind::Wildcard:
                    prod.slots.emplace_back(slot, std::nullopt);
                    break;
            }
        }
        products.push_back(std::move(prod));
    }

    // Goal chain: -1 is "p_a's own goal, unchanged", >= 0 indexes a pushed
    // template, -2 is statically unknown (p_a popped below its goal).
    int goal_state = -1;
    std::vector<const ChunkTemplate*> pushed;
    for (size_t i = 0; i < out.actions.size(); ++i) {
        const Action& a = out.actions[i];
        if (const auto* push = std::get_if<PushGoal>(&a)) {
            pushed.push_back(&push->goal);
            goal_state = static_cast<int>(pushed.size()) - 1;
        } else if (std::get_if<PopGoal>(&a)) {
            goal_state = -2;
        } else if (const auto* set = std::get_if<SetSlot>(&a)) {
            for (Product& prod : products) {
                if (prod.pattern_index >= 0 && !prod.id_var.empty() &&
                    prod.id_var == set->target_var) {
                    for (const auto& [slot, e] : set->slots) {
                        if (auto* have = find_slot(prod, slot)) *have = e;
                        else prod.slots.emplace_back(slot, e);
                    }
                }
            }
        } else if (const auto* write = std::get_if<WriteChunk>(&a)) {
            Product prod;
            prod.kind = write->chunk.kind;
            prod.write_index = static_cast<int>(i);
            for (const auto& [slot, e] : write->chunk.slots)
                prod.slots.emplace_back(slot, e);
            products.push_back(std::move(prod));
        }
    }

    std::map<std::string, ExprPtr> beta;     // p_b vars -> composite exprs
    std::map<std::string, int> beta_chunks;  // p_b id vars -> product index
    std::set<std::string> composite_vars = used;

    // Feasibility check followed by an apply step, so failed unification
    // attempts leave the composite untouched.
    auto unify_against = [&](const Pattern& pat, size_t product_index) -> bool {
        Product& prod = products[product_index];
        if (pat.kind != prod.kind) return false;
        // check
        std::map<std::string, ExprPtr> trial;
        for (const auto& [slot, sp] : pat.slots) {
            if (sp.kind == SlotPattern::Kind::Wildcard) continue;
            auto* have = find_slot(prod, slot);
            const bool opaque = !have || !have->has_value();
            if (opaque && prod.write_index >= 0)
                return false;  // written chunks have exactly their template slots
            if (sp.kind == SlotPattern::Kind::Constant) {
                if (!opaque && !exprs_definitely_equal(**have, sp.constant))
                    return false;
            } else {
                if (!opaque) {
                    auto it = trial.find(sp.var);
                    if (it != trial.end() && it->second != **have) return false;
                    trial.emplace(sp.var, **have);
                }
            }
        }
        // apply
        for (const auto& [slot, sp] : pat.slots) {
            if (sp.kind == SlotPattern::Kind::Wildcard) continue;
            auto* have = find_slot(prod, slot);
            const bool opaque = !have || !have->has_value();
            if (!opaque) {
                if (sp.kind == SlotPattern::Kind::Variable) beta[sp.var] = **have;
                continue;
            }
            // Unconstrained pattern slot: constrain the composite's own
            // precondition so the requirement carries through.
            Pattern& base = out.preconditions[static_cast<size_t>(prod.pattern_index)];
            SlotPattern nsp;
            ExprPtr symbolic;
            if (sp.kind == SlotPattern::Kind::Constant) {
                nsp.kind = SlotPattern::Kind::Constant;
                nsp.constant = sp.constant;
                symbolic = constant_expr(sp.constant);
            } else {
                nsp.kind = SlotPattern::Kind::Variable;
                nsp.var = fresh_name("v_" + slot, composite_vars);
                symbolic = make_var(nsp.var);
                beta[sp.var] = symbolic;
            }
            bool placed = false;
            for (auto& [s, base_sp] : base.slots)
                if (s == slot) {
                    base_sp = nsp;
                    placed = true;
                    break;
                }
            if (!placed) base.slots.emplace_back(slot, nsp);
            if (have) *have = symbolic;
            else prod.slots.emplace_back(slot, symbolic);
        }
        if (!pat.id_var.empty()) {
            if (prod.pattern_index >= 0) {
                if (prod.id_var.empty()) {
                    prod.id_var = fresh_name("c" + std::to_string(product_index),
                                             composite_vars);
                    out.preconditions[static_cast<size_t>(prod.pattern_index)].id_var =
                        prod.id_var;
                }
                beta[pat.id_var] = make_var(prod.id_var);
            }
            beta_chunks[pat.id_var] = static_cast<int>(product_index);
        }
        prod.consumed = true;
        return true;
    };

    // The goal position must chain.
    const Pattern& b_goal = b.preconditions[0];
    if (goal_state == -2)
        throw CompositionError("'" + p_a.name +
                               "' pops to a goal that is unknown at composition time");
    if (goal_state == -1) {
        if (!unify_against(b_goal, 0))
            throw CompositionError("goal pattern of '" + p_b.name +
                                   "' does not chain from '" + p_a.name + "'");
    } else {
        const ChunkTemplate& tmpl = *pushed[static_cast<size_t>(goal_state)];
        if (b_goal.kind != tmpl.kind)
            throw CompositionError("pushed goal kind '" + tmpl.kind +
                                   "' does not satisfy '" + b_goal.kind + "'");
        if (!b_goal.id_var.empty())
            throw CompositionError("cannot bind the id of a not-yet-created goal");
        for (const auto& [slot, sp] : b_goal.slots) {
            if (sp.kind == SlotPattern::Kind::Wildcard) continue;
            const ExprPtr* have = nullptr;
            for (const auto& [s, e] : tmpl.slots)
                if (s == slot) have = &e;
            if (!have)
                throw CompositionError("pushed goal lacks slot '" + slot + "'");
            if (sp.kind == SlotPattern::Kind::Constant) {
                if (!exprs_definitely_equal(*have, sp.constant))
                    throw CompositionError(
                        "pushed goal slot '" + slot +
                        "' cannot be shown equal to the required constant");
            } else {
                beta[sp.var] = *have;
            }
        }
    }

    // Remaining p_b patterns: unify against a same-kind product, or carry
    // them over when p_a does not touch that kind at all.
    for (size_t i = 1; i < b.preconditions.size(); ++i) {
        const Pattern& pat = b.preconditions[i];
        bool unified = false;
        bool kind_seen = false;
        for (size_t pi = 0; pi < products.size(); ++pi) {
            if (products[pi].kind != pat.kind) continue;
            kind_seen = true;
            if (unify_against(pat, pi)) {
                unified = true;
                break;
            }
        }
        if (unified) continue;
        if (kind_seen)
            throw CompositionError("'" + p_b.name + "' needs a '" + pat.kind +
                                   "' chunk in a state '" + p_a.name +
                                   "' never produces");
        out.preconditions.push_back(pat);
    }

    // Chunk ids of chunks p_a writes do not exist at match time, so p_b may
    // not use them inside expressions.
    std::set<std::string> b_expr_vars;
    collect_expr_vars_of(b, b_expr_vars);
    for (const auto& [var, pi] : beta_chunks) {
        if (products[static_cast<size_t>(pi)].write_index >= 0 &&
            b_expr_vars.count(var) && !beta.count(var))
            throw CompositionError("?" + var +
                                   " names a chunk that does not exist when the "
                                   "composite matches");
    }

    // --- append p_b's guards and actions, rewritten ------------------------
    for (const Guard& g : b.guards) {
        Guard ng = g;
        if (ng.kind == Guard::Kind::Bind) composite_vars.insert(ng.bind_var);
        if (ng.lhs) ng.lhs = simplify_expr(substitute(ng.lhs, beta));
        if (ng.rhs) ng.rhs = simplify_expr(substitute(ng.rhs, beta));
        for (auto& [slot, e] : ng.query.slots) e = simplify_expr(substitute(e, beta));
        out.guards.push_back(std::move(ng));
    }

    for (const Action& a : b.actions) {
        if (const auto* set = std::get_if<SetSlot>(&a)) {
            auto chunk_it = beta_chunks.find(set->target_var);
            if (chunk_it == beta_chunks.end())
                throw CompositionError("set target ?" + set->target_var +
                                       " is not tied to a chunk of the first "
                                       "production's state");
            Product& prod = products[static_cast<size_t>(chunk_it->second)];
            std::vector<std::pair<std::string, ExprPtr>> rewritten;
            for (const auto& [slot, e] : set->slots)
                rewritten.emplace_back(slot, simplify_expr(substitute(e, beta)));
            if (prod.write_index >= 0) {
                // Fold the update into the producing write.
                auto& write = std::get<WriteChunk>(
                    out.actions[static_cast<size_t>(prod.write_index)]);
                for (auto& [slot, e] : rewritten) {
                    bool done = false;
                    for (auto& [s, we] : write.chunk.slots)
                        if (s == slot) {
                            we = e;
                            done = true;
                        }
                    if (!done) write.chunk.slots.emplace_back(slot, e);
                }
                prod.write_folded = true;
            } else {
                // Merge with p_a's set on the same chunk, if there is one.
                SetSlot* target = nullptr;
                for (Action& prev : out.actions)
                    if (auto* ps = std::get_if<SetSlot>(&prev))
                        if (ps->target_var == prod.id_var) target = ps;
                if (target) {
                    for (auto& [slot, e] : rewritten) {
                        bool done = false;
                        for (auto& [s, te] : target->slots)
                            if (s == slot) {
                                te = e;
                                done = true;
                            }
                        if (!done) target->slots.emplace_back(slot, e);
                    }
                } else {
                    SetSlot ns;
                    ns.target_var = prod.id_var;
                    ns.slots = std::move(rewritten);
                    out.actions.emplace_back(std::move(ns));
                }
            }
        } else if (const auto* push = std::get_if<PushGoal>(&a)) {
            PushGoal np = *push;
            for (auto& [slot, e] : np.goal.slots)
                e = simplify_expr(substitute(e, beta));
            out.actions.emplace_back(std::move(np));
        } else if (const auto* write = std::get_if<WriteChunk>(&a)) {
            WriteChunk nw = *write;
            for (auto& [slot, e] : nw.chunk.slots)
                e = simplify_expr(substitute(e, beta));
            out.actions.emplace_back(std::move(nw));
        } else if (const auto* emit = std::get_if<EmitExternal>(&a)) {
            EmitExternal ne = *emit;
            for (auto& [key, e] : ne.args) e = simplify_expr(substitute(e, beta));
            out.actions.emplace_back(std::move(ne));
        } else {
            out.actions.emplace_back(a);  // PopGoal
        }
    }

    // Simplify p_a-side action expressions as well.
    for (Action& a : out.actions) {
        if (auto* set = std::get_if<SetSlot>(&a))
            for (auto& [slot, e] : set->slots) e = simplify_expr(e);
        if (auto* write = std::get_if<WriteChunk>(&a))
            for (auto& [slot, e] : write->chunk.slots) e = simplify_expr(e);
        if (auto* push = std::get_if<PushGoal>(&a))
            for (auto& [slot, e] : push->goal.slots) e = simplify_expr(e);
        if (auto* emit = std::get_if<EmitExternal>(&a))
            for (auto& [key, e] : emit->args) e = simplify_expr(e);
    }

    // Elide intermediate chunks: written by p_a, consumed by p_b, no update
    // folded back in.
    std::vector<size_t> removable;
    for (const Product& prod : products)
        if (prod.write_index >= 0 && prod.consumed && !prod.write_folded)
            removable.push_back(static_cast<size_t>(prod.write_index));
    std::sort(removable.rbegin(), removable.rend());
    for (size_t idx : removable)
        out.actions.erase(out.actions.begin() + static_cast<std::ptrdiff_t>(idx));

    return out;
}

}  // namespace actr
