#include "actr/procedural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace actr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

ExprPtr make_number(double v) { return std::make_shared<Expr>(Expr{v}); }
ExprPtr make_symbol(std::string s) { return std::make_shared<Expr>(Expr{std::move(s)}); }
ExprPtr make_chunk_ref(ChunkId id) { return std::make_shared<Expr>(Expr{ChunkRef{id}}); }
ExprPtr make_var(std::string name) {
    return std::make_shared<Expr>(Expr{VarRef{std::move(name)}});
}
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(Expr{BinaryExpr{op, std::move(lhs), std::move(rhs)}});
}

SlotValue eval_expr(const Expr& e, const Bindings& bindings) {
    struct Visitor {
        const Bindings& b;
        SlotValue operator()(double v) const { return v; }
        SlotValue operator()(const std::string& s) const { return s; }
        SlotValue operator()(const ChunkRef& r) const { return r; }
        SlotValue operator()(const VarRef& v) const {
            auto it = b.find(v.name);
            if (it == b.end())
                throw DomainError("unbound variable ?" + v.name);
            return it->second;
        }
        SlotValue operator()(const BinaryExpr& bin) const {
            const SlotValue l = eval_expr(*bin.lhs, b);
            const SlotValue r = eval_expr(*bin.rhs, b);
            const double* ln = std::get_if<double>(&l);
            const double* rn = std::get_if<double>(&r);
            if (!ln || !rn)
                throw DomainError("arithmetic requires numeric operands");
            switch (bin.op) {
                case BinOp::Add: return *ln + *rn;
                case BinOp::Sub: return *ln - *rn;
                case BinOp::Mul: return *ln * *rn;
                case BinOp::Div: return *ln / *rn;
                case BinOp::Mod: return std::fmod(*ln, *rn);
            }
            throw DomainError("bad operator");
        }
    };
    return std::visit(Visitor{bindings}, e.node);
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
    if (const auto* v = std::get_if<VarRef>(&e.node)) {
        out.push_back(v->name);
    } else if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
        collect_vars(*bin->lhs, out);
        collect_vars(*bin->rhs, out);
    }
}

namespace {

const double* as_number(const Expr& e) { return std::get_if<double>(&e.node); }

}  // namespace

ExprPtr simplify_expr(const ExprPtr& e) {
    const auto* bin = std::get_if<BinaryExpr>(&e->node);
    if (!bin) return e;
    ExprPtr lhs = simplify_expr(bin->lhs);
    ExprPtr rhs = simplify_expr(bin->rhs);
    const double* ln = as_number(*lhs);
    const double* rn = as_number(*rhs);
    if (ln && rn) {  // constant subtree
        Bindings none;
        return make_number(
            std::get<double>(eval_expr(*make_binary(bin->op, lhs, rhs), none)));
    }
    // Merge multiplicative constant chains: (x * a) * b -> x * (a*b),
    // (x * a) / b -> x * (a/b), and keep the constant on the right.
    auto mul_parts = [](const ExprPtr& n) -> std::pair<ExprPtr, double> {
        if (const auto* b2 = std::get_if<BinaryExpr>(&n->node)) {
            if (b2->op == BinOp::Mul) {
                if (const double* c = as_number(*b2->rhs)) return {b2->lhs, *c};
                if (const double* c = as_number(*b2->lhs)) return {b2->rhs, *c};
            }
        }
        return {n, 1.0};
    };
    if (bin->op == BinOp::Mul && ln) {
        auto [rcore, rc] = mul_parts(rhs);
        return make_binary(BinOp::Mul, rcore, make_number(*ln * rc));
    }
    if ((bin->op == BinOp::Mul || bin->op == BinOp::Div) && rn) {
        auto [lcore, lc] = mul_parts(lhs);
        const double factor = bin->op == BinOp::Mul ? *rn : 1.0 / *rn;
        const double merged = lc * factor;
        if (merged == 1.0) return lcore;
        return make_binary(BinOp::Mul, lcore, make_number(merged));
    }
    if (lhs == bin->lhs && rhs == bin->rhs) return e;
    return make_binary(bin->op, std::move(lhs), std::move(rhs));
}

namespace {

int precedence(BinOp op) {
    switch (op) {
        case BinOp::Add:
        case BinOp::Sub: return 1;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 2;
    }
    return 0;
}

const char* op_text(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
    }
    return "?";
}

void print_expr_rec(const Expr& e, const Memory* memory, int parent_prec,
                    bool right_side, std::string& out) {
    struct Visitor {
        const Memory* memory;
        int parent_prec;
        bool right_side;
        std::string& out;
        void operator()(double v) const {
            if (v < 0) {
                out += '(';
                out += format_number(v);
                out += ')';
            } else {
                out += format_number(v);
            }
        }
        void operator()(const std::string& s) const { out += s; }
        void operator()(const ChunkRef& r) const {
            if (memory && memory->has(r.id)) {
                out += '@';
                out += memory->name_of(r.id);
            } else {
                out += "@#" + std::to_string(r.id);
            }
        }
        void operator()(const VarRef& v) const {
            out += '?';
            out += v.name;
        }
        void operator()(const BinaryExpr& bin) const {
            const int prec = precedence(bin.op);
            const bool parens = prec < parent_prec || (prec == parent_prec && right_side);
            if (parens) out += '(';
            print_expr_rec(*bin.lhs, memory, prec, false, out);
            out += op_text(bin.op);
            print_expr_rec(*bin.rhs, memory, prec, true, out);
            if (parens) out += ')';
        }
    };
    std::visit(Visitor{memory, parent_prec, right_side, out}, e.node);
}

}  // namespace

std::string print_expr(const Expr& e, const Memory* memory) {
    std::string out;
    print_expr_rec(e, memory, 0, false, out);
    return out;
}

// ---------------------------------------------------------------------------
// Productions
// ---------------------------------------------------------------------------

int ProductionSet::add(Production p) {
    p.id = static_cast<int>(productions_.size());
    productions_.push_back(std::move(p));
    return productions_.back().id;
}

const Production* ProductionSet::by_name(std::string_view name) const {
    for (const auto& p : productions_)
        if (p.name == name) return &p;
    return nullptr;
}

Production* ProductionSet::by_name(std::string_view name) {
    for (auto& p : productions_)
        if (p.name == name) return &p;
    return nullptr;
}

std::string bindings_key(const Bindings& b) {
    std::string out;
    for (const auto& [var, value] : b) {
        out += var;
        out += '=';
        if (const auto* n = std::get_if<double>(&value)) {
            out += format_number(*n);
        } else if (const auto* s = std::get_if<std::string>(&value)) {
            out += *s;
        } else {
            out += "@#" + std::to_string(std::get<ChunkRef>(value).id);
        }
        out += '|';
    }
    return out;
}

double production_strength(const Production& p, const StrengthParams& params,
                           Time now) {
    if (p.fire_events.empty()) return params.initial;
    return base_level(p.fire_events, now, p.strength_B);
}

void record_fire(Production& p, const StrengthParams& params, Time now) {
    if (!p.fire_events.empty() && now < p.fire_events.back().time)
        throw OrderingError("fire of '" + p.name + "' at " + format_number(now) +
                            " precedes its last fire at " +
                            format_number(p.fire_events.back().time));
    p.fire_events.push_back({now, params.d});
}

Time match_latency(const Memory& memory, const std::vector<ChunkId>& matched,
                   double strength, const LatencyParams& params,
                   const Context& context, const AssociativeSource& assoc,
                   Time now) {
    Time total = 0.0;
    for (ChunkId id : matched) {
        const double a = memory.activation(id, context, assoc, now);
        if (a == -kInf) return kInf;
        total += params.B * std::exp(-params.b * (a + strength));
    }
    return total;
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

namespace {

bool slot_values_equal(const SlotValue& a, const SlotValue& b) {
    return !slot_value_less(a, b) && !slot_value_less(b, a);
}

/// Unifies one pattern against one chunk, extending `b`. Returns false
/// without side effects on mismatch (caller copies bindings per branch).
bool unify_pattern(const Pattern& pat, const Chunk& chunk, Bindings& b) {
    if (pat.kind != chunk.kind) return false;
    if (!pat.id_var.empty()) {
        const SlotValue self = ChunkRef{chunk.id};
        auto it = b.find(pat.id_var);
        if (it == b.end()) {
            b.emplace(pat.id_var, self);
        } else if (!slot_values_equal(it->second, self)) {
            return false;
        }
    }
    for (const auto& [slot_name, constraint] : pat.slots) {
        const SlotValue* have = chunk.slot(slot_name);
        if (!have) return false;
        switch (constraint.kind) {
            case SlotPattern::Kind::Wildcard:
                break;
            case SlotPattern::Kind::Constant:
                if (!slot_values_equal(*have, constraint.constant)) return false;
                break;
            case SlotPattern::Kind::Variable: {
                auto it = b.find(constraint.var);
                if (it == b.end()) {
                    b.emplace(constraint.var, *have);
                } else if (!slot_values_equal(it->second, *have)) {
                    return false;
                }
                break;
            }
        }
    }
    return true;
}

bool compare_values(CmpOp op, const SlotValue& l, const SlotValue& r) {
    const bool eq = slot_values_equal(l, r);
    if (op == CmpOp::Eq) return eq;
    if (op == CmpOp::Ne) return !eq;
    const double* ln = std::get_if<double>(&l);
    const double* rn = std::get_if<double>(&r);
    if (!ln || !rn)
        throw DomainError("ordered comparison requires numeric operands");
    switch (op) {
        case CmpOp::Lt: return *ln < *rn;
        case CmpOp::Le: return *ln <= *rn;
        case CmpOp::Gt: return *ln > *rn;
        case CmpOp::Ge: return *ln >= *rn;
        default: return false;
    }
}

bool template_matches_some_chunk(const ChunkTemplate& tmpl, const Bindings& b,
                                 const Memory& memory) {
    for (const Chunk& c : memory.chunks()) {
        if (c.kind != tmpl.kind) continue;
        bool ok = true;
        for (const auto& [slot_name, expr] : tmpl.slots) {
            const SlotValue* have = c.slot(slot_name);
            if (!have || !slot_values_equal(*have, eval_expr(*expr, b))) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace

bool eval_guard(const Guard& g, Bindings& b, const Memory& memory) {
    switch (g.kind) {
        case Guard::Kind::Bind:
            b[g.bind_var] = eval_expr(*g.lhs, b);
            return true;
        case Guard::Kind::Compare:
            return compare_values(g.op, eval_expr(*g.lhs, b), eval_expr(*g.rhs, b));
        case Guard::Kind::Exists:
            return template_matches_some_chunk(g.query, b, memory);
        case Guard::Kind::Absent:
            return !template_matches_some_chunk(g.query, b, memory);
    }
    return false;
}

std::vector<Instantiation> match(const Memory& memory, ChunkId goal,
                                 const ProductionSet& productions, Time now,
                                 const LatencyParams& latency_params,
                                 const StrengthParams& strength_params,
                                 const Context& context,
                                 const AssociativeSource& assoc) {
    std::vector<Instantiation> out;
    const Chunk& goal_chunk = memory.chunk(goal);

    for (const Production& prod : productions.all()) {
        if (prod.preconditions.empty()) continue;
        std::vector<Instantiation> found;

        // Depth-first enumeration over chunk tuples; pattern 0 is pinned to
        // the current goal chunk.
        struct Search {
            const Memory& memory;
            const Production& prod;
            std::vector<Instantiation>& found;
            std::vector<ChunkId> picked;

            void run(size_t index, Bindings b) {
                if (index == prod.preconditions.size()) {
                    for (const Guard& g : prod.guards)
                        if (!eval_guard(g, b, memory)) return;
                    Instantiation inst;
                    inst.production_id = prod.id;
                    inst.bindings = std::move(b);
                    inst.matched = picked;
                    std::sort(inst.matched.begin(), inst.matched.end());
                    inst.matched.erase(
                        std::unique(inst.matched.begin(), inst.matched.end()),
                        inst.matched.end());
                    found.push_back(std::move(inst));
                    return;
                }
                for (const Chunk& c : memory.chunks()) {
                    Bindings branch = b;
                    if (!unify_pattern(prod.preconditions[index], c, branch))
                        continue;
                    picked.push_back(c.id);
                    run(index + 1, std::move(branch));
                    picked.pop_back();
                }
            }
        };

        Bindings root;
        if (unify_pattern(prod.preconditions[0], goal_chunk, root)) {
            Search search{memory, prod, found, {goal}};
            search.run(1, std::move(root));
        }

        std::sort(found.begin(), found.end(),
                  [](const Instantiation& a, const Instantiation& b) {
                      return bindings_key(a.bindings) < bindings_key(b.bindings);
                  });
        const double strength = production_strength(prod, strength_params, now);
        for (auto& inst : found) {
            inst.available_time = now;
            inst.match_time = now + match_latency(memory, inst.matched, strength,
                                                  latency_params, context, assoc, now);
            out.push_back(std::move(inst));
        }
    }
    return out;
}

}  // namespace actr
