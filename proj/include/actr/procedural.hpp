#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "actr/association.hpp"
#include "actr/declarative.hpp"
#include "actr/utility.hpp"

namespace actr {

// ---------------------------------------------------------------------------
// Expression language: arithmetic over bound variables, used by guards and
// action templates.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { Add, Sub, Mul, Div, Mod };

struct VarRef {
    std::string name;  // without the leading '?'
};

struct BinaryExpr {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Expr {
    std::variant<double, std::string /*symbol*/, ChunkRef, VarRef, BinaryExpr> node;
};

ExprPtr make_number(double v);
ExprPtr make_symbol(std::string s);
ExprPtr make_chunk_ref(ChunkId id);
ExprPtr make_var(std::string name);
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs);

/// Variable bindings; the ordered map gives a canonical iteration order.
using Bindings = std::map<std::string, SlotValue>;

/// Evaluates an expression under bindings. Arithmetic requires numeric
/// operands; unbound variables and symbol arithmetic throw DomainError.
SlotValue eval_expr(const Expr& e, const Bindings& bindings);

/// Collects variable names referenced by an expression.
void collect_vars(const Expr& e, std::vector<std::string>& out);

/// Folds constant subtrees and merges multiplicative constant chains, e.g.
/// (x * 5) / 4 becomes x * 1.25. Used by production composition.
ExprPtr simplify_expr(const ExprPtr& e);

std::string print_expr(const Expr& e, const Memory* memory = nullptr);

// ---------------------------------------------------------------------------
// Patterns, guards and actions.
// ---------------------------------------------------------------------------

/// One slot constraint of a pattern.
struct SlotPattern {
    enum class Kind { Constant, Variable, Wildcard };
    Kind kind = Kind::Wildcard;
    SlotValue constant{0.0};  // Kind::Constant
    std::string var;          // Kind::Variable
};

/// Precondition pattern: a chunk kind plus slot constraints. `id_var`, when
/// non-empty, binds the matched chunk's id (needed by set actions).
struct Pattern {
    std::string kind;
    std::string id_var;
    std::vector<std::pair<std::string, SlotPattern>> slots;
};

/// Kind plus slot expressions; instantiated into concrete slots at fire
/// time. Also the query form of existence guards.
struct ChunkTemplate {
    std::string kind;
    std::vector<std::pair<std::string, ExprPtr>> slots;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

/// Guards run after all patterns bound, in order. Bind introduces a new
/// variable; Compare filters; Exists/Absent query memory for a chunk whose
/// slots equal the evaluated template.
struct Guard {
    enum class Kind { Bind, Compare, Exists, Absent };
    Kind kind = Kind::Compare;
    std::string bind_var;  // Bind
    ExprPtr lhs;           // Bind (value), Compare
    ExprPtr rhs;           // Compare
    CmpOp op = CmpOp::Eq;  // Compare
    ChunkTemplate query;   // Exists / Absent
};

struct PushGoal {
    ChunkTemplate goal;
};
struct PopGoal {};
struct WriteChunk {
    ChunkTemplate chunk;
};
struct SetSlot {
    std::string target_var;  // must be bound to a chunk
    std::vector<std::pair<std::string, ExprPtr>> slots;
};
struct EmitExternal {
    std::string name;
    std::vector<std::pair<std::string, ExprPtr>> args;
};

using Action = std::variant<PushGoal, PopGoal, WriteChunk, SetSlot, EmitExternal>;

// ---------------------------------------------------------------------------
// Productions and matching.
// ---------------------------------------------------------------------------

struct Production {
    int id = -1;  // assigned by ProductionSet; declaration order
    std::string name;
    std::vector<Pattern> preconditions;  // [0] matches the current goal
    std::vector<Guard> guards;
    std::vector<Action> actions;
    std::vector<UsageEvent> fire_events;
    UtilityStats utility;
    double strength_B = 0.0;
};

class ProductionSet {
public:
    int add(Production p);  // assigns id, returns it
    const std::vector<Production>& all() const { return productions_; }
    std::vector<Production>& all() { return productions_; }
    const Production* by_name(std::string_view name) const;
    Production* by_name(std::string_view name);
    const Production& at(int id) const { return productions_.at(static_cast<size_t>(id)); }
    Production& at(int id) { return productions_.at(static_cast<size_t>(id)); }
    size_t size() const { return productions_.size(); }

private:
    std::vector<Production> productions_;
};

/// A matched production with consistent variable bindings.
struct Instantiation {
    int production_id = -1;
    Bindings bindings;
    std::vector<ChunkId> matched;  // sorted, unique
    Time available_time = 0.0;     // cycle start
    Time match_time = 0.0;         // available_time + match latency
};

/// Canonical "var=value|..." form, the lexicographic ordering key.
std::string bindings_key(const Bindings& b);

/// S(t) over fire events with constant decay; `params.initial` when the
/// production has never fired.
double production_strength(const Production& p, const StrengthParams& params,
                           Time now);

/// Appends a fire event (constant decay). Throws OrderingError if `now`
/// precedes the last fire event.
void record_fire(Production& p, const StrengthParams& params, Time now);

/// L = sum over matched chunks of B * e^(-b * (A_i + S)); 0 for an empty
/// set, +infinity if any A_i is -infinity.
Time match_latency(const Memory& memory, const std::vector<ChunkId>& matched,
                   double strength, const LatencyParams& params,
                   const Context& context, const AssociativeSource& assoc,
                   Time now);

/// Returns every instantiation whose patterns unify against the goal chunk
/// (pattern 0) and declarative memory (the rest), with all guards satisfied.
/// Matching is exhaustive re-evaluation; the result is sorted by
/// (production id, lexicographic bindings) and carries match times.
std::vector<Instantiation> match(const Memory& memory, ChunkId goal,
                                 const ProductionSet& productions, Time now,
                                 const LatencyParams& latency_params,
                                 const StrengthParams& strength_params,
                                 const Context& context,
                                 const AssociativeSource& assoc);

/// Guard evaluation against bindings and memory, shared by the matcher and
/// the composition checker. Bind guards extend `b`.
bool eval_guard(const Guard& g, Bindings& b, const Memory& memory);

}  // namespace actr
