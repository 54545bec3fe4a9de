#include "actr/model.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace actr {

namespace {

// ---------------------------------------------------------------------------
// Line tokenizer
// ---------------------------------------------------------------------------

struct Token {
    enum class Kind { Number, Ident, Var, Ref, Op, End };
    Kind kind = Kind::End;
    std::string text;
    double number = 0.0;
};

class Lexer {
public:
    Lexer(std::string_view line, int line_no) : line_(line), line_no_(line_no) {
        advance();
    }

    const Token& peek() const { return current_; }
    Token next() {
        Token t = current_;
        advance();
        return t;
    }
    bool at_end() const { return current_.kind == Token::Kind::End; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(line_no_, msg);
    }
    int line_no() const { return line_no_; }

    bool accept_op(std::string_view op) {
        if (current_.kind == Token::Kind::Op && current_.text == op) {
            advance();
            return true;
        }
        return false;
    }
    void expect_op(std::string_view op) {
        if (!accept_op(op))
            fail("expected '" + std::string(op) + "', found '" + current_.text + "'");
    }
    std::string expect_ident(const char* what) {
        if (current_.kind != Token::Kind::Ident)
            fail(std::string("expected ") + what + ", found '" + current_.text + "'");
        return next().text;
    }

private:
    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    void advance() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
        if (pos_ >= line_.size()) {
            current_ = {Token::Kind::End, "<end of line>", 0.0};
            return;
        }
        const char c = line_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < line_.size() &&
             std::isdigit(static_cast<unsigned char>(line_[pos_ + 1])))) {
            const char* begin = line_.data() + pos_;
            double value = 0.0;
            auto [p, ec] = std::from_chars(begin, line_.data() + line_.size(), value);
            if (ec != std::errc{}) fail("bad number");
            const size_t len = static_cast<size_t>(p - begin);
            current_ = {Token::Kind::Number, std::string(line_.substr(pos_, len)), value};
            pos_ += len;
            return;
        }
        if (ident_start(c)) {
            size_t end = pos_;
            while (end < line_.size() && ident_char(line_[end])) ++end;
            current_ = {Token::Kind::Ident, std::string(line_.substr(pos_, end - pos_)), 0.0};
            pos_ = end;
            return;
        }
        if (c == '?' || c == '@') {
            size_t end = pos_ + 1;
            if (end >= line_.size() || !ident_start(line_[end]))
                fail(std::string("expected a name after '") + c + "'");
            while (end < line_.size() && ident_char(line_[end])) ++end;
            current_ = {c == '?' ? Token::Kind::Var : Token::Kind::Ref,
                        std::string(line_.substr(pos_ + 1, end - pos_ - 1)), 0.0};
            pos_ = end;
            return;
        }
        for (std::string_view op : {":=", "==", "!=", "<=", ">="}) {
            if (line_.substr(pos_).substr(0, 2) == op) {
                current_ = {Token::Kind::Op, std::string(op), 0.0};
                pos_ += 2;
                return;
            }
        }
        static const std::string singles = "+-*/%()<>=;:,";
        if (singles.find(c) != std::string::npos) {
            current_ = {Token::Kind::Op, std::string(1, c), 0.0};
            ++pos_;
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view line_;
    int line_no_;
    size_t pos_ = 0;
    Token current_;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class ModelParser {
public:
    Model parse(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const size_t hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            size_t a = raw.find_first_not_of(" \t\r");
            if (a == std::string::npos) continue;
            size_t b = raw.find_last_not_of(" \t\r");
            const std::string line = raw.substr(a, b - a + 1);

            if (line.front() == '[') {
                if (in_rule_) throw ParseError(line_no, "section inside 'rule' block (missing 'end')");
                if (line == "[parameters]") section_ = Section::Parameters;
                else if (line == "[chunks]") section_ = Section::Chunks;
                else if (line == "[productions]") section_ = Section::Productions;
                else if (line == "[goal]") section_ = Section::Goal;
                else throw ParseError(line_no, "unknown section " + line);
                continue;
            }
            Lexer lex(line, line_no);
            switch (section_) {
                case Section::None:
                    throw ParseError(line_no, "content before any [section]");
                case Section::Parameters: parse_parameter(lex); break;
                case Section::Chunks: parse_chunk(lex); break;
                case Section::Productions: parse_production_line(lex); break;
                case Section::Goal: parse_goal(lex); break;
            }
        }
        if (in_rule_) throw ParseError(line_no, "unterminated rule '" + rule_.name + "'");
        finish();
        return std::move(model_);
    }

private:
    enum class Section { None, Parameters, Chunks, Productions, Goal };

    struct ChunkLine {
        std::string name;
        std::string kind;
        std::vector<std::pair<std::string, Token>> slots;  // raw value tokens
        int line;
    };

    void parse_parameter(Lexer& lex) {
        const std::string key = lex.expect_ident("a parameter key");
        lex.expect_op("=");
        const Token value = lex.next();
        if (value.kind == Token::Kind::End) lex.fail("missing value for '" + key + "'");
        if (!lex.at_end()) lex.fail("trailing tokens after parameter value");
        try {
            model_.params.set(key, value.text);
        } catch (const DomainError& e) {
            throw ParseError(lex.line_no(), e.what());
        }
        model_.raw_params.emplace_back(key, value.text);
    }

    void parse_chunk(Lexer& lex) {
        ChunkLine c;
        c.line = lex.line_no();
        c.name = lex.expect_ident("a chunk name");
        c.kind = lex.expect_ident("a chunk kind");
        try {
            model_.memory.declare_chunk(c.kind, 0.0, c.name);
        } catch (const ReferenceError& e) {
            throw ParseError(c.line, e.what());
        }
        while (!lex.at_end()) {
            const std::string slot = lex.expect_ident("a slot name");
            lex.expect_op("=");
            Token value = lex.next();
            if (value.kind == Token::Kind::Op && value.text == "-") {
                Token num = lex.next();
                if (num.kind != Token::Kind::Number) lex.fail("expected a number after '-'");
                num.number = -num.number;
                num.text = "-" + num.text;
                value = num;
            }
            if (value.kind != Token::Kind::Number && value.kind != Token::Kind::Ident &&
                value.kind != Token::Kind::Ref)
                lex.fail("bad slot value '" + value.text + "'");
            c.slots.emplace_back(slot, value);
        }
        chunk_lines_.push_back(std::move(c));
    }

    void parse_goal(Lexer& lex) {
        goal_name_ = lex.expect_ident("a chunk name");
        goal_line_ = lex.line_no();
        if (!lex.at_end()) lex.fail("trailing tokens after goal id");
        has_goal_ = true;
    }

    // ---- production bodies ----

    void parse_production_line(Lexer& lex) {
        const Token head = lex.peek();
        if (head.kind != Token::Kind::Ident) lex.fail("expected a rule keyword");
        if (head.text == "rule") {
            lex.next();
            if (in_rule_) lex.fail("nested 'rule' (missing 'end')");
            rule_ = Production{};
            rule_.strength_B = model_.params.strength.B;
            rule_.utility = UtilityStats::from(model_.params.utility);
            rule_.name = lex.expect_ident("a production name");
            if (model_.productions.by_name(rule_.name) || rule_names_.count(rule_.name))
                lex.fail("duplicate production name '" + rule_.name + "'");
            rule_names_.insert(rule_.name);
            bound_.clear();
            in_rule_ = true;
            return;
        }
        if (!in_rule_) lex.fail("'" + head.text + "' outside a rule block");
        if (head.text == "if") {
            lex.next();
            parse_pattern(lex);
        } else if (head.text == "guard") {
            lex.next();
            parse_guard(lex);
        } else if (head.text == "then") {
            lex.next();
            parse_actions(lex);
        } else if (head.text == "end") {
            lex.next();
            if (!lex.at_end()) lex.fail("trailing tokens after 'end'");
            if (rule_.preconditions.empty())
                lex.fail("rule '" + rule_.name + "' has no 'if' pattern");
            model_.productions.add(std::move(rule_));
            in_rule_ = false;
        } else {
            lex.fail("unknown keyword '" + head.text + "' in rule block");
        }
    }

    void parse_pattern(Lexer& lex) {
        Pattern p;
        if (lex.peek().kind == Token::Kind::Var) {
            p.id_var = lex.next().text;
            lex.expect_op(":");
            bound_.insert(p.id_var);
        }
        p.kind = lex.expect_ident("a chunk kind");
        while (!lex.at_end()) {
            const std::string slot = lex.expect_ident("a slot name");
            lex.expect_op("=");
            SlotPattern sp;
            const Token t = lex.peek();
            if (t.kind == Token::Kind::Var) {
                lex.next();
                sp.kind = SlotPattern::Kind::Variable;
                sp.var = t.text;
                bound_.insert(t.text);
            } else if (t.kind == Token::Kind::Op && t.text == "*") {
                lex.next();
                sp.kind = SlotPattern::Kind::Wildcard;
            } else {
                sp.kind = SlotPattern::Kind::Constant;
                sp.constant = parse_constant(lex);
            }
            p.slots.emplace_back(slot, sp);
        }
        rule_.preconditions.push_back(std::move(p));
    }

    SlotValue parse_constant(Lexer& lex) {
        Token t = lex.next();
        if (t.kind == Token::Kind::Op && t.text == "-") {
            Token num = lex.next();
            if (num.kind != Token::Kind::Number) lex.fail("expected a number after '-'");
            return -num.number;
        }
        if (t.kind == Token::Kind::Number) return t.number;
        if (t.kind == Token::Kind::Ident) return t.text;
        if (t.kind == Token::Kind::Ref) return pending_ref(t.text, lex.line_no());
        lex.fail("bad pattern constant '" + t.text + "'");
    }

    void parse_guard(Lexer& lex) {
        Guard g;
        const Token head = lex.peek();
        if (head.kind == Token::Kind::Ident &&
            (head.text == "exists" || head.text == "absent")) {
            lex.next();
            g.kind = head.text == "exists" ? Guard::Kind::Exists : Guard::Kind::Absent;
            g.query = parse_template(lex, /*kind_first=*/true);
            rule_.guards.push_back(std::move(g));
            return;
        }
        if (head.kind == Token::Kind::Var) {
            // Lookahead for '?v :=' (a binding); otherwise it is a comparison.
            Lexer probe = lex;
            probe.next();
            if (probe.peek().kind == Token::Kind::Op && probe.peek().text == ":=") {
                const std::string var = lex.next().text;
                lex.expect_op(":=");
                if (bound_.count(var))
                    lex.fail("variable ?" + var + " already bound");
                g.kind = Guard::Kind::Bind;
                g.bind_var = var;
                g.lhs = parse_expr(lex);
                if (!lex.at_end()) lex.fail("trailing tokens after guard");
                bound_.insert(var);
                rule_.guards.push_back(std::move(g));
                return;
            }
        }
        g.kind = Guard::Kind::Compare;
        g.lhs = parse_expr(lex);
        const Token opt = lex.next();
        if (opt.kind != Token::Kind::Op) lex.fail("expected a comparison operator");
        if (opt.text == "==" || opt.text == "=") g.op = CmpOp::Eq;
        else if (opt.text == "!=") g.op = CmpOp::Ne;
        else if (opt.text == "<") g.op = CmpOp::Lt;
        else if (opt.text == "<=") g.op = CmpOp::Le;
        else if (opt.text == ">") g.op = CmpOp::Gt;
        else if (opt.text == ">=") g.op = CmpOp::Ge;
        else lex.fail("unknown comparison '" + opt.text + "'");
        g.rhs = parse_expr(lex);
        if (!lex.at_end()) lex.fail("trailing tokens after guard");
        rule_.guards.push_back(std::move(g));
    }

    ChunkTemplate parse_template(Lexer& lex, bool kind_first) {
        ChunkTemplate t;
        if (kind_first) t.kind = lex.expect_ident("a chunk kind");
        while (!lex.at_end()) {
            if (lex.peek().kind == Token::Kind::Op && lex.peek().text == ";") break;
            const std::string slot = lex.expect_ident("a slot name");
            lex.expect_op("=");
            t.slots.emplace_back(slot, parse_expr(lex));
        }
        return t;
    }

    void parse_actions(Lexer& lex) {
        while (true) {
            const std::string verb = lex.expect_ident("an action verb");
            if (verb == "push") {
                PushGoal a;
                a.goal = parse_template(lex, true);
                rule_.actions.emplace_back(std::move(a));
            } else if (verb == "pop") {
                rule_.actions.emplace_back(PopGoal{});
            } else if (verb == "write") {
                WriteChunk a;
                a.chunk = parse_template(lex, true);
                rule_.actions.emplace_back(std::move(a));
            } else if (verb == "set") {
                SetSlot a;
                if (lex.peek().kind != Token::Kind::Var)
                    lex.fail("'set' expects a bound ?variable target");
                a.target_var = lex.next().text;
                require_bound(lex, a.target_var);
                ChunkTemplate t = parse_template(lex, false);
                a.slots = std::move(t.slots);
                if (a.slots.empty()) lex.fail("'set' needs at least one slot=value");
                rule_.actions.emplace_back(std::move(a));
            } else if (verb == "emit") {
                EmitExternal a;
                a.name = lex.expect_ident("an external action name");
                ChunkTemplate t = parse_template(lex, false);
                a.args = std::move(t.slots);
                rule_.actions.emplace_back(std::move(a));
            } else {
                lex.fail("unknown action '" + verb + "'");
            }
            if (lex.at_end()) break;
            lex.expect_op(";");
        }
    }

    void require_bound(Lexer& lex, const std::string& var) {
        if (!bound_.count(var))
            lex.fail("unbound variable ?" + var);
    }

    ExprPtr parse_expr(Lexer& lex) { return parse_additive(lex); }

    ExprPtr parse_additive(Lexer& lex) {
        ExprPtr e = parse_term(lex);
        while (lex.peek().kind == Token::Kind::Op &&
               (lex.peek().text == "+" || lex.peek().text == "-")) {
            const BinOp op = lex.next().text == "+" ? BinOp::Add : BinOp::Sub;
            e = make_binary(op, std::move(e), parse_term(lex));
        }
        return e;
    }

    ExprPtr parse_term(Lexer& lex) {
        ExprPtr e = parse_factor(lex);
        while (lex.peek().kind == Token::Kind::Op &&
               (lex.peek().text == "*" || lex.peek().text == "/" ||
                lex.peek().text == "%")) {
            const std::string op = lex.next().text;
            const BinOp b = op == "*" ? BinOp::Mul : op == "/" ? BinOp::Div : BinOp::Mod;
            e = make_binary(b, std::move(e), parse_factor(lex));
        }
        return e;
    }

    ExprPtr parse_factor(Lexer& lex) {
        const Token t = lex.next();
        switch (t.kind) {
            case Token::Kind::Number: return make_number(t.number);
            case Token::Kind::Ident: return make_symbol(t.text);
            case Token::Kind::Var: {
                require_bound(lex, t.text);
                return make_var(t.text);
            }
            case Token::Kind::Ref: {
                const SlotValue v = pending_ref(t.text, lex.line_no());
                return make_chunk_ref(std::get<ChunkRef>(v).id);
            }
            case Token::Kind::Op:
                if (t.text == "(") {
                    ExprPtr e = parse_expr(lex);
                    lex.expect_op(")");
                    return e;
                }
                if (t.text == "-") {
                    ExprPtr inner = parse_factor(lex);
                    if (const auto* n = std::get_if<double>(&inner->node))
                        return make_number(-*n);
                    return make_binary(BinOp::Sub, make_number(0.0), std::move(inner));
                }
                break;
            default: break;
        }
        lex.fail("expected an expression, found '" + t.text + "'");
    }

    // Rule bodies may only reference chunks that are already declared,
    // so [chunks] must precede [productions] when rules use @refs.
    SlotValue pending_ref(const std::string& name, int line) {
        const ChunkId id = model_.memory.find(name);
        if (id == kNoChunk)
            throw ParseError(line, "reference to undefined chunk '@" + name +
                                       "' (declare chunks before rules)");
        return ChunkRef{id};
    }

    void finish() {
        if (!has_goal_) throw ParseError("missing [goal] section");

        // Chunks were declared during parsing; fill slots now so that
        // forward references among chunks resolve.
        for (const ChunkLine& c : chunk_lines_) {
            std::vector<std::pair<std::string, SlotValue>> slots;
            for (const auto& [slot, token] : c.slots) {
                switch (token.kind) {
                    case Token::Kind::Number: slots.emplace_back(slot, token.number); break;
                    case Token::Kind::Ident: slots.emplace_back(slot, token.text); break;
                    case Token::Kind::Ref: {
                        const ChunkId id = model_.memory.find(token.text);
                        if (id == kNoChunk)
                            throw ParseError(c.line, "reference to undefined chunk '@" +
                                                         token.text + "'");
                        slots.emplace_back(slot, ChunkRef{id});
                        break;
                    }
                    default:
                        throw ParseError(c.line, "bad slot value");
                }
            }
            model_.memory.set_slots(model_.memory.find(c.name), slots);
        }

        model_.goal = model_.memory.find(goal_name_);
        if (model_.goal == kNoChunk)
            throw ParseError(goal_line_, "goal chunk '" + goal_name_ + "' is not defined");
    }

    Model model_;
    Section section_ = Section::None;
    std::vector<ChunkLine> chunk_lines_;
    std::set<std::string> rule_names_;
    bool in_rule_ = false;
    Production rule_;
    std::set<std::string> bound_;
    bool has_goal_ = false;
    std::string goal_name_;
    int goal_line_ = 0;
};

}  // namespace

Model parse_model(const std::string& text) {
    ModelParser parser;
    return parser.parse(text);
}

Model load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

std::string print_slot_pattern(const SlotPattern& sp, const Memory& memory) {
    switch (sp.kind) {
        case SlotPattern::Kind::Wildcard: return "*";
        case SlotPattern::Kind::Variable: return "?" + sp.var;
        case SlotPattern::Kind::Constant:
            return memory.display(sp.constant);
    }
    return "*";
}

std::string print_template(const ChunkTemplate& t, const Memory& memory,
                           bool with_kind) {
    std::string out;
    if (with_kind) out += t.kind;
    for (const auto& [slot, expr] : t.slots) {
        if (!out.empty()) out += ' ';
        out += slot + "=" + print_expr(*expr, &memory);
    }
    return out;
}

const char* cmp_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "==";
}

std::string print_action(const Action& a, const Memory& memory) {
    if (const auto* p = std::get_if<PushGoal>(&a))
        return "push " + print_template(p->goal, memory, true);
    if (std::get_if<PopGoal>(&a)) return "pop";
    if (const auto* w = std::get_if<WriteChunk>(&a))
        return "write " + print_template(w->chunk, memory, true);
    if (const auto* s = std::get_if<SetSlot>(&a)) {
        std::string out = "set ?" + s->target_var;
        for (const auto& [slot, expr] : s->slots)
            out += " " + slot + "=" + print_expr(*expr, &memory);
        return out;
    }
    const auto& x = std::get<EmitExternal>(a);
    std::string out = "emit " + x.name;
    for (const auto& [key, expr] : x.args)
        out += " " + key + "=" + print_expr(*expr, &memory);
    return out;
}

}  // namespace

std::string print_production(const Production& p, const Memory& memory) {
    std::string out = "rule " + p.name + "\n";
    for (const Pattern& pat : p.preconditions) {
        out += "  if ";
        if (!pat.id_var.empty()) out += "?" + pat.id_var + ": ";
        out += pat.kind;
        for (const auto& [slot, sp] : pat.slots)
            out += " " + slot + "=" + print_slot_pattern(sp, memory);
        out += '\n';
    }
    for (const Guard& g : p.guards) {
        out += "  guard ";
        switch (g.kind) {
            case Guard::Kind::Bind:
                out += "?" + g.bind_var + " := " + print_expr(*g.lhs, &memory);
                break;
            case Guard::Kind::Compare:
                out += print_expr(*g.lhs, &memory) + " " + cmp_text(g.op) + " " +
                       print_expr(*g.rhs, &memory);
                break;
            case Guard::Kind::Exists:
                out += "exists " + print_template(g.query, memory, true);
                break;
            case Guard::Kind::Absent:
                out += "absent " + print_template(g.query, memory, true);
                break;
        }
        out += '\n';
    }
    if (!p.actions.empty()) {
        out += "  then ";
        for (size_t i = 0; i < p.actions.size(); ++i) {
            if (i) out += " ; ";
            out += print_action(p.actions[i], memory);
        }
        out += '\n';
    }
    out += "end\n";
    return out;
}

std::string print_model(const Model& m) {
    std::string out;
    if (!m.raw_params.empty()) {
        out += "[parameters]\n";
        for (const auto& [key, value] : m.raw_params)
            out += key + " = " + value + "\n";
        out += '\n';
    }
    if (!m.memory.chunks().empty()) {
        out += "[chunks]\n";
        for (const Chunk& c : m.memory.chunks()) {
            out += c.name + " " + c.kind;
            for (const auto& [slot, value] : c.slots) {
                out += " " + slot + "=";
                if (const auto* n = std::get_if<double>(&value); n && *n < 0) {
                    out += "-" + format_number(-*n);
                } else {
                    out += m.memory.display(value);
                }
            }
            out += '\n';
        }
        out += '\n';
    }
    if (m.productions.size() > 0) {
        out += "[productions]\n";
        for (const Production& p : m.productions.all())
            out += print_production(p, m.memory) + "\n";
    }
    out += "[goal]\n";
    out += m.memory.name_of(m.goal) + "\n";
    return out;
}

}  // namespace actr
