#pragma once

#include <rgclh/expr.hpp>
#include <rgclh/normalize.hpp>
#include <rgclh/sexpr.hpp>
#include <rgclh/universe.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace rgclh {

// ---------------------------------------------------------------------------
// Instructions

/// One simultaneous assignment: every right-hand side and target index is
/// read before any target is written. Targets are variables or array cells
/// (`(at status r[t1])`).
struct Update {
    std::vector<Expr> targets;
    std::vector<Expr> values;
};

enum class InstrKind { Assign, Atomic, Fence, Check, Marker };

struct Instr {
    InstrKind kind = InstrKind::Assign;
    std::vector<Update> updates;  // Assign: exactly one; Atomic: one or more, in order
    Expr pred;                    // Check
    std::string name;             // Marker
    bool release = false;
    std::string label;
};

enum class CmdKind { Instr, Skip, Seq, PPSeq, Par, ParN, While, Spin, Assert };

struct CommandNode;
using Command = std::shared_ptr<const CommandNode>;

struct CommandNode {
    CmdKind kind = CmdKind::Skip;
    Instr instr;
    std::vector<Command> kids;  // Seq/PPSeq/Par: two; ParN: one per thread; While: body
    std::vector<int> threads;   // ParN thread indices, zero-based
    Expr guard;                 // While, Spin, Assert
    std::string model;          // PPSeq memory model tag
    std::string label;          // Spin
};

namespace cmd {

inline Command make(CommandNode n) { return std::make_shared<const CommandNode>(std::move(n)); }

inline Command instr(Instr i)
{
    CommandNode n;
    n.kind = CmdKind::Instr;
    n.instr = std::move(i);
    return make(std::move(n));
}

inline Command skip() { return make(CommandNode{}); }

inline Instr assign_instr(Expr target, Expr value, std::string label = "", bool release = false)
{
    Instr i;
    i.kind = InstrKind::Assign;
    i.updates.push_back({{std::move(target)}, {std::move(value)}});
    i.label = std::move(label);
    i.release = release;
    return i;
}

inline Command assign(Expr target, Expr value, std::string label = "", bool release = false)
{
    return instr(assign_instr(std::move(target), std::move(value), std::move(label), release));
}

inline Command atomic(std::vector<Update> updates, std::string label = "", bool release = false)
{
    Instr i;
    i.kind = InstrKind::Atomic;
    i.updates = std::move(updates);
    i.label = std::move(label);
    i.release = release;
    return instr(std::move(i));
}

inline Command fence(std::string label = "")
{
    Instr i;
    i.kind = InstrKind::Fence;
    i.label = std::move(label);
    return instr(std::move(i));
}

inline Command check(Expr p, std::string label = "")
{
    Instr i;
    i.kind = InstrKind::Check;
    i.pred = std::move(p);
    i.label = std::move(label);
    return instr(std::move(i));
}

inline Command marker(std::string name, std::string label = "")
{
    Instr i;
    i.kind = InstrKind::Marker;
    i.name = std::move(name);
    i.label = std::move(label);
    return instr(std::move(i));
}

inline Command binary(CmdKind k, Command a, Command b, std::string model = "")
{
    CommandNode n;
    n.kind = k;
    n.kids = {std::move(a), std::move(b)};
    n.model = std::move(model);
    return make(std::move(n));
}

inline Command seq(Command a, Command b) { return binary(CmdKind::Seq, std::move(a), std::move(b)); }
inline Command par(Command a, Command b) { return binary(CmdKind::Par, std::move(a), std::move(b)); }
inline Command ppseq(std::string model, Command a, Command b)
{
    return binary(CmdKind::PPSeq, std::move(a), std::move(b), std::move(model));
}

/// Right-nested chain; a single element is returned as is.
inline Command chain(CmdKind k, std::vector<Command> xs, const std::string& model = "")
{
    if (xs.empty()) {
        return skip();
    }
    Command acc = xs.back();
    for (std::size_t j = xs.size() - 1; j-- > 0;) {
        acc = binary(k, xs[j], acc, model);
    }
    return acc;
}
inline Command seq(std::vector<Command> xs) { return chain(CmdKind::Seq, std::move(xs)); }
inline Command ppseq(const std::string& model, std::vector<Command> xs)
{
    return chain(CmdKind::PPSeq, std::move(xs), model);
}

inline Command par_n(std::vector<std::pair<int, Command>> children)
{
    CommandNode n;
    n.kind = CmdKind::ParN;
    for (auto& [t, c] : children) {
        n.threads.push_back(t);
        n.kids.push_back(std::move(c));
    }
    return make(std::move(n));
}

inline Command while_loop(Expr guard, Command body)
{
    CommandNode n;
    n.kind = CmdKind::While;
    n.guard = std::move(guard);
    n.kids = {std::move(body)};
    return make(std::move(n));
}

/// await g: spin until g holds.
inline Command spin(Expr guard, std::string label = "")
{
    CommandNode n;
    n.kind = CmdKind::Spin;
    n.guard = std::move(guard);
    n.label = std::move(label);
    return make(std::move(n));
}

inline Command assert_anno(Expr p)
{
    CommandNode n;
    n.kind = CmdKind::Assert;
    n.guard = std::move(p);
    return make(std::move(n));
}

}  // namespace cmd

/// Flattens a right- or left-nested chain of `k` into its elements.
inline void flatten(const Command& c, CmdKind k, std::vector<Command>& out, const std::string& model = "")
{
    if (c->kind == k && (k != CmdKind::PPSeq || c->model == model)) {
        for (const auto& kid : c->kids) flatten(kid, k, out, model);
    } else {
        out.push_back(c);
    }
}

inline std::string instr_label(const Instr& i)
{
    if (!i.label.empty()) return i.label;
    switch (i.kind) {
    case InstrKind::Fence: return "fence";
    case InstrKind::Marker: return i.name;
    case InstrKind::Check: return "check";
    default: return "";
    }
}

// ---------------------------------------------------------------------------
// Footprints

/// Location classes: variable names (cells appear as `cur[t1]`) and, for
/// accesses through a computed index, the whole array written `status[*]`.
struct Footprint {
    std::set<std::string> reads;
    std::set<std::string> writes;

    void add(const Footprint& o)
    {
        reads.insert(o.reads.begin(), o.reads.end());
        writes.insert(o.writes.begin(), o.writes.end());
    }
    bool empty() const { return reads.empty() && writes.empty(); }
};

inline std::string whole_array(const std::string& a) { return a + "[*]"; }

/// Two location classes may name the same memory.
inline bool may_alias(const std::string& x, const std::string& y)
{
    if (x == y) return true;
    auto arr = [](const std::string& s) {
        auto b = s.find('[');
        return b == std::string::npos ? std::string() : s.substr(0, b);
    };
    bool xw = x.size() > 3 && x.compare(x.size() - 3, 3, "[*]") == 0;
    bool yw = y.size() > 3 && y.compare(y.size() - 3, 3, "[*]") == 0;
    return (xw || yw) && !arr(x).empty() && arr(x) == arr(y);
}

inline bool intersects(const std::set<std::string>& a, const std::set<std::string>& b)
{
    for (const auto& x : a) {
        for (const auto& y : b) {
            if (may_alias(x, y)) return true;
        }
    }
    return false;
}

/// Accesses conflict when one writes a location the other reads or writes.
inline bool conflicts(const Footprint& a, const Footprint& b)
{
    return intersects(a.writes, b.reads) || intersects(a.writes, b.writes) || intersects(a.reads, b.writes);
}

namespace detail {

inline std::string cell_name(const std::string& array, const Value& idx) { return array + "[" + to_string(idx) + "]"; }

inline void expr_reads(const Expr& e, std::set<std::string>& out)
{
    switch (e->op) {
    case Op::Var: out.insert(e->name); return;
    case Op::Select:
        if (e->view->is_default() && e->kids[0]->op == Op::Const) {
            out.insert(cell_name(e->view->array, e->kids[0]->value));
            return;
        }
        break;
    default: break;
    }
    if (e->view) {
        if (e->view->is_default()) {
            out.insert(whole_array(e->view->array));
        } else {
            for (const auto& c : e->view->cells) expr_reads(c, out);
        }
    }
    for (const auto& k : e->kids) expr_reads(k, out);
}

inline void target_access(const Expr& t, Footprint& f)
{
    if (t->op == Op::Var) {
        f.writes.insert(t->name);
    } else if (t->op == Op::Select && t->view->is_default()) {
        if (t->kids[0]->op == Op::Const) {
            f.writes.insert(cell_name(t->view->array, t->kids[0]->value));
        } else {
            // a dereference loads the pointer and stores through it
            expr_reads(t->kids[0], f.reads);
            f.reads.insert(whole_array(t->view->array));
            f.writes.insert(whole_array(t->view->array));
        }
    } else {
        throw EvalError(EvalErrorKind::TypeMismatch, "not an assignable target: " + to_sexpr(t));
    }
}

}  // namespace detail

inline Footprint footprint(const Expr& e)
{
    Footprint f;
    detail::expr_reads(e, f.reads);
    return f;
}

inline Footprint footprint(const Instr& i)
{
    Footprint f;
    switch (i.kind) {
    case InstrKind::Assign:
    case InstrKind::Atomic:
        for (const auto& u : i.updates) {
            for (const auto& t : u.targets) detail::target_access(t, f);
            for (const auto& v : u.values) detail::expr_reads(v, f.reads);
        }
        break;
    case InstrKind::Check: detail::expr_reads(i.pred, f.reads); break;
    case InstrKind::Fence:
    case InstrKind::Marker: break;
    }
    return f;
}

/// Footprint of a whole command (spin and while guards count as reads).
inline Footprint footprint(const Command& c)
{
    Footprint f;
    switch (c->kind) {
    case CmdKind::Instr: return footprint(c->instr);
    case CmdKind::Spin:
    case CmdKind::While:
    case CmdKind::Assert: detail::expr_reads(c->guard, f.reads); break;
    default: break;
    }
    for (const auto& k : c->kids) f.add(footprint(k));
    return f;
}

// ---------------------------------------------------------------------------
// Transition relation of an instruction, for proof rules

namespace detail {

inline Expr resolve_target(const Expr& t, const Universe& u)
{
    Expr r = expand(t, u);
    if (r->op == Op::Var && !r->primed) return r;
    if (r->op == Op::Select && r->view->is_default() && !r->view->primed) return r;
    throw EvalError(EvalErrorKind::TypeMismatch, "not an assignable target: " + to_sexpr(t));
}

}  // namespace detail

/// Post-state values of every variable after executing the instruction's
/// updates, as expressions over the pre-state. Variables left out are unchanged.
inline std::map<std::string, Expr> symbolic_effect(const Instr& ins, const Universe& u)
{
    std::map<std::string, Expr> state;
    auto current = [&](const std::string& name) {
        auto it = state.find(name);
        return it == state.end() ? ex::var(name) : it->second;
    };
    for (const auto& up : ins.updates) {
        Substitution sub;
        sub.vars = state;
        std::vector<std::pair<Expr, Expr>> writes;
        for (std::size_t k = 0; k < up.targets.size(); ++k) {
            Expr t = detail::resolve_target(up.targets[k], u);
            Expr v = substitute(expand(up.values[k], u), sub, u);
            if (t->op == Op::Select) {
                t = ex::with_view(Op::Select, t->view, {substitute(t->kids[0], sub, u)});
            }
            writes.emplace_back(t, v);
        }
        std::map<std::string, Expr> next = state;
        for (const auto& [t, v] : writes) {
            if (t->op == Op::Var) {
                next[t->name] = v;
                continue;
            }
            const ArrayDecl& arr = detail::require_array(u, t->view->array);
            for (int id : arr.cells) {
                const VarDecl& d = u.var(static_cast<std::size_t>(id));
                Expr key = arr.index == IndexKind::Threads ? ex::cst(Value::thread(d.index)) : ex::nodec(d.index);
                auto it = next.find(d.name);
                Expr old = it == next.end() ? current(d.name) : it->second;
                next[d.name] = simplify(ex::ite(ex::eq(t->kids[0], key), v, old));
            }
        }
        state = std::move(next);
    }
    return state;
}

/// The relation (s, s') of one execution of the instruction: assigned
/// variables take their new values and every other variable is unchanged.
inline Expr transition_relation(const Instr& ins, const Universe& u)
{
    auto eff = symbolic_effect(ins, u);
    std::vector<Expr> parts;
    for (const auto& v : u.vars()) {
        auto it = eff.find(v.name);
        parts.push_back(ex::eq(ex::pvar(v.name), it == eff.end() ? ex::var(v.name) : it->second));
    }
    return simplify(ex::and_(std::move(parts)));
}

// ---------------------------------------------------------------------------
// Validation

struct Defect {
    EvalErrorKind kind;
    std::string where;
    std::string message;
};

struct Validation {
    std::vector<Defect> defects;
    bool ok() const { return defects.empty(); }
};

namespace detail {

class Validator {
public:
    explicit Validator(const Universe& u) : u_(u) {}

    void run(const Command& c, const std::string& where)
    {
        switch (c->kind) {
        case CmdKind::Instr: instr(c->instr, where); break;
        case CmdKind::Skip: break;
        case CmdKind::Spin:
        case CmdKind::While:
        case CmdKind::Assert: pred(c->guard, where + (c->label.empty() ? "" : "/" + c->label)); break;
        case CmdKind::PPSeq:
            if (model_.empty()) model_ = c->model;
            if (c->model != model_) {
                out.defects.push_back({EvalErrorKind::TypeMismatch, where, "mixed memory model tags"});
            }
            if (c->model != "arm-like") {
                out.defects.push_back({EvalErrorKind::TypeMismatch, where, "unknown memory model " + c->model});
            }
            break;
        case CmdKind::ParN: {
            std::set<int> seen;
            for (int t : c->threads) {
                if (!seen.insert(t).second) {
                    out.defects.push_back({EvalErrorKind::TypeMismatch, where, "duplicate thread " + thread_name(t)});
                }
                if (t < 0 || t >= u_.threads()) {
                    out.defects.push_back({EvalErrorKind::OutOfDomain, where, "thread out of range " + thread_name(t)});
                }
            }
            break;
        }
        default: break;
        }
        for (std::size_t k = 0; k < c->kids.size(); ++k) {
            std::string w = where;
            if (c->kind == CmdKind::ParN) w += "/" + thread_name(c->threads[k]);
            run(c->kids[k], w);
        }
    }

    Validation out;

private:
    void pred(const Expr& e, const std::string& where)
    {
        try {
            Expr x = expand(e, u_);
            if (has_primed(x)) {
                out.defects.push_back({EvalErrorKind::MissingPostState, where, "primed variable in " + to_sexpr(e)});
            }
        } catch (const EvalError& err) {
            out.defects.push_back({err.kind(), where, err.what()});
        }
    }

    void instr(const Instr& i, const std::string& where)
    {
        std::string w = where + (instr_label(i).empty() ? "" : "/" + instr_label(i));
        if (i.kind == InstrKind::Check) {
            pred(i.pred, w);
            return;
        }
        if (i.kind == InstrKind::Atomic && i.updates.empty()) {
            out.defects.push_back({EvalErrorKind::TypeMismatch, w, "empty atomic block"});
        }
        for (const auto& up : i.updates) {
            if (up.targets.size() != up.values.size() || up.targets.empty()) {
                out.defects.push_back({EvalErrorKind::TypeMismatch, w, "malformed assignment"});
                continue;
            }
            for (std::size_t k = 0; k < up.targets.size(); ++k) {
                try {
                    resolve_target(up.targets[k], u_);
                } catch (const EvalError& err) {
                    out.defects.push_back({err.kind(), w, err.what()});
                }
                pred(up.values[k], w);
            }
        }
    }

    const Universe& u_;
    std::string model_;
};

}  // namespace detail

inline Validation validate(const Command& c, const Universe& u)
{
    detail::Validator v(u);
    v.run(c, "");
    return v.out;
}

// ---------------------------------------------------------------------------
// S-expression form

namespace detail {

inline void print_update(std::string& out, const Update& u)
{
    if (u.targets.size() == 1) {
        out += "(assign " + to_sexpr(u.targets[0]) + " " + to_sexpr(u.values[0]);
    } else {
        out += "(passign (";
        for (std::size_t k = 0; k < u.targets.size(); ++k) out += (k ? " " : "") + to_sexpr(u.targets[k]);
        out += ") (";
        for (std::size_t k = 0; k < u.values.size(); ++k) out += (k ? " " : "") + to_sexpr(u.values[k]);
        out += ")";
    }
}

inline void print_flags(std::string& out, const Instr& i)
{
    if (!i.label.empty()) out += " :label " + i.label;
    if (i.release) out += " :release";
    out += ")";
}

inline void print_cmd(std::string& out, const Command& c)
{
    switch (c->kind) {
    case CmdKind::Skip: out += "skip"; return;
    case CmdKind::Instr: {
        const Instr& i = c->instr;
        switch (i.kind) {
        case InstrKind::Assign: print_update(out, i.updates[0]); break;
        case InstrKind::Atomic:
            out += "(atomic";
            for (const auto& u : i.updates) {
                out += ' ';
                print_update(out, u);
                out += ')';
            }
            break;
        case InstrKind::Fence: out += "(fence"; break;
        case InstrKind::Check: out += "(check " + to_sexpr(i.pred); break;
        case InstrKind::Marker: out += "(marker " + i.name; break;
        }
        print_flags(out, i);
        return;
    }
    case CmdKind::Seq:
    case CmdKind::PPSeq:
    case CmdKind::Par: {
        std::vector<Command> xs;
        flatten(c, c->kind, xs, c->model);
        out += c->kind == CmdKind::Seq ? "(seq" : c->kind == CmdKind::Par ? "(par" : "(ppseq " + c->model;
        for (const auto& x : xs) {
            out += ' ';
            print_cmd(out, x);
        }
        out += ')';
        return;
    }
    case CmdKind::ParN:
        out += "(parN";
        for (std::size_t k = 0; k < c->kids.size(); ++k) {
            out += " (" + thread_name(c->threads[k]) + " ";
            print_cmd(out, c->kids[k]);
            out += ')';
        }
        out += ')';
        return;
    case CmdKind::While:
        out += "(while " + to_sexpr(c->guard) + " ";
        print_cmd(out, c->kids[0]);
        out += ')';
        return;
    case CmdKind::Spin:
        out += "(await " + to_sexpr(c->guard);
        if (!c->label.empty()) out += " :label " + c->label;
        out += ')';
        return;
    case CmdKind::Assert: out += "(assert " + to_sexpr(c->guard) + ")"; return;
    }
}

class CommandParser {
public:
    Command parse(const SExpr& s)
    {
        if (s.atom) {
            if (s.text == "skip") return cmd::skip();
            if (s.text == "fence") return cmd::fence();
            throw ParseError("unknown command '" + s.text + "'", s.line);
        }
        const std::string& h = s.head();
        if (h == "assign" || h == "passign" || h == "atomic" || h == "fence" || h == "check" || h == "marker") {
            return instr(s);
        }
        if (h == "seq" || h == "par" || h == "ppseq") {
            std::size_t from = h == "ppseq" ? 2 : 1;
            if (h == "ppseq" && (s.items.size() < 2 || !s.items[1].atom)) {
                throw ParseError("ppseq needs a model tag", s.line);
            }
            std::vector<Command> xs;
            for (std::size_t k = from; k < s.items.size(); ++k) xs.push_back(parse(s.items[k]));
            if (xs.size() < 2 && h == "par") throw ParseError("par needs two children", s.line);
            if (xs.empty()) throw ParseError(h + " needs children", s.line);
            CmdKind k = h == "seq" ? CmdKind::Seq : h == "par" ? CmdKind::Par : CmdKind::PPSeq;
            return cmd::chain(k, std::move(xs), h == "ppseq" ? s.items[1].text : "");
        }
        if (h == "parN") {
            std::vector<std::pair<int, Command>> kids;
            for (std::size_t k = 1; k < s.items.size(); ++k) {
                const SExpr& c = s.items[k];
                int t = 0;
                if (c.atom || c.items.size() != 2 || !c.items[0].atom || !parse_indexed(c.items[0].text, 't', t) || t < 1) {
                    throw ParseError("parN children are (tK command)", c.line);
                }
                kids.emplace_back(t - 1, parse(c.items[1]));
            }
            return cmd::par_n(std::move(kids));
        }
        if (h == "while") {
            if (s.items.size() != 3) throw ParseError("(while guard body)", s.line);
            return cmd::while_loop(parse_expr(s.items[1]), parse(s.items[2]));
        }
        if (h == "await") {
            auto [pos, flags] = split_flags(s, 1);
            if (pos.size() != 1) throw ParseError("(await guard)", s.line);
            return cmd::spin(parse_expr(pos[0]), flags.label);
        }
        if (h == "assert") {
            if (s.items.size() != 2) throw ParseError("(assert predicate)", s.line);
            return cmd::assert_anno(parse_expr(s.items[1]));
        }
        throw ParseError("unknown command '" + h + "'", s.line);
    }

private:
    struct Flags {
        std::string label;
        bool release = false;
    };

    static std::pair<std::vector<SExpr>, Flags> split_flags(const SExpr& s, std::size_t from)
    {
        std::vector<SExpr> pos;
        Flags f;
        for (std::size_t k = from; k < s.items.size(); ++k) {
            const SExpr& x = s.items[k];
            if (x.is_atom(":label")) {
                if (k + 1 >= s.items.size() || !s.items[k + 1].atom) throw ParseError(":label needs a name", x.line);
                f.label = s.items[++k].text;
            } else if (x.is_atom(":release")) {
                f.release = true;
            } else {
                pos.push_back(x);
            }
        }
        return {pos, f};
    }

    static Update update(const SExpr& s)
    {
        Update u;
        if (s.is_form("assign")) {
            if (s.items.size() != 3) throw ParseError("(assign target value)", s.line);
            u.targets.push_back(parse_expr(s.items[1]));
            u.values.push_back(parse_expr(s.items[2]));
        } else if (s.is_form("passign")) {
            if (s.items.size() != 3 || s.items[1].atom || s.items[2].atom || s.items[1].items.size() != s.items[2].items.size()) {
                throw ParseError("(passign (targets...) (values...))", s.line);
            }
            for (const auto& t : s.items[1].items) u.targets.push_back(parse_expr(t));
            for (const auto& v : s.items[2].items) u.values.push_back(parse_expr(v));
        } else {
            throw ParseError("atomic blocks contain only assign and passign", s.line);
        }
        return u;
    }

    Command instr(const SExpr& s)
    {
        const std::string& h = s.head();
        auto [pos, flags] = split_flags(s, 1);
        Instr i;
        i.label = flags.label;
        i.release = flags.release;
        if (h == "assign" || h == "passign") {
            SExpr core;
            core.items.push_back(s.items[0]);
            core.items.insert(core.items.end(), pos.begin(), pos.end());
            core.line = s.line;
            i.kind = InstrKind::Assign;
            i.updates.push_back(update(core));
        } else if (h == "atomic") {
            i.kind = InstrKind::Atomic;
            for (const auto& p : pos) i.updates.push_back(update(p));
            if (i.updates.empty()) throw ParseError("empty atomic block", s.line);
        } else if (h == "fence") {
            i.kind = InstrKind::Fence;
        } else if (h == "check") {
            if (pos.size() != 1) throw ParseError("(check predicate)", s.line);
            i.kind = InstrKind::Check;
            i.pred = parse_expr(pos[0]);
        } else {
            if (pos.size() != 1 || !pos[0].atom) throw ParseError("(marker name)", s.line);
            i.kind = InstrKind::Marker;
            i.name = pos[0].text;
        }
        return cmd::instr(std::move(i));
    }
};

}  // namespace detail

inline std::string to_sexpr(const Command& c)
{
    std::string out;
    detail::print_cmd(out, c);
    return out;
}

inline Command parse_command(const SExpr& s) { return detail::CommandParser().parse(s); }
inline Command parse_command(std::string_view text) { return parse_command(parse_sexpr(text)); }

inline bool structurally_equal(const Command& a, const Command& b) { return to_sexpr(a) == to_sexpr(b); }

}  // namespace rgclh
