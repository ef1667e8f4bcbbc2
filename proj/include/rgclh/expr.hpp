#pragma once

#include <rgclh/sexpr.hpp>
#include <rgclh/universe.hpp>
#include <rgclh/value.hpp>

#include <cctype>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rgclh {

enum class Op : std::uint8_t {
    Const,
    Var,
    Bound,
    Select,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Ne,
    Lt,
    Le,
    Add,
    Sub,
    Ite,
    Forall,
    Exists,
    ListLit,
    Hd,
    Tl,
    Concat,
    Cons,
    Mem,
    IndexOf,
    Len,
    Last,
    Butlast,
    Distinct,
    FMap,
    Injective,
    InRange,
    Id,
    IdAll,
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// An array seen as a function from its index set: either the declared
/// cells (pre- or post-state) or an explicit expression per index, which is
/// what substitution produces.
struct ArrayView {
    std::string array;
    bool primed = false;
    std::vector<Expr> cells;  // empty: the declared cells

    bool is_default() const { return cells.empty(); }
};

struct ExprNode {
    Op op = Op::Const;
    Value value;
    std::string name;  // variable, bound variable, or binder name
    bool primed = false;
    IndexKind qdom = IndexKind::Threads;
    std::shared_ptr<const ArrayView> view;
    std::vector<Expr> kids;
};

std::string to_sexpr(const Expr& e);

namespace ex {

inline Expr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

inline Expr node(Op op, std::vector<Expr> kids)
{
    ExprNode n;
    n.op = op;
    n.kids = std::move(kids);
    return make(std::move(n));
}

inline Expr cst(const Value& v)
{
    ExprNode n;
    n.op = Op::Const;
    n.value = v;
    return make(std::move(n));
}

inline Expr tt() { return cst(Value::boolean(true)); }
inline Expr ff() { return cst(Value::boolean(false)); }
inline Expr num(int v) { return cst(Value::integer(v)); }
/// Thread constant, one-based as written in programs (thread(1) is t1).
inline Expr thread(int one_based) { return cst(Value::thread(one_based - 1)); }
inline Expr nodec(int n) { return cst(Value::node(n)); }
inline Expr bottom() { return cst(Value::bottom()); }
inline Expr granted() { return cst(Value::granted()); }
inline Expr pending() { return cst(Value::pending()); }
inline Expr lock_free() { return cst(Value::lock_free()); }
inline Expr empty_list() { return node(Op::ListLit, {}); }

inline Expr var(std::string name, bool primed = false)
{
    ExprNode n;
    n.op = Op::Var;
    n.name = std::move(name);
    n.primed = primed;
    return make(std::move(n));
}
inline Expr pvar(std::string name) { return var(std::move(name), true); }

inline Expr bound(std::string name)
{
    ExprNode n;
    n.op = Op::Bound;
    n.name = std::move(name);
    return make(std::move(n));
}

inline std::shared_ptr<const ArrayView> view(std::string array, bool primed = false)
{
    return std::make_shared<const ArrayView>(ArrayView{std::move(array), primed, {}});
}

inline Expr with_view(Op op, std::shared_ptr<const ArrayView> v, std::vector<Expr> kids)
{
    ExprNode n;
    n.op = op;
    n.view = std::move(v);
    n.kids = std::move(kids);
    return make(std::move(n));
}

/// arr[idx]; for a constant index this is just the cell variable.
inline Expr at(std::string array, Expr idx, bool primed = false)
{
    return with_view(Op::Select, view(std::move(array), primed), {std::move(idx)});
}
/// Heap status of a node-valued expression.
inline Expr status(Expr ptr, bool primed = false) { return at("status", std::move(ptr), primed); }
inline Expr fmap(std::string array, Expr list, bool primed = false)
{
    return with_view(Op::FMap, view(std::move(array), primed), {std::move(list)});
}
inline Expr injective(std::string array, bool primed = false)
{
    return with_view(Op::Injective, view(std::move(array), primed), {});
}
inline Expr in_range(Expr x, std::string array, bool primed = false)
{
    return with_view(Op::InRange, view(std::move(array), primed), {std::move(x)});
}

inline Expr not_(Expr a) { return node(Op::Not, {std::move(a)}); }
inline Expr and_(std::vector<Expr> xs) { return node(Op::And, std::move(xs)); }
inline Expr or_(std::vector<Expr> xs) { return node(Op::Or, std::move(xs)); }
inline Expr implies(Expr a, Expr b) { return node(Op::Implies, {std::move(a), std::move(b)}); }
inline Expr iff(Expr a, Expr b) { return node(Op::Iff, {std::move(a), std::move(b)}); }
inline Expr eq(Expr a, Expr b) { return node(Op::Eq, {std::move(a), std::move(b)}); }
inline Expr ne(Expr a, Expr b) { return node(Op::Ne, {std::move(a), std::move(b)}); }
inline Expr lt(Expr a, Expr b) { return node(Op::Lt, {std::move(a), std::move(b)}); }
inline Expr le(Expr a, Expr b) { return node(Op::Le, {std::move(a), std::move(b)}); }
inline Expr add(Expr a, Expr b) { return node(Op::Add, {std::move(a), std::move(b)}); }
inline Expr sub(Expr a, Expr b) { return node(Op::Sub, {std::move(a), std::move(b)}); }
inline Expr ite(Expr c, Expr a, Expr b) { return node(Op::Ite, {std::move(c), std::move(a), std::move(b)}); }

inline Expr quant(Op op, std::string binder, IndexKind dom, Expr body)
{
    ExprNode n;
    n.op = op;
    n.name = std::move(binder);
    n.qdom = dom;
    n.kids = {std::move(body)};
    return make(std::move(n));
}
inline Expr forall(std::string binder, IndexKind dom, Expr body) { return quant(Op::Forall, std::move(binder), dom, std::move(body)); }
inline Expr exists(std::string binder, IndexKind dom, Expr body) { return quant(Op::Exists, std::move(binder), dom, std::move(body)); }

inline Expr list(std::vector<Expr> xs) { return node(Op::ListLit, std::move(xs)); }
inline Expr hd(Expr l) { return node(Op::Hd, {std::move(l)}); }
inline Expr tl(Expr l) { return node(Op::Tl, {std::move(l)}); }
inline Expr concat(Expr a, Expr b) { return node(Op::Concat, {std::move(a), std::move(b)}); }
inline Expr cons(Expr a, Expr l) { return node(Op::Cons, {std::move(a), std::move(l)}); }
inline Expr mem(Expr x, Expr l) { return node(Op::Mem, {std::move(x), std::move(l)}); }
/// Zero-based position of x in l; undefined when x is absent.
inline Expr index_of(Expr l, Expr x) { return node(Op::IndexOf, {std::move(l), std::move(x)}); }
inline Expr len(Expr l) { return node(Op::Len, {std::move(l)}); }
inline Expr last(Expr l) { return node(Op::Last, {std::move(l)}); }
inline Expr butlast(Expr l) { return node(Op::Butlast, {std::move(l)}); }
inline Expr distinct(Expr l) { return node(Op::Distinct, {std::move(l)}); }

/// ID(e1, ..., ek): every listed expression keeps its value.
inline Expr id(std::vector<Expr> xs) { return node(Op::Id, std::move(xs)); }
/// The identity relation on the whole state.
inline Expr id_all() { return node(Op::IdAll, {}); }

}  // namespace ex

// ---------------------------------------------------------------------------
// Canonical s-expression form

namespace detail {

inline const char* op_symbol(Op op)
{
    switch (op) {
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "implies";
    case Op::Iff: return "iff";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Ite: return "ite";
    case Op::Forall: return "forall";
    case Op::Exists: return "exists";
    case Op::ListLit: return "list";
    case Op::Hd: return "hd";
    case Op::Tl: return "tl";
    case Op::Concat: return "concat";
    case Op::Cons: return "cons";
    case Op::Mem: return "in";
    case Op::IndexOf: return "index";
    case Op::Len: return "len";
    case Op::Last: return "last";
    case Op::Butlast: return "butlast";
    case Op::Distinct: return "distinct";
    case Op::FMap: return "fmap";
    case Op::Injective: return "injective";
    case Op::InRange: return "inran";
    case Op::Select: return "at";
    case Op::Id: return "ID";
    case Op::IdAll: return "id";
    default: return "?";
    }
}

inline void print_view(std::string& out, const ArrayView& v)
{
    if (v.is_default()) {
        out += v.array;
        if (v.primed) {
            out += '\'';
        }
        return;
    }
    out += "(cells ";
    out += v.array;
    for (const auto& c : v.cells) {
        out += ' ';
        out += to_sexpr(c);
    }
    out += ')';
}

inline void print(std::string& out, const Expr& e)
{
    switch (e->op) {
    case Op::Const: out += to_string(e->value); return;
    case Op::Var:
        out += e->name;
        if (e->primed) {
            out += '\'';
        }
        return;
    case Op::Bound: out += e->name; return;
    case Op::IdAll: out += "id"; return;
    case Op::Forall:
    case Op::Exists:
        out += '(';
        out += op_symbol(e->op);
        out += ' ';
        out += e->name;
        out += e->qdom == IndexKind::Threads ? " threads " : " nodes ";
        print(out, e->kids[0]);
        out += ')';
        return;
    case Op::Select:
    case Op::FMap:
    case Op::InRange:
        out += '(';
        out += op_symbol(e->op);
        if (e->op == Op::InRange) {
            out += ' ';
            print(out, e->kids[0]);
            out += ' ';
            print_view(out, *e->view);
        } else {
            out += ' ';
            print_view(out, *e->view);
            out += ' ';
            print(out, e->kids[0]);
        }
        out += ')';
        return;
    case Op::Injective:
        out += "(injective ";
        print_view(out, *e->view);
        out += ')';
        return;
    default:
        out += '(';
        out += op_symbol(e->op);
        for (const auto& k : e->kids) {
            out += ' ';
            print(out, k);
        }
        out += ')';
        return;
    }
}

}  // namespace detail

inline std::string to_sexpr(const Expr& e)
{
    std::string out;
    detail::print(out, e);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline bool parse_int(const std::string& s, int& out)
{
    if (s.empty()) {
        return false;
    }
    std::size_t k = (s[0] == '-') ? 1 : 0;
    if (k == s.size()) {
        return false;
    }
    for (std::size_t j = k; j < s.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) {
            return false;
        }
    }
    out = std::stoi(s);
    return true;
}

/// t<k> / n<k> names with a positive decimal suffix.
inline bool parse_indexed(const std::string& s, char prefix, int& out)
{
    if (s.size() < 2 || s[0] != prefix) {
        return false;
    }
    for (std::size_t j = 1; j < s.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) {
            return false;
        }
    }
    out = std::stoi(s.substr(1));
    return true;
}

inline std::optional<Value> parse_constant(const std::string& s)
{
    int k = 0;
    if (s == "true") return Value::boolean(true);
    if (s == "false") return Value::boolean(false);
    if (s == "bot") return Value::bottom();
    if (s == "Granted") return Value::granted();
    if (s == "Pending") return Value::pending();
    if (s == "Free") return Value::lock_free();
    if (parse_int(s, k)) return Value::integer(k);
    if (parse_indexed(s, 't', k) && k >= 1) return Value::thread(k - 1);
    if (parse_indexed(s, 'n', k)) return Value::node(k);
    return std::nullopt;
}

class ExprParser {
public:
    Expr parse(const SExpr& s) { return expr(s); }

private:
    Expr expr(const SExpr& s)
    {
        if (s.atom) {
            return atom(s);
        }
        if (s.items.empty()) {
            throw ParseError("empty form", s.line);
        }
        const std::string& h = s.head();
        auto args = [&](std::size_t n) {
            if (s.items.size() != n + 1) {
                throw ParseError("'" + h + "' expects " + std::to_string(n) + " argument(s)", s.line);
            }
        };
        auto kids_from = [&](std::size_t from) {
            std::vector<Expr> ks;
            for (std::size_t j = from; j < s.items.size(); ++j) {
                ks.push_back(expr(s.items[j]));
            }
            return ks;
        };
        if (h == "Held") {
            args(1);
            auto v = parse_constant(s.items[1].text);
            if (!s.items[1].atom || !v || v->kind != Kind::Thread) {
                throw ParseError("Held expects a thread constant", s.line);
            }
            return ex::cst(Value::held(v->i));
        }
        if (h == "forall" || h == "exists") {
            args(3);
            const auto& binder = s.items[1];
            const auto& dom = s.items[2];
            if (!binder.atom || !dom.atom || (dom.text != "threads" && dom.text != "nodes")) {
                throw ParseError("quantifier form is (" + h + " name threads|nodes body)", s.line);
            }
            bound_.push_back(binder.text);
            Expr body = expr(s.items[3]);
            bound_.pop_back();
            return ex::quant(h == "forall" ? Op::Forall : Op::Exists, binder.text,
                             dom.text == "threads" ? IndexKind::Threads : IndexKind::Nodes, body);
        }
        if (h == "at") {
            args(2);
            return ex::with_view(Op::Select, view(s.items[1]), {expr(s.items[2])});
        }
        if (h == "fmap") {
            args(2);
            return ex::with_view(Op::FMap, view(s.items[1]), {expr(s.items[2])});
        }
        if (h == "injective") {
            args(1);
            return ex::with_view(Op::Injective, view(s.items[1]), {});
        }
        if (h == "inran") {
            args(2);
            return ex::with_view(Op::InRange, view(s.items[2]), {expr(s.items[1])});
        }
        static const std::pair<const char*, Op> nary[] = {
            {"and", Op::And}, {"or", Op::Or}, {"list", Op::ListLit}, {"ID", Op::Id}};
        for (const auto& [name, op] : nary) {
            if (h == name) {
                return ex::node(op, kids_from(1));
            }
        }
        static const std::pair<const char*, Op> unary[] = {
            {"not", Op::Not},   {"hd", Op::Hd},     {"tl", Op::Tl},           {"len", Op::Len},
            {"last", Op::Last}, {"butlast", Op::Butlast}, {"distinct", Op::Distinct}};
        for (const auto& [name, op] : unary) {
            if (h == name) {
                args(1);
                return ex::node(op, kids_from(1));
            }
        }
        static const std::pair<const char*, Op> binary[] = {
            {"implies", Op::Implies}, {"iff", Op::Iff}, {"=", Op::Eq},          {"!=", Op::Ne},
            {"<", Op::Lt},            {"<=", Op::Le},   {"+", Op::Add},         {"-", Op::Sub},
            {"concat", Op::Concat},   {"cons", Op::Cons}, {"in", Op::Mem},      {"index", Op::IndexOf}};
        for (const auto& [name, op] : binary) {
            if (h == name) {
                args(2);
                return ex::node(op, kids_from(1));
            }
        }
        if (h == "ite") {
            args(3);
            return ex::node(Op::Ite, kids_from(1));
        }
        throw ParseError("unknown operator '" + h + "'", s.line);
    }

    std::shared_ptr<const ArrayView> view(const SExpr& s)
    {
        if (s.atom) {
            std::string name = s.text;
            bool primed = !name.empty() && name.back() == '\'';
            if (primed) {
                name.pop_back();
            }
            return ex::view(name, primed);
        }
        if (!s.is_form("cells") || s.items.size() < 2 || !s.items[1].atom) {
            throw ParseError("expected an array name or (cells name e...)", s.line);
        }
        ArrayView v;
        v.array = s.items[1].text;
        for (std::size_t j = 2; j < s.items.size(); ++j) {
            v.cells.push_back(expr(s.items[j]));
        }
        return std::make_shared<const ArrayView>(std::move(v));
    }

    Expr atom(const SExpr& s)
    {
        const std::string& t = s.text;
        if (t == "id") {
            return ex::id_all();
        }
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
            if (*it == t) {
                return ex::bound(t);
            }
        }
        if (auto v = parse_constant(t)) {
            return ex::cst(*v);
        }
        if (!t.empty() && t.back() == '\'') {
            return ex::pvar(t.substr(0, t.size() - 1));
        }
        return ex::var(t);
    }

    std::vector<std::string> bound_;
};

}  // namespace detail

inline Expr parse_expr(const SExpr& s) { return detail::ExprParser().parse(s); }
inline Expr parse_expr(std::string_view text) { return parse_expr(parse_sexpr(text)); }

// ---------------------------------------------------------------------------
// Structural queries

inline bool structurally_equal(const Expr& a, const Expr& b) { return a == b || to_sexpr(a) == to_sexpr(b); }

/// True if any variable leaf (including array views) is primed.
inline bool has_primed(const Expr& e)
{
    if (e->op == Op::Var) {
        return e->primed;
    }
    if (e->op == Op::IdAll || e->op == Op::Id) {
        return true;
    }
    if (e->view) {
        if (e->view->is_default() ? e->view->primed : false) {
            return true;
        }
        for (const auto& c : e->view->cells) {
            if (has_primed(c)) {
                return true;
            }
        }
    }
    for (const auto& k : e->kids) {
        if (has_primed(k)) {
            return true;
        }
    }
    return false;
}

}  // namespace rgclh
