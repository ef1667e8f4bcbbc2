#pragma once

#include <rgclh/expr.hpp>
#include <rgclh/ops.hpp>
#include <rgclh/universe.hpp>

#include <map>
#include <string>
#include <vector>

namespace rgclh {

// ---------------------------------------------------------------------------
// Priming

namespace detail {

inline std::shared_ptr<const ArrayView> prime_view(const ArrayView& v);

inline Expr prime_rec(const Expr& e)
{
    switch (e->op) {
    case Op::Const:
    case Op::Bound: return e;
    case Op::Var: {
        if (e->primed) {
            throw EvalError(EvalErrorKind::TypeMismatch, "priming an already primed variable " + e->name);
        }
        return ex::pvar(e->name);
    }
    case Op::Id:
    case Op::IdAll: throw EvalError(EvalErrorKind::TypeMismatch, "cannot prime a relation");
    default: break;
    }
    ExprNode n = *e;
    if (n.view) {
        n.view = prime_view(*n.view);
    }
    for (auto& k : n.kids) {
        k = prime_rec(k);
    }
    return ex::make(std::move(n));
}

inline std::shared_ptr<const ArrayView> prime_view(const ArrayView& v)
{
    ArrayView out = v;
    if (v.is_default()) {
        if (v.primed) {
            throw EvalError(EvalErrorKind::TypeMismatch, "priming an already primed array " + v.array);
        }
        out.primed = true;
    } else {
        for (auto& c : out.cells) {
            c = prime_rec(c);
        }
    }
    return std::make_shared<const ArrayView>(std::move(out));
}

}  // namespace detail

/// The predicate read in the post-state: every variable leaf becomes primed.
inline Expr prime(const Expr& p) { return detail::prime_rec(p); }

// ---------------------------------------------------------------------------
// Simplification: constant folding and flattening of connectives

inline bool is_const_bool(const Expr& e, bool b)
{
    return e->op == Op::Const && e->value.kind == Kind::Bool && (e->value.i != 0) == b;
}

inline Expr simplify_node(const Expr& e)
{
    switch (e->op) {
    case Op::And:
    case Op::Or: {
        bool is_and = e->op == Op::And;
        std::vector<Expr> kids;
        for (const auto& k : e->kids) {
            if (k->op == e->op) {
                kids.insert(kids.end(), k->kids.begin(), k->kids.end());
            } else if (is_const_bool(k, !is_and)) {
                return is_and ? ex::ff() : ex::tt();
            } else if (!is_const_bool(k, is_and)) {
                kids.push_back(k);
            }
        }
        if (kids.empty()) {
            return is_and ? ex::tt() : ex::ff();
        }
        if (kids.size() == 1) {
            return kids.front();
        }
        return ex::node(e->op, std::move(kids));
    }
    case Op::Not:
        if (e->kids[0]->op == Op::Const && e->kids[0]->value.kind == Kind::Bool) {
            return ex::cst(Value::boolean(e->kids[0]->value.i == 0));
        }
        if (e->kids[0]->op == Op::Not) {
            return e->kids[0]->kids[0];
        }
        return e;
    case Op::Implies: {
        const auto& a = e->kids[0];
        const auto& b = e->kids[1];
        if (is_const_bool(a, true)) return b;
        if (is_const_bool(a, false) || is_const_bool(b, true)) return ex::tt();
        if (is_const_bool(b, false)) return simplify_node(ex::not_(a));
        return e;
    }
    case Op::Iff: {
        const auto& a = e->kids[0];
        const auto& b = e->kids[1];
        if (is_const_bool(a, true)) return b;
        if (is_const_bool(b, true)) return a;
        if (is_const_bool(a, false)) return simplify_node(ex::not_(b));
        if (is_const_bool(b, false)) return simplify_node(ex::not_(a));
        return e;
    }
    case Op::Ite:
        if (is_const_bool(e->kids[0], true)) return e->kids[1];
        if (is_const_bool(e->kids[0], false)) return e->kids[2];
        return e;
    case Op::Const:
    case Op::Var:
    case Op::Bound:
    case Op::Select:
    case Op::FMap:
    case Op::Injective:
    case Op::InRange:
    case Op::Forall:
    case Op::Exists:
    case Op::Id:
    case Op::IdAll: return e;
    default: break;
    }
    std::vector<Value> args;
    for (const auto& k : e->kids) {
        if (k->op != Op::Const) {
            return e;
        }
        args.push_back(k->value);
    }
    try {
        return ex::cst(ops::apply(e->op, args));
    } catch (const EvalError&) {
        return e;  // leave it for evaluation to report
    }
}

inline Expr simplify(const Expr& e)
{
    if (e->kids.empty() && !e->view) {
        return simplify_node(e);
    }
    ExprNode n = *e;
    bool changed = false;
    for (auto& k : n.kids) {
        Expr s = simplify(k);
        changed = changed || s != k;
        k = s;
    }
    if (n.view && !n.view->is_default()) {
        ArrayView v = *n.view;
        for (auto& c : v.cells) {
            Expr s = simplify(c);
            changed = changed || s != c;
            c = s;
        }
        n.view = std::make_shared<const ArrayView>(std::move(v));
    }
    return simplify_node(changed ? ex::make(std::move(n)) : e);
}

// ---------------------------------------------------------------------------
// Expansion against a universe: quantifiers are instantiated, ID forms become
// equalities, and constant array indices resolve to cell variables.

namespace detail {

inline int array_index(const Universe& u, const ArrayDecl& arr, const Value& idx)
{
    Kind want = arr.index == IndexKind::Threads ? Kind::Thread : Kind::Node;
    if (idx.kind != want) {
        throw EvalError(EvalErrorKind::TypeMismatch, "index of " + arr.name + " must be a " + kind_name(want));
    }
    if (idx.is_bottom()) {
        throw EvalError(EvalErrorKind::DereferenceUninitialised, "dereferencing bot in " + arr.name);
    }
    int count = arr.index == IndexKind::Threads ? u.threads() : u.nodes();
    if (idx.i < 0 || idx.i >= count) {
        throw EvalError(EvalErrorKind::OutOfDomain, "index " + to_string(idx) + " out of range for " + arr.name);
    }
    return idx.i;
}

inline const ArrayDecl& require_array(const Universe& u, const std::string& name)
{
    const ArrayDecl* a = u.array(name);
    if (!a) {
        throw EvalError(EvalErrorKind::UndeclaredVariable, "array " + name);
    }
    return *a;
}

class Expander {
public:
    explicit Expander(const Universe& u) : u_(u) {}

    Expr run(const Expr& e) { return simplify(rec(e)); }

private:
    Expr rec(const Expr& e)
    {
        switch (e->op) {
        case Op::Const: return e;
        case Op::Var:
            if (!u_.find(e->name)) {
                throw EvalError(EvalErrorKind::UndeclaredVariable, e->name);
            }
            return e;
        case Op::Bound: {
            for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
                if (it->first == e->name) {
                    return ex::cst(it->second);
                }
            }
            throw EvalError(EvalErrorKind::UndeclaredVariable, "unbound " + e->name);
        }
        case Op::Forall:
        case Op::Exists: {
            int count = e->qdom == IndexKind::Threads ? u_.threads() : u_.nodes();
            std::vector<Expr> parts;
            for (int k = 0; k < count; ++k) {
                env_.emplace_back(e->name, e->qdom == IndexKind::Threads ? Value::thread(k) : Value::node(k));
                parts.push_back(simplify(rec(e->kids[0])));
                env_.pop_back();
            }
            return e->op == Op::Forall ? ex::and_(std::move(parts)) : ex::or_(std::move(parts));
        }
        case Op::Id: {
            std::vector<Expr> parts;
            for (const auto& k : e->kids) {
                if (k->op == Op::Var && !u_.find(k->name) && u_.array(k->name)) {
                    for (int id : u_.array(k->name)->cells) {
                        const std::string& cell = u_.var(static_cast<std::size_t>(id)).name;
                        parts.push_back(ex::eq(ex::pvar(cell), ex::var(cell)));
                    }
                    continue;
                }
                Expr x = simplify(rec(k));
                parts.push_back(ex::eq(prime(x), x));
            }
            return ex::and_(std::move(parts));
        }
        case Op::IdAll: {
            std::vector<Expr> parts;
            for (const auto& v : u_.vars()) {
                parts.push_back(ex::eq(ex::pvar(v.name), ex::var(v.name)));
            }
            return ex::and_(std::move(parts));
        }
        default: break;
        }
        ExprNode n = *e;
        for (auto& k : n.kids) {
            k = simplify(rec(k));
        }
        if (n.view) {
            const ArrayDecl& arr = require_array(u_, n.view->array);
            if (!n.view->is_default()) {
                if (n.view->cells.size() != arr.cells.size()) {
                    throw EvalError(EvalErrorKind::TypeMismatch, "wrong cell count for " + arr.name);
                }
                ArrayView v = *n.view;
                for (auto& c : v.cells) {
                    c = simplify(rec(c));
                }
                n.view = std::make_shared<const ArrayView>(std::move(v));
            }
            if (n.op == Op::Select && n.kids[0]->op == Op::Const && !n.kids[0]->value.is_bottom()) {
                int k = array_index(u_, arr, n.kids[0]->value);
                if (n.view->is_default()) {
                    return ex::var(u_.var(static_cast<std::size_t>(arr.cells[static_cast<std::size_t>(k)])).name,
                                   n.view->primed);
                }
                return n.view->cells[static_cast<std::size_t>(k)];
            }
        }
        return ex::make(std::move(n));
    }

    const Universe& u_;
    std::vector<std::pair<std::string, Value>> env_;
};

}  // namespace detail

inline Expr expand(const Expr& e, const Universe& u) { return detail::Expander(u).run(e); }

/// Top-level conjuncts (nested conjunctions flattened).
inline std::vector<Expr> conjuncts(const Expr& e)
{
    std::vector<Expr> out;
    if (e->op == Op::And) {
        for (const auto& k : e->kids) {
            auto sub = conjuncts(k);
            out.insert(out.end(), sub.begin(), sub.end());
        }
    } else if (!is_const_bool(e, true)) {
        out.push_back(e);
    }
    return out;
}

/// The relation (s, s') -> p(s) and r(s, s').
inline Expr restrict(const Expr& p, const Expr& r) { return ex::and_({p, r}); }

// ---------------------------------------------------------------------------
// Substitution

/// A simultaneous substitution over pre-state leaves: whole variables, and
/// array cells addressed by a (possibly dynamic) index expression.
struct Substitution {
    struct Cell {
        std::string array;
        Expr index;
        Expr value;
    };
    std::map<std::string, Expr> vars;
    std::vector<Cell> cells;

    bool touches_array(const Universe& u, const std::string& array) const
    {
        for (const auto& c : cells) {
            if (c.array == array) {
                return true;
            }
        }
        const ArrayDecl* a = u.array(array);
        if (!a) {
            return false;
        }
        for (int id : a->cells) {
            if (vars.count(u.var(static_cast<std::size_t>(id)).name)) {
                return true;
            }
        }
        return false;
    }
};

namespace detail {

class Substituter {
public:
    Substituter(const Universe& u, const Substitution& s) : u_(u), s_(s) {}

    Expr rec(const Expr& e)
    {
        if (e->op == Op::Var) {
            return e->primed ? e : leaf(e->name);
        }
        if (e->op == Op::Id || e->op == Op::IdAll) {
            throw EvalError(EvalErrorKind::TypeMismatch, "substitution into a relation shorthand");
        }
        if (e->kids.empty() && !e->view) {
            return e;
        }
        ExprNode n = *e;
        for (auto& k : n.kids) {
            k = rec(k);
        }
        if (n.view) {
            const ArrayView& v = *n.view;
            if (!v.is_default()) {
                ArrayView w = v;
                for (auto& c : w.cells) {
                    c = rec(c);
                }
                n.view = std::make_shared<const ArrayView>(std::move(w));
            } else if (!v.primed && s_.touches_array(u_, v.array)) {
                const ArrayDecl& arr = require_array(u_, v.array);
                ArrayView w{v.array, false, {}};
                for (int id : arr.cells) {
                    w.cells.push_back(leaf(u_.var(static_cast<std::size_t>(id)).name));
                }
                n.view = std::make_shared<const ArrayView>(std::move(w));
            }
        }
        return ex::make(std::move(n));
    }

private:
    Expr leaf(const std::string& name)
    {
        auto it = s_.vars.find(name);
        Expr base = it != s_.vars.end() ? it->second : ex::var(name);
        auto id = u_.find(name);
        if (!id) {
            throw EvalError(EvalErrorKind::UndeclaredVariable, name);
        }
        const VarDecl& d = u_.var(static_cast<std::size_t>(*id));
        if (d.array.empty()) {
            return base;
        }
        const ArrayDecl& arr = require_array(u_, d.array);
        for (const auto& c : s_.cells) {
            if (c.array != d.array) {
                continue;
            }
            Expr key = arr.index == IndexKind::Threads ? ex::cst(Value::thread(d.index)) : ex::nodec(d.index);
            base = ex::ite(ex::eq(c.index, key), c.value, base);
        }
        return base;
    }

    const Universe& u_;
    const Substitution& s_;
};

}  // namespace detail

inline Expr substitute(const Expr& p, const Substitution& s, const Universe& u)
{
    return simplify(detail::Substituter(u, s).rec(p));
}

/// p with every pre-state occurrence of variable x replaced by e.
inline Expr substitute(const Expr& p, const std::string& x, const Expr& e, const Universe& u)
{
    if (!u.find(x)) {
        throw EvalError(EvalErrorKind::UndeclaredVariable, x);
    }
    if (has_primed(e)) {
        throw EvalError(EvalErrorKind::TypeMismatch, "substituted expression must be prime-free");
    }
    Substitution s;
    s.vars[x] = e;
    return substitute(p, s, u);
}

/// p with the array cell array[index] replaced by e.
inline Expr substitute_cell(const Expr& p, const std::string& array, const Expr& index, const Expr& e,
                            const Universe& u)
{
    detail::require_array(u, array);
    Substitution s;
    s.cells.push_back({array, index, e});
    return substitute(p, s, u);
}

/// Partial evaluation: every pre-state leaf is replaced by its value in s,
/// leaving a predicate over the post-state only.
inline Expr bind_pre(const Expr& e, const Universe& u, const State& s)
{
    if (e->op == Op::Var) {
        return e->primed ? e : ex::cst(value_of(u, s, u.id(e->name)));
    }
    if (e->kids.empty() && !e->view) {
        return e;
    }
    ExprNode n = *e;
    for (auto& k : n.kids) {
        k = bind_pre(k, u, s);
    }
    if (n.view) {
        ArrayView w = *n.view;
        if (!w.is_default()) {
            for (auto& c : w.cells) {
                c = bind_pre(c, u, s);
            }
        } else if (!w.primed) {
            for (int id : detail::require_array(u, w.array).cells) {
                w.cells.push_back(ex::cst(value_of(u, s, id)));
            }
        }
        n.view = std::make_shared<const ArrayView>(std::move(w));
    }
    return simplify_node(ex::make(std::move(n)));
}

}  // namespace rgclh
