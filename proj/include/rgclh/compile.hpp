#pragma once

#include <rgclh/expr.hpp>
#include <rgclh/normalize.hpp>
#include <rgclh/ops.hpp>
#include <rgclh/universe.hpp>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace rgclh {

/// Outcome of evaluating a compiled expression: a value or an error.
struct EvalResult {
    bool ok = true;
    Value value;
    EvalErrorKind error = EvalErrorKind::TypeMismatch;
    std::string message;

    bool is_true() const { return ok && value.kind == Kind::Bool && value.i != 0; }
    bool is_false() const { return ok && value.kind == Kind::Bool && value.i == 0; }
};

/// An expression bound to a universe. Variables become frame slots: slot k
/// is the pre-state value of variable k and slot V+k its post-state value.
class Compiled {
public:
    Compiled() = default;

    Compiled(const Universe& u, const Expr& e) : u_(&u), src_(expand(e, u))
    {
        root_ = build(src_);
        collect_slots();
    }

    const Expr& source() const { return src_; }
    const Universe& universe() const { return *u_; }

    /// Slots read by the expression, ascending.
    const std::vector<int>& slots() const { return slots_; }
    bool reads_post() const { return !slots_.empty() && slots_.back() >= static_cast<int>(u_->size()); }

    /// Evaluates on a frame of 2V slots (or V when has_post is false).
    EvalResult eval(const std::uint16_t* frame, bool has_post) const
    {
        Ctx c{frame, has_post, static_cast<int>(u_->size()), {}, -1, {}};
        EvalResult r;
        if (!ev(root_, c, r.value)) {
            r.ok = false;
            r.error = c.err;
            r.message = std::string(error_kind_name(c.err)) + ": " + c.msg;
            if (c.where >= 0) {
                r.message += " in " + to_sexpr(nodes_[static_cast<std::size_t>(c.where)].src);
            }
        }
        return r;
    }

    EvalResult eval_state(const State& s) const { return eval(s.data(), false); }

    EvalResult eval_pair(const State& pre, const State& post) const
    {
        std::vector<std::uint16_t> f(pre);
        f.insert(f.end(), post.begin(), post.end());
        return eval(f.data(), true);
    }

    /// Boolean evaluation that rethrows evaluation errors.
    bool holds(const std::uint16_t* frame, bool has_post) const
    {
        EvalResult r = eval(frame, has_post);
        if (!r.ok) {
            throw EvalError(r.error, r.message);
        }
        return r.value.as_bool();
    }
    bool holds(const State& s) const { return holds(s.data(), false); }
    bool holds(const State& pre, const State& post) const
    {
        EvalResult r = eval_pair(pre, post);
        if (!r.ok) {
            throw EvalError(r.error, r.message);
        }
        return r.value.as_bool();
    }

private:
    struct Node {
        Op op = Op::Const;
        Value value;
        int slot = -1;
        std::vector<int> kids;
        std::vector<int> cells;  // view cells, as node indices
        Kind index = Kind::Thread;
        Expr src;
    };

    struct Ctx {
        const std::uint16_t* frame;
        bool has_post;
        int v;
        EvalErrorKind err;
        int where;
        std::string msg;
    };

    int add(Node n)
    {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    int var_node(int id, bool primed, const Expr& src)
    {
        Node n;
        n.op = Op::Var;
        n.slot = primed ? id + static_cast<int>(u_->size()) : id;
        n.src = src;
        return add(std::move(n));
    }

    int build(const Expr& e)
    {
        Node n;
        n.op = e->op;
        n.src = e;
        switch (e->op) {
        case Op::Const: n.value = e->value; return add(std::move(n));
        case Op::Var: return var_node(u_->id(e->name), e->primed, e);
        case Op::Bound:
        case Op::Forall:
        case Op::Exists:
        case Op::Id:
        case Op::IdAll: throw EvalError(EvalErrorKind::TypeMismatch, "unexpanded form " + to_sexpr(e));
        default: break;
        }
        for (const auto& k : e->kids) {
            n.kids.push_back(build(k));
        }
        if (e->view) {
            const ArrayDecl* arr = u_->array(e->view->array);
            if (!arr) {
                throw EvalError(EvalErrorKind::UndeclaredVariable, "array " + e->view->array);
            }
            n.index = arr->index == IndexKind::Threads ? Kind::Thread : Kind::Node;
            if (e->view->is_default()) {
                for (int id : arr->cells) {
                    n.cells.push_back(var_node(id, e->view->primed, e));
                }
            } else {
                for (const auto& c : e->view->cells) {
                    n.cells.push_back(build(c));
                }
            }
        }
        return add(std::move(n));
    }

    void collect_slots()
    {
        for (const auto& n : nodes_) {
            if (n.op == Op::Var) {
                slots_.push_back(n.slot);
            }
        }
        std::sort(slots_.begin(), slots_.end());
        slots_.erase(std::unique(slots_.begin(), slots_.end()), slots_.end());
    }

    bool fail(Ctx& c, int where, EvalErrorKind k, std::string msg) const
    {
        c.err = k;
        c.where = where;
        c.msg = std::move(msg);
        return false;
    }

    bool ev_bool(int n, Ctx& c, bool& out) const
    {
        Value v;
        if (!ev(n, c, v)) {
            return false;
        }
        if (v.kind != Kind::Bool) {
            return fail(c, n, EvalErrorKind::TypeMismatch, std::string("expected bool, got ") + kind_name(v.kind));
        }
        out = v.i != 0;
        return true;
    }

    /// Resolves an index value into a cell position.
    bool cell_pos(int n, const Node& nd, const Value& idx, Ctx& c, std::size_t& pos) const
    {
        if (idx.kind != nd.index) {
            return fail(c, n, EvalErrorKind::TypeMismatch,
                        std::string("index must be a ") + kind_name(nd.index) + ", got " + kind_name(idx.kind));
        }
        if (idx.is_bottom()) {
            return fail(c, n, EvalErrorKind::DereferenceUninitialised, "dereferencing bot");
        }
        if (idx.i < 0 || static_cast<std::size_t>(idx.i) >= nd.cells.size()) {
            return fail(c, n, EvalErrorKind::OutOfDomain, "index " + to_string(idx) + " out of range");
        }
        pos = static_cast<std::size_t>(idx.i);
        return true;
    }

    bool ev(int n, Ctx& c, Value& out) const
    {
        const Node& nd = nodes_[static_cast<std::size_t>(n)];
        switch (nd.op) {
        case Op::Const: out = nd.value; return true;
        case Op::Var: {
            if (nd.slot >= c.v && !c.has_post) {
                return fail(c, n, EvalErrorKind::MissingPostState, "post-state variable in a state predicate");
            }
            int id = nd.slot >= c.v ? nd.slot - c.v : nd.slot;
            out = u_->var(static_cast<std::size_t>(id)).domain->values[c.frame[nd.slot]];
            return true;
        }
        case Op::And:
        case Op::Or: {
            bool want = nd.op == Op::Or;  // the value that decides the result
            bool errored = false;
            Ctx saved = c;
            for (int k : nd.kids) {
                bool b = false;
                if (!ev_bool(k, c, b)) {
                    if (!errored) {
                        saved = c;
                        errored = true;
                    }
                    continue;
                }
                if (b == want) {
                    out = Value::boolean(want);
                    return true;
                }
            }
            if (errored) {
                c = saved;
                return false;
            }
            out = Value::boolean(!want);
            return true;
        }
        case Op::Implies: {
            bool a = false;
            bool b = false;
            bool a_ok = ev_bool(nd.kids[0], c, a);
            if (a_ok && !a) {
                out = Value::boolean(true);
                return true;
            }
            Ctx saved = c;
            bool b_ok = ev_bool(nd.kids[1], c, b);
            if (b_ok && b) {
                out = Value::boolean(true);
                return true;
            }
            if (!a_ok) {
                c = saved;
                return false;
            }
            if (!b_ok) {
                return false;
            }
            out = Value::boolean(false);
            return true;
        }
        case Op::Iff: {
            bool a = false;
            bool b = false;
            if (!ev_bool(nd.kids[0], c, a) || !ev_bool(nd.kids[1], c, b)) {
                return false;
            }
            out = Value::boolean(a == b);
            return true;
        }
        case Op::Ite: {
            bool cond = false;
            if (!ev_bool(nd.kids[0], c, cond)) {
                return false;
            }
            return ev(nd.kids[cond ? 1 : 2], c, out);
        }
        case Op::Select: {
            Value idx;
            std::size_t pos = 0;
            if (!ev(nd.kids[0], c, idx) || !cell_pos(n, nd, idx, c, pos)) {
                return false;
            }
            return ev(nd.cells[pos], c, out);
        }
        case Op::FMap: {
            Value l;
            if (!ev(nd.kids[0], c, l)) {
                return false;
            }
            if (l.kind != Kind::List) {
                return fail(c, n, EvalErrorKind::TypeMismatch, "fmap over a non-list");
            }
            Value xs[kMaxListLen];
            for (std::size_t k = 0; k < l.len; ++k) {
                std::size_t pos = 0;
                if (!cell_pos(n, nd, l.at(k), c, pos) || !ev(nd.cells[pos], c, xs[k])) {
                    return false;
                }
            }
            return apply(n, Op::ListLit, std::span<const Value>(xs, l.len), c, out);
        }
        case Op::Injective: {
            Value xs[16];
            std::size_t m = std::min<std::size_t>(nd.cells.size(), 16);
            for (std::size_t k = 0; k < m; ++k) {
                if (!ev(nd.cells[k], c, xs[k])) {
                    return false;
                }
                for (std::size_t j = 0; j < k; ++j) {
                    if (xs[j] == xs[k]) {
                        out = Value::boolean(false);
                        return true;
                    }
                }
            }
            out = Value::boolean(true);
            return true;
        }
        case Op::InRange: {
            Value x;
            if (!ev(nd.kids[0], c, x)) {
                return false;
            }
            for (int cell : nd.cells) {
                Value y;
                if (!ev(cell, c, y)) {
                    return false;
                }
                if (y.kind != x.kind) {
                    return fail(c, n, EvalErrorKind::TypeMismatch, "inran: mixed kinds");
                }
                if (y == x) {
                    out = Value::boolean(true);
                    return true;
                }
            }
            out = Value::boolean(false);
            return true;
        }
        default: break;
        }
        Value args[4];
        std::vector<Value> many;
        std::span<const Value> a;
        if (nd.kids.size() <= 4) {
            for (std::size_t k = 0; k < nd.kids.size(); ++k) {
                if (!ev(nd.kids[k], c, args[k])) {
                    return false;
                }
            }
            a = std::span<const Value>(args, nd.kids.size());
        } else {
            many.resize(nd.kids.size());
            for (std::size_t k = 0; k < nd.kids.size(); ++k) {
                if (!ev(nd.kids[k], c, many[k])) {
                    return false;
                }
            }
            a = many;
        }
        return apply(n, nd.op, a, c, out);
    }

    bool apply(int n, Op op, std::span<const Value> a, Ctx& c, Value& out) const
    {
        // common cases without going through the throwing path
        if (op == Op::Eq || op == Op::Ne) {
            if (a[0].kind != a[1].kind) {
                return fail(c, n, EvalErrorKind::TypeMismatch,
                            std::string("comparing ") + kind_name(a[0].kind) + " with " + kind_name(a[1].kind));
            }
            out = Value::boolean((a[0] == a[1]) == (op == Op::Eq));
            return true;
        }
        try {
            out = ops::apply(op, a);
            return true;
        } catch (const EvalError& e) {
            std::string what = e.what();
            auto colon = what.find(": ");
            return fail(c, n, e.kind(), colon == std::string::npos ? what : what.substr(colon + 2));
        }
    }

    const Universe* u_ = nullptr;
    Expr src_;
    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<int> slots_;
};

namespace detail {

inline bool is_ground(const Expr& e)
{
    if (e->op == Op::Var || e->op == Op::Bound || e->op == Op::Id || e->op == Op::IdAll) return false;
    if (e->view) {
        if (e->view->is_default()) return false;
        for (const auto& c : e->view->cells) {
            if (!is_ground(c)) return false;
        }
    }
    for (const auto& k : e->kids) {
        if (!is_ground(k)) return false;
    }
    return true;
}

}  // namespace detail

/// Replaces every maximal variable-free subterm by its value; subterms that
/// fail to evaluate are kept for evaluation to report.
inline Expr fold_ground(const Expr& e, const Universe& u)
{
    if (e->op == Op::Const) return e;
    if (detail::is_ground(e)) {
        State zero(u.size(), 0);
        EvalResult r = Compiled(u, e).eval_state(zero);
        return r.ok ? ex::cst(r.value) : e;
    }
    ExprNode n = *e;
    bool changed = false;
    for (auto& k : n.kids) {
        Expr f = fold_ground(k, u);
        changed = changed || f != k;
        k = f;
    }
    if (n.view && !n.view->is_default()) {
        ArrayView v = *n.view;
        for (auto& c : v.cells) {
            Expr f = fold_ground(c, u);
            changed = changed || f != c;
            c = f;
        }
        n.view = std::make_shared<const ArrayView>(std::move(v));
    }
    return changed ? simplify_node(ex::make(std::move(n))) : e;
}

}  // namespace rgclh
