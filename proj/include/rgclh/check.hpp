#pragma once

#include <rgclh/compile.hpp>
#include <rgclh/normalize.hpp>
#include <rgclh/solver.hpp>
#include <rgclh/universe.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rgclh {

/// An evaluation error raised while checking, with the state it occurred in.
class StateEvalError : public EvalError {
public:
    StateEvalError(EvalErrorKind k, const std::string& what, State pre, std::optional<State> post)
        : EvalError(k, what), pre_(std::move(pre)), post_(std::move(post))
    {
    }
    const State& pre() const { return pre_; }
    const std::optional<State>& post() const { return post_; }

private:
    State pre_;
    std::optional<State> post_;
};

enum class CheckMode { Full, Filtered };

inline const char* mode_name(CheckMode m) { return m == CheckMode::Full ? "full" : "filtered"; }

struct Verdict {
    bool holds = true;
    std::optional<State> state;  // counterexample (pre-state for relations)
    std::optional<State> post;
    std::string failed;          // the conjunct of the consequent that failed
    CheckMode mode = CheckMode::Full;
    int syntactic = 0;   // goals discharged by matching a hypothesis
    int enumerated = 0;  // goals discharged by search
    std::uint64_t nodes = 0;

    explicit operator bool() const { return holds; }
};

struct CheckOptions {
    Expr filter;  // restricts the enumerated pre-states; null for the full universe
    std::uint64_t node_limit = std::numeric_limits<std::uint64_t>::max();
};

// ---------------------------------------------------------------------------
// Enumeration

inline void for_each_state(const Universe& u, const Expr& filter, const std::function<bool(const State&)>& fn)
{
    std::vector<std::unique_ptr<Compiled>> cs;
    std::vector<const Compiled*> ptrs;
    if (filter) {
        Expr f = expand(filter, u);
        if (has_primed(f)) {
            throw EvalError(EvalErrorKind::MissingPostState, "enumeration filter mentions the post-state");
        }
        for (const auto& c : conjuncts(f)) {
            cs.push_back(std::make_unique<Compiled>(u, c));
            ptrs.push_back(cs.back().get());
        }
    }
    Solver solver(u, static_cast<int>(u.size()), ptrs);
    State s(u.size(), 0);
    std::vector<int> fixed(u.size(), -1);
    solver.for_each(fixed, [&](const std::uint16_t* f) {
        std::copy(f, f + u.size(), s.begin());
        return fn(s);
    });
}

/// All states satisfying the filter, in lexicographic order.
inline std::vector<State> enumerate(const Universe& u, const Expr& filter = nullptr)
{
    std::vector<State> out;
    for_each_state(u, filter, [&](const State& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

inline std::uint64_t count_states(const Universe& u, const Expr& filter = nullptr)
{
    std::uint64_t n = 0;
    for_each_state(u, filter, [&](const State&) {
        ++n;
        return true;
    });
    return n;
}

// ---------------------------------------------------------------------------
// Implication

namespace detail {

/// Decides hyps => goal over frames of `nslots` slots. Goals are split into
/// conjuncts; conjuncts that appear among the hypotheses (after closing them
/// under modus ponens) are discharged directly and the rest are searched for
/// a frame satisfying the hypotheses and falsifying the conjunct. Of all such
/// frames the lexicographically least is reported, which is the first
/// counterexample a plain enumeration would meet.
class Prover {
public:
    Prover(const Universe& u, int nslots, std::uint64_t node_limit) : u_(u), nslots_(nslots), limit_(node_limit) {}

    Verdict run(const std::vector<Expr>& hyps, const Expr& goal)
    {
        Verdict v;
        std::vector<Expr> hs;
        for (const auto& h : hyps) {
            for (const auto& c : conjuncts(h)) hs.push_back(c);
        }
        prove(hs, goal, v);
        if (!best_) {
            return v;
        }
        // classify the least frame against the whole implication
        Compiled whole(u_, ex::implies(ex::and_(hyps), goal));
        EvalResult r = whole.eval(best_->frame.data(), nslots_ > static_cast<int>(u_.size()));
        if (r.is_true()) {
            return brute_force(hyps, goal, v);
        }
        fill(v, best_->frame, r);
        return v;
    }

private:
    struct Leaf {
        std::vector<std::uint16_t> frame;
        std::string goal;
    };

    void fill(Verdict& v, const std::vector<std::uint16_t>& frame, const EvalResult& r)
    {
        State pre(frame.begin(), frame.begin() + static_cast<long>(u_.size()));
        std::optional<State> post;
        if (nslots_ > static_cast<int>(u_.size())) {
            post = State(frame.begin() + static_cast<long>(u_.size()), frame.end());
        }
        if (!r.ok) {
            throw StateEvalError(r.error, r.message + " at " + describe(u_, pre), pre, post);
        }
        v.holds = false;
        v.state = pre;
        v.post = post;
        v.failed = best_ ? best_->goal : std::string();
    }

    Verdict brute_force(const std::vector<Expr>& hyps, const Expr& goal, Verdict v)
    {
        Compiled neg(u_, ex::not_(ex::implies(ex::and_(hyps), goal)));
        Solver s(u_, nslots_, {&neg});
        s.set_node_limit(limit_);
        std::vector<int> fixed(static_cast<std::size_t>(nslots_), -1);
        SolveOutcome o = s.solve_lexmin(fixed, 0);
        v.nodes += o.nodes;
        if (o.status == SolveStatus::Unsat) {
            v.holds = true;
            return v;
        }
        best_ = Leaf{o.frame, to_sexpr(goal)};
        EvalResult r{};
        if (o.status == SolveStatus::Error) {
            r.ok = false;
            r.error = o.error;
            r.message = o.message;
        } else {
            r.value = Value::boolean(false);
        }
        fill(v, o.frame, r);
        return v;
    }

    static std::set<std::string> keys(const std::vector<Expr>& hs)
    {
        std::set<std::string> out;
        for (const auto& h : hs) out.insert(to_sexpr(h));
        return out;
    }

    // modus ponens and common disjunct conjuncts, to a fixpoint
    static void close(std::vector<Expr>& hs, std::set<std::string>& ks)
    {
        bool changed = true;
        while (changed) {
            changed = false;
            std::size_t n = hs.size();
            for (std::size_t k = 0; k < n; ++k) {
                const Expr h = hs[k];
                std::vector<Expr> add;
                if (h->op == Op::Implies) {
                    bool all = true;
                    for (const auto& x : conjuncts(h->kids[0])) {
                        if (!ks.count(to_sexpr(x))) {
                            all = false;
                            break;
                        }
                    }
                    if (all) add = conjuncts(h->kids[1]);
                } else if (h->op == Op::Or) {
                    std::set<std::string> common;
                    bool first = true;
                    std::map<std::string, Expr> byk;
                    for (const auto& d : h->kids) {
                        std::set<std::string> here;
                        for (const auto& c : conjuncts(d)) {
                            here.insert(to_sexpr(c));
                            byk.emplace(to_sexpr(c), c);
                        }
                        if (first) {
                            common = here;
                            first = false;
                        } else {
                            std::set<std::string> keep;
                            for (const auto& c : common) {
                                if (here.count(c)) keep.insert(c);
                            }
                            common = keep;
                        }
                    }
                    for (const auto& c : common) add.push_back(byk.at(c));
                }
                for (const auto& a : add) {
                    if (ks.insert(to_sexpr(a)).second) {
                        hs.push_back(a);
                        changed = true;
                    }
                }
            }
        }
    }

    // post-state variables pinned by a hypothesis v' = e with e pre-only
    static std::map<std::string, Expr> post_equalities(const std::vector<Expr>& hs)
    {
        std::map<std::string, Expr> out;
        for (const auto& h : hs) {
            if (h->op != Op::Eq) continue;
            for (int side = 0; side < 2; ++side) {
                const Expr& x = h->kids[static_cast<std::size_t>(side)];
                const Expr& e = h->kids[static_cast<std::size_t>(1 - side)];
                if (x->op == Op::Var && x->primed && !has_primed(e)) {
                    out.emplace(x->name, e);
                    break;
                }
            }
        }
        return out;
    }

    Expr rewrite_post(const Expr& e, const std::map<std::string, Expr>& eqs) const
    {
        if (e->op == Op::Var) {
            if (!e->primed) return e;
            auto it = eqs.find(e->name);
            return it == eqs.end() ? e : it->second;
        }
        ExprNode n = *e;
        bool changed = false;
        for (auto& k : n.kids) {
            Expr r = rewrite_post(k, eqs);
            changed = changed || r != k;
            k = r;
        }
        if (n.view) {
            ArrayView av = *n.view;
            if (av.is_default() && av.primed) {
                const ArrayDecl* arr = u_.array(av.array);
                std::vector<Expr> cells;
                bool all = arr != nullptr;
                for (std::size_t k = 0; all && k < arr->cells.size(); ++k) {
                    auto it = eqs.find(u_.var(static_cast<std::size_t>(arr->cells[k])).name);
                    if (it == eqs.end()) {
                        all = false;
                    } else {
                        cells.push_back(it->second);
                    }
                }
                if (all) {
                    bool identity = true;
                    for (std::size_t k = 0; k < cells.size(); ++k) {
                        identity = identity && cells[k]->op == Op::Var && !cells[k]->primed &&
                                   cells[k]->name == u_.var(static_cast<std::size_t>(arr->cells[k])).name;
                    }
                    av.primed = false;
                    if (!identity) av.cells = std::move(cells);
                    changed = true;
                }
            } else if (!av.is_default()) {
                for (auto& c : av.cells) {
                    Expr r = rewrite_post(c, eqs);
                    changed = changed || r != c;
                    c = r;
                }
            }
            n.view = std::make_shared<const ArrayView>(std::move(av));
        }
        return changed ? ex::make(std::move(n)) : e;
    }

    void prove(std::vector<Expr> hs, const Expr& goal, Verdict& v)
    {
        std::set<std::string> ks = keys(hs);
        close(hs, ks);
        auto eqs = post_equalities(hs);
        if (eqs.empty()) {
            goal_rec(hs, ks, goal, v);
            return;
        }
        std::size_t n = hs.size();
        for (std::size_t k = 0; k < n; ++k) {
            Expr r = simplify(rewrite_post(hs[k], eqs));
            for (const auto& c : conjuncts(r)) {
                if (ks.insert(to_sexpr(c)).second) hs.push_back(c);
            }
        }
        close(hs, ks);
        goal_rec(hs, ks, simplify(rewrite_post(goal, eqs)), v);
    }

    // case split on the first small disjunctive hypothesis
    bool split(const std::vector<Expr>& hs, const Expr& goal, Verdict& v)
    {
        for (std::size_t k = 0; k < hs.size(); ++k) {
            const Expr& h = hs[k];
            if (h->op != Op::Or || cases_ * h->kids.size() > 64) continue;
            cases_ *= h->kids.size();
            for (const auto& d : h->kids) {
                std::vector<Expr> more;
                for (std::size_t j = 0; j < hs.size(); ++j) {
                    if (j != k) more.push_back(hs[j]);
                }
                for (const auto& c : conjuncts(d)) more.push_back(c);
                prove(std::move(more), goal, v);
            }
            cases_ /= h->kids.size();
            return true;
        }
        return false;
    }

    void goal_rec(const std::vector<Expr>& hs, const std::set<std::string>& ks, const Expr& goal, Verdict& v)
    {
        if (is_const_bool(goal, true)) {
            ++v.syntactic;
            return;
        }
        if (ks.count(to_sexpr(goal)) || ks.count("false")) {
            ++v.syntactic;
            return;
        }
        if ((goal->op == Op::Eq || goal->op == Op::Iff || goal->op == Op::Le) &&
            to_sexpr(goal->kids[0]) == to_sexpr(goal->kids[1])) {
            ++v.syntactic;
            return;
        }
        if (goal->op == Op::And) {
            for (const auto& k : goal->kids) goal_rec(hs, ks, k, v);
            return;
        }
        if (goal->op == Op::Implies) {
            std::vector<Expr> more = hs;
            for (const auto& c : conjuncts(goal->kids[0])) more.push_back(c);
            prove(std::move(more), goal->kids[1], v);
            return;
        }
        if (goal->op == Op::Or) {
            for (const auto& d : goal->kids) {
                if (ks.count(to_sexpr(d))) {
                    ++v.syntactic;
                    return;
                }
            }
        }
        if (split(hs, goal, v)) return;
        ++v.enumerated;
        search(hs, goal, v);
    }

    const Compiled* compiled(const Expr& e)
    {
        std::string k = to_sexpr(e);
        auto it = cache_.find(k);
        if (it == cache_.end()) {
            it = cache_.emplace(k, std::make_unique<Compiled>(u_, e)).first;
        }
        return it->second.get();
    }

    void search(const std::vector<Expr>& hs, const Expr& goal, Verdict& v)
    {
        // split on disjunctive hypotheses while the case count stays small
        std::vector<std::vector<Expr>> cases{{}};
        std::vector<Expr> plain;
        for (const auto& h : hs) {
            if (h->op == Op::Or && cases.size() * h->kids.size() <= 64) {
                std::vector<std::vector<Expr>> next;
                for (const auto& c : cases) {
                    for (const auto& d : h->kids) {
                        auto n = c;
                        for (const auto& x : conjuncts(d)) n.push_back(x);
                        next.push_back(std::move(n));
                    }
                }
                cases = std::move(next);
            } else {
                plain.push_back(h);
            }
        }
        Expr neg = simplify(ex::not_(goal));
        for (const auto& extra : cases) {
            std::vector<const Compiled*> cs;
            cs.push_back(compiled(neg));
            for (const auto& h : plain) cs.push_back(compiled(h));
            for (const auto& h : extra) cs.push_back(compiled(h));
            Solver s(u_, nslots_, cs);
            s.set_node_limit(limit_);
            std::vector<int> fixed(static_cast<std::size_t>(nslots_), -1);
            SolveOutcome o = s.solve_lexmin(fixed, 0);
            v.nodes += o.nodes;
            if (o.status != SolveStatus::Unsat && (!best_ || o.frame < best_->frame)) {
                best_ = Leaf{o.frame, to_sexpr(goal)};
            }
        }
    }

    const Universe& u_;
    int nslots_;
    std::uint64_t limit_;
    std::optional<Leaf> best_;
    std::size_t cases_ = 1;
    std::map<std::string, std::unique_ptr<Compiled>> cache_;
};

inline void require_prime_free(const Expr& e, const char* what)
{
    if (has_primed(e)) {
        throw EvalError(EvalErrorKind::MissingPostState, std::string(what) + " must not mention the post-state");
    }
}

inline Verdict implies_generic(const Expr& a, const Expr& c, const Universe& u, const CheckOptions& o, bool relation)
{
    std::vector<Expr> hyps{expand(a, u)};
    if (o.filter) {
        Expr f = expand(o.filter, u);
        require_prime_free(f, "a filter");
        hyps.insert(hyps.begin(), f);
    }
    Expr goal = expand(c, u);
    if (!relation) {
        require_prime_free(hyps.back(), "an implication antecedent");
        require_prime_free(goal, "an implication consequent");
    }
    int nslots = static_cast<int>(u.size()) * (relation ? 2 : 1);
    Verdict v = Prover(u, nslots, o.node_limit).run(hyps, goal);
    v.mode = o.filter ? CheckMode::Filtered : CheckMode::Full;
    return v;
}

}  // namespace detail

/// p => q over every state of the universe (or those satisfying the filter).
inline Verdict implies_pred(const Expr& p, const Expr& q, const Universe& u, const CheckOptions& o = {})
{
    return detail::implies_generic(p, q, u, o, false);
}

/// r1 => r2 over every pair of states.
inline Verdict implies_rel(const Expr& r1, const Expr& r2, const Universe& u, const CheckOptions& o = {})
{
    return detail::implies_generic(r1, r2, u, o, true);
}

/// p(s) and r(s, s') imply p(s').
inline Verdict stable(const Expr& p, const Expr& r, const Universe& u, const CheckOptions& o = {})
{
    detail::require_prime_free(p, "a stable predicate");
    return detail::implies_generic(ex::and_({p, r}), prime(p), u, o, true);
}

/// Two-way implies_rel.
inline bool equivalent_rel(const Expr& a, const Expr& b, const Universe& u)
{
    return implies_rel(a, b, u).holds && implies_rel(b, a, u).holds;
}

/// Post-states s' with r(pre, s'), in lexicographic order. The relation is
/// expanded once; pre-states that bind it to the same predicate on the
/// post-state share one solver run.
class Stepper {
public:
    using Posts = std::shared_ptr<const std::vector<std::uint16_t>>;  // one state per row

    Stepper(const Expr& r, const Universe& u) : u_(u), r_(expand(r, u)) {}

    Posts posts(const State& pre)
    {
        Expr bound = simplify(fold_ground(bind_pre(r_, u_, pre), u_));
        std::string key = to_sexpr(bound);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        std::set<State> out;
        collect(bound, pre, out, 0);
        auto flat = std::make_shared<std::vector<std::uint16_t>>();
        flat->reserve(out.size() * u_.size());
        for (const auto& s : out) flat->insert(flat->end(), s.begin(), s.end());
        return memo_.emplace(std::move(key), std::move(flat)).first->second;
    }

    std::vector<State> operator()(const State& pre)
    {
        Posts p = posts(pre);
        std::size_t v = u_.size();
        std::vector<State> out;
        for (std::size_t k = 0; k < p->size(); k += v) {
            out.emplace_back(p->begin() + static_cast<long>(k), p->begin() + static_cast<long>(k + v));
        }
        return out;
    }

private:
    // disjunctions are split so that each case reaches the solver as conjuncts
    void collect(const Expr& e, const State& pre, std::set<State>& out, int depth) const
    {
        std::vector<Expr> cs = conjuncts(e);
        if (depth < 8) {
            for (std::size_t k = 0; k < cs.size(); ++k) {
                if (cs[k]->op != Op::Or) continue;
                for (const auto& d : cs[k]->kids) {
                    std::vector<Expr> rest = cs;
                    rest[k] = d;
                    collect(simplify(ex::and_(rest)), pre, out, depth + 1);
                }
                return;
            }
        }
        if (cs.size() == 1 && is_const_bool(cs[0], false)) return;
        std::vector<std::unique_ptr<Compiled>> owned;
        std::vector<const Compiled*> ptrs;
        for (const auto& c : cs) {
            owned.push_back(std::make_unique<Compiled>(u_, c));
            ptrs.push_back(owned.back().get());
        }
        int v = static_cast<int>(u_.size());
        Solver s(u_, 2 * v, ptrs);
        std::vector<int> fixed(static_cast<std::size_t>(2 * v), -1);
        for (int k = 0; k < v; ++k) fixed[static_cast<std::size_t>(k)] = pre[static_cast<std::size_t>(k)];
        s.for_each(fixed, [&](const std::uint16_t* f) {
            out.emplace(f + v, f + 2 * v);
            return true;
        });
    }

    const Universe& u_;
    Expr r_;
    std::map<std::string, Posts> memo_;
};

inline std::vector<State> successors(const Expr& r, const State& pre, const Universe& u) { return Stepper(r, u)(pre); }

inline std::string describe_verdict(const Verdict& v, const Universe& u)
{
    if (v.holds) {
        return "holds";
    }
    std::string s = "counterexample";
    if (!v.failed.empty()) s += " to " + v.failed;
    if (v.state) s += " at " + describe(u, *v.state);
    if (v.post) s += " -> " + describe(u, *v.post);
    return s;
}

}  // namespace rgclh
