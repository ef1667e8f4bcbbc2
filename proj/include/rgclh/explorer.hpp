#pragma once

#include <rgclh/check.hpp>
#include <rgclh/command.hpp>
#include <rgclh/compile.hpp>
#include <rgclh/quintuple.hpp>
#include <rgclh/universe.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rgclh {

class BrokenTrace : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Bounds {
    std::size_t max_configs = 10'000'000;
};

inline constexpr int kEnvActor = -1;

struct Transition {
    int actor = kEnvActor;
    std::string label;
    State pre;
    State post;
};

struct Trace {
    State initial;
    std::vector<Transition> steps;
};

struct Violation {
    std::string kind;  // invariant, guarantee, assertion, postcondition, unguarded-index, evaluation-error, property
    std::string message;
    Trace trace;
};

/// A control point: the state plus the remaining command of every actor.
struct Config {
    State state;
    std::vector<Command> continuations;
};

// ---------------------------------------------------------------------------
// Program semantics over interned continuations

namespace detail {

struct Move {
    enum Kind { Exec, Test } kind = Exec;
    int instr = -1;       // Exec
    int guard = -1;       // Test
    int next_true = -1;   // Exec: the only successor
    int next_false = -1;  // Test, guard false
    int label = -1;
};

struct CompiledUpdate {
    struct Target {
        int var = -1;           // fixed variable
        const ArrayDecl* array = nullptr;
        int index = -1;         // compiled index expression
    };
    std::vector<Target> targets;
    std::vector<int> values;
};

struct CompiledInstr {
    InstrKind kind = InstrKind::Assign;
    std::vector<CompiledUpdate> updates;
    int pred = -1;
    std::string marker;
};

class Machine {
public:
    Machine(const Universe& u, const Command& program) : u_(u)
    {
        if (program->kind == CmdKind::ParN) {
            for (std::size_t k = 0; k < program->kids.size(); ++k) {
                actors_.push_back(program->threads[k]);
                init_.push_back(intern(program->kids[k]));
            }
        } else {
            actors_.push_back(-2);  // the single program actor
            init_.push_back(intern(program));
        }
    }

    const Universe& universe() const { return u_; }
    std::size_t actor_count() const { return actors_.size(); }
    int actor_thread(std::size_t a) const { return actors_[a]; }
    std::string actor_name(int a) const
    {
        if (a == kEnvActor) return "env";
        int t = actors_[static_cast<std::size_t>(a)];
        return t >= 0 ? thread_name(t) : "prog";
    }
    const std::vector<int>& initial() const { return init_; }

    const Command& command(int cid) const { return conts_[static_cast<std::size_t>(cid)].cmd; }
    bool finished(int cid) const { return conts_[static_cast<std::size_t>(cid)].finished; }
    const std::vector<int>& asserts(int cid) const { return conts_[static_cast<std::size_t>(cid)].asserts; }

    const std::vector<Move>& moves(int cid)
    {
        if (!conts_[static_cast<std::size_t>(cid)].ready) {
            Command c = conts_[static_cast<std::size_t>(cid)].cmd;  // interning below may reallocate
            auto ms = build_moves(c);
            conts_[static_cast<std::size_t>(cid)].moves = std::move(ms);
            conts_[static_cast<std::size_t>(cid)].ready = true;
        }
        return conts_[static_cast<std::size_t>(cid)].moves;
    }

    const std::string& label(int id) const { return labels_[static_cast<std::size_t>(id)]; }
    const Compiled& pred(int id) const { return *preds_[static_cast<std::size_t>(id)]; }
    const CompiledInstr& instr(int id) const { return instrs_[static_cast<std::size_t>(id)]; }

    /// True when the actor's next step is the named marker.
    bool at_marker(int cid, const std::string& name)
    {
        for (const auto& m : moves(cid)) {
            if (m.kind == Move::Exec && instr(m.instr).kind == InstrKind::Marker && instr(m.instr).marker == name) {
                return true;
            }
        }
        return false;
    }

    /// Executes an instruction on s. Evaluation failures raise EvalError.
    State exec(int id, const State& s) const
    {
        const CompiledInstr& ci = instr(id);
        State out = s;
        if (ci.kind == InstrKind::Check) {
            return out;
        }
        for (const auto& up : ci.updates) {
            std::vector<std::pair<int, Value>> writes;
            for (std::size_t k = 0; k < up.targets.size(); ++k) {
                const auto& t = up.targets[k];
                int var = t.var;
                if (var < 0) {
                    EvalResult idx = pred(t.index).eval(out.data(), false);
                    if (!idx.ok) throw EvalError(idx.error, idx.message);
                    Kind want = t.array->index == IndexKind::Threads ? Kind::Thread : Kind::Node;
                    if (idx.value.kind != want) {
                        throw EvalError(EvalErrorKind::TypeMismatch, "bad index for " + t.array->name);
                    }
                    if (idx.value.is_bottom()) {
                        throw EvalError(EvalErrorKind::DereferenceUninitialised,
                                        "dereferencing bot in " + t.array->name);
                    }
                    if (idx.value.i < 0 || static_cast<std::size_t>(idx.value.i) >= t.array->cells.size()) {
                        throw EvalError(EvalErrorKind::OutOfDomain, "index out of range for " + t.array->name);
                    }
                    var = t.array->cells[static_cast<std::size_t>(idx.value.i)];
                }
                EvalResult v = pred(up.values[k]).eval(out.data(), false);
                if (!v.ok) throw EvalError(v.error, v.message);
                writes.emplace_back(var, v.value);
            }
            for (const auto& [var, v] : writes) assign(u_, out, var, v);
        }
        return out;
    }

private:
    struct Cont {
        Command cmd;
        bool finished = false;
        std::vector<int> asserts;
        std::vector<Move> moves;
        bool ready = false;
    };

    static bool is_skip(const Command& c) { return c->kind == CmdKind::Skip; }

    static Command normalize(const Command& c)
    {
        if (c->kind == CmdKind::Seq) {
            Command a = normalize(c->kids[0]);
            if (is_skip(a)) return normalize(c->kids[1]);
            if (a != c->kids[0]) return cmd::seq(a, c->kids[1]);
        }
        if (c->kind == CmdKind::Par && is_skip(c->kids[0]) && is_skip(c->kids[1])) return cmd::skip();
        return c;
    }

    int intern(const Command& raw)
    {
        Command c = normalize(raw);
        std::string key = to_sexpr(c);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        int id = static_cast<int>(conts_.size());
        ids_.emplace(key, id);
        Cont k;
        k.cmd = c;
        k.finished = is_finished(c);
        collect_asserts(c, k.asserts);
        conts_.push_back(std::move(k));
        return id;
    }

    static bool is_finished(const Command& c)
    {
        switch (c->kind) {
        case CmdKind::Skip:
        case CmdKind::Assert: return true;
        case CmdKind::Seq:
        case CmdKind::Par:
        case CmdKind::ParN:
            for (const auto& k : c->kids) {
                if (!is_finished(k)) return false;
            }
            return true;
        default: return false;
        }
    }

    void collect_asserts(const Command& c, std::vector<int>& out)
    {
        switch (c->kind) {
        case CmdKind::Assert: out.push_back(compile(c->guard)); break;
        case CmdKind::Seq:
            collect_asserts(c->kids[0], out);
            if (is_finished(c->kids[0])) collect_asserts(c->kids[1], out);
            break;
        case CmdKind::Par:
        case CmdKind::ParN:
            for (const auto& k : c->kids) collect_asserts(k, out);
            break;
        default: break;
        }
    }

    int compile(const Expr& e)
    {
        std::string key = to_sexpr(e);
        auto it = pred_ids_.find(key);
        if (it != pred_ids_.end()) return it->second;
        preds_.push_back(std::make_unique<Compiled>(u_, e));
        int id = static_cast<int>(preds_.size()) - 1;
        pred_ids_.emplace(key, id);
        return id;
    }

    int label_id(const std::string& s)
    {
        auto it = label_ids_.find(s);
        if (it != label_ids_.end()) return it->second;
        labels_.push_back(s);
        int id = static_cast<int>(labels_.size()) - 1;
        label_ids_.emplace(s, id);
        return id;
    }

    int compile_instr(const Instr& i)
    {
        CompiledInstr ci;
        ci.kind = i.kind;
        ci.marker = i.name;
        if (i.kind == InstrKind::Check) ci.pred = compile(i.pred);
        for (const auto& up : i.updates) {
            CompiledUpdate cu;
            for (std::size_t k = 0; k < up.targets.size(); ++k) {
                Expr t = resolve_target(up.targets[k], u_);
                CompiledUpdate::Target ct;
                if (t->op == Op::Var) {
                    ct.var = u_.id(t->name);
                } else {
                    ct.array = &require_array(u_, t->view->array);
                    ct.index = compile(t->kids[0]);
                }
                cu.targets.push_back(ct);
                cu.values.push_back(compile(up.values[k]));
            }
            ci.updates.push_back(std::move(cu));
        }
        instrs_.push_back(std::move(ci));
        return static_cast<int>(instrs_.size()) - 1;
    }

    std::vector<Move> build_moves(const Command& c)
    {
        std::vector<Move> out;
        switch (c->kind) {
        case CmdKind::Skip:
        case CmdKind::Assert: break;
        case CmdKind::Instr: {
            Move m;
            m.kind = Move::Exec;
            m.instr = compile_instr(c->instr);
            m.next_true = intern(cmd::skip());
            std::string l = instr_label(c->instr);
            m.label = label_id(l.empty() ? to_sexpr(c) : l);
            out.push_back(m);
            break;
        }
        case CmdKind::Spin: {
            Move m;
            m.kind = Move::Test;
            m.guard = compile(c->guard);
            m.next_true = intern(cmd::skip());
            m.next_false = intern(c);
            m.label = label_id(c->label.empty() ? "await" : c->label);
            out.push_back(m);
            break;
        }
        case CmdKind::While: {
            Move m;
            m.kind = Move::Test;
            m.guard = compile(c->guard);
            m.next_true = intern(cmd::seq(c->kids[0], c));
            m.next_false = intern(cmd::skip());
            m.label = label_id("while");
            out.push_back(m);
            break;
        }
        case CmdKind::Seq: {
            if (is_finished(c->kids[0])) {
                out = moves(intern(c->kids[1]));
                break;
            }
            auto inner = moves(intern(c->kids[0]));
            for (auto m : inner) {
                m.next_true = intern(cmd::seq(command(m.next_true), c->kids[1]));
                if (m.next_false >= 0) m.next_false = intern(cmd::seq(command(m.next_false), c->kids[1]));
                out.push_back(m);
            }
            break;
        }
        case CmdKind::Par:
        case CmdKind::ParN: {
            for (std::size_t k = 0; k < c->kids.size(); ++k) {
                auto inner = moves(intern(c->kids[k]));
                for (auto m : inner) {
                    auto rebuild = [&](int next) {
                        CommandNode n = *c;
                        n.kids[k] = command(next);
                        return intern(cmd::make(std::move(n)));
                    };
                    m.next_true = rebuild(m.next_true);
                    if (m.next_false >= 0) m.next_false = rebuild(m.next_false);
                    out.push_back(m);
                }
            }
            break;
        }
        case CmdKind::PPSeq:
            throw std::invalid_argument("explore needs a transformed program; found " + to_sexpr(c));
        }
        return out;
    }

    const Universe& u_;
    std::vector<int> actors_;
    std::vector<int> init_;
    std::vector<Cont> conts_;
    std::unordered_map<std::string, int> ids_;
    std::vector<std::unique_ptr<Compiled>> preds_;
    std::unordered_map<std::string, int> pred_ids_;
    std::vector<CompiledInstr> instrs_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> label_ids_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Exploration

struct ExploreOptions {
    Bounds bounds;
    Expr rely;  // environment steps; null for a closed system
    Expr post;  // checked at terminal configs
    std::size_t max_violations = 64;
};

struct ExploreStats {
    std::size_t configs = 0;
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t env_transitions = 0;
    std::size_t terminals = 0;
    double seconds = 0;
};

class ExploreResult {
public:
    struct Edge {
        std::uint32_t from;
        std::uint32_t to;
        std::int16_t actor;
        std::int32_t label;
    };

    bool complete = true;
    std::vector<Violation> violations;
    ExploreStats stats;

    std::size_t config_count() const { return parent_.size(); }
    State state(std::size_t i) const
    {
        const std::uint16_t* row = &rows_[i * width_];
        return State(row, row + u_->size());
    }
    int continuation(std::size_t i, std::size_t actor) const { return rows_[i * width_ + u_->size() + actor]; }
    Config config(std::size_t i) const
    {
        Config c{state(i), {}};
        for (std::size_t a = 0; a < machine_->actor_count(); ++a) {
            c.continuations.push_back(machine_->command(continuation(i, a)));
        }
        return c;
    }
    bool is_terminal(std::size_t i) const
    {
        for (std::size_t a = 0; a < machine_->actor_count(); ++a) {
            if (!machine_->finished(continuation(i, a))) return false;
        }
        return true;
    }
    bool is_initial(std::size_t i) const { return parent_[i] == kNone; }
    const std::vector<std::uint32_t>& terminals() const { return terminals_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Universe& universe() const { return *u_; }
    detail::Machine& machine() const { return *machine_; }

    /// Shortest trace from an initial config to config i.
    Trace trace_to(std::size_t i) const
    {
        std::vector<std::size_t> chain;
        for (std::size_t k = i; parent_[k] != kNone; k = parent_[k]) chain.push_back(k);
        Trace t;
        std::size_t root = chain.empty() ? i : parent_[chain.back()];
        t.initial = state(root);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            std::size_t k = *it;
            t.steps.push_back({in_actor_[k], in_label_[k] < 0 ? "env" : machine_->label(in_label_[k]),
                               state(parent_[k]), state(k)});
        }
        return t;
    }

    Trace trace_through(const Edge& e) const
    {
        Trace t = trace_to(e.from);
        t.steps.push_back({e.actor, e.label < 0 ? "env" : machine_->label(e.label), state(e.from), state(e.to)});
        return t;
    }

private:
    friend class Explorer;
    static constexpr std::uint32_t kNone = 0xffffffffu;

    const Universe* u_ = nullptr;
    std::shared_ptr<detail::Machine> machine_;
    std::size_t width_ = 0;
    std::vector<std::uint16_t> rows_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::int16_t> in_actor_;
    std::vector<std::int32_t> in_label_;
    std::vector<std::uint32_t> terminals_;
    std::vector<Edge> edges_;
};

class Explorer {
public:
    Explorer(const Universe& u, const Command& program) : u_(u), machine_(std::make_shared<detail::Machine>(u, program))
    {
    }

    ExploreResult run(const Expr& init, const ExploreOptions& o)
    {
        auto t0 = std::chrono::steady_clock::now();
        ExploreResult res;
        res.u_ = &u_;
        res.machine_ = machine_;
        res.width_ = u_.size() + machine_->actor_count();
        std::unique_ptr<Compiled> post = o.post ? std::make_unique<Compiled>(u_, o.post) : nullptr;
        std::unique_ptr<Stepper> rely = o.rely ? std::make_unique<Stepper>(o.rely, u_) : nullptr;
        std::unordered_map<std::u16string, std::uint32_t> index;
        std::unordered_map<std::u16string, Stepper::Posts> env_cache;
        std::unordered_map<std::u16string, bool> seen_states;
        std::map<std::string, bool> reported;

        auto key_of = [](const std::uint16_t* row, std::size_t n) {
            return std::u16string(reinterpret_cast<const char16_t*>(row), n);
        };
        auto violate = [&](const std::string& kind, const std::string& msg, Trace t) {
            if (res.violations.size() >= o.max_violations) return;
            if (!reported.emplace(kind + "\n" + msg, true).second) return;
            res.violations.push_back({kind, msg, std::move(t)});
        };
        std::vector<std::uint16_t> row(res.width_);
        auto add = [&](std::uint32_t parent, int actor, int label) -> std::pair<std::uint32_t, bool> {
            std::u16string key = key_of(row.data(), row.size());
            auto it = index.find(key);
            if (it != index.end()) return {it->second, false};
            if (res.parent_.size() >= o.bounds.max_configs) {
                res.complete = false;
                return {ExploreResult::kNone, false};
            }
            auto id = static_cast<std::uint32_t>(res.parent_.size());
            index.emplace(std::move(key), id);
            res.rows_.insert(res.rows_.end(), row.begin(), row.end());
            res.parent_.push_back(parent);
            res.in_actor_.push_back(static_cast<std::int16_t>(actor));
            res.in_label_.push_back(label);
            seen_states.emplace(key_of(row.data(), u_.size()), true);
            return {id, true};
        };

        for (const State& s : enumerate(u_, init)) {
            std::copy(s.begin(), s.end(), row.begin());
            for (std::size_t a = 0; a < machine_->actor_count(); ++a) {
                row[u_.size() + a] = static_cast<std::uint16_t>(machine_->initial()[a]);
            }
            add(ExploreResult::kNone, kEnvActor, -1);
        }

        for (std::size_t i = 0; i < res.parent_.size(); ++i) {
            State s = res.state(i);
            std::vector<int> conts(machine_->actor_count());
            for (std::size_t a = 0; a < conts.size(); ++a) conts[a] = res.continuation(i, a);

            for (std::size_t a = 0; a < conts.size(); ++a) {
                for (int p : machine_->asserts(conts[a])) {
                    EvalResult r = machine_->pred(p).eval_state(s);
                    if (!r.ok) {
                        violate(error_violation(r.error), r.message, res.trace_to(i));
                    } else if (!r.is_true()) {
                        violate("assertion", machine_->actor_name(static_cast<int>(a)) + ": " +
                                                 to_sexpr(machine_->pred(p).source()),
                                res.trace_to(i));
                    }
                }
            }
            if (res.is_terminal(i)) {
                res.terminals_.push_back(static_cast<std::uint32_t>(i));
                if (post) {
                    EvalResult r = post->eval_state(s);
                    if (!r.ok) {
                        violate(error_violation(r.error), r.message, res.trace_to(i));
                    } else if (!r.is_true()) {
                        violate("postcondition", to_sexpr(o.post), res.trace_to(i));
                    }
                }
            }

            for (std::size_t a = 0; a < conts.size(); ++a) {
                const auto moves = machine_->moves(conts[a]);
                for (const auto& m : moves) {
                    State next = s;
                    int next_cont = m.next_true;
                    if (m.kind == detail::Move::Exec) {
                        const auto& ci = machine_->instr(m.instr);
                        if (ci.kind == InstrKind::Check) {
                            EvalResult r = machine_->pred(ci.pred).eval_state(s);
                            if (!r.ok) {
                                violate(error_violation(r.error), r.message, res.trace_to(i));
                                continue;
                            }
                            if (!r.is_true()) {
                                violate("assertion", machine_->label(m.label) + ": " + to_sexpr(machine_->pred(ci.pred).source()),
                                        res.trace_to(i));
                            }
                        }
                        try {
                            next = machine_->exec(m.instr, s);
                        } catch (const EvalError& e) {
                            violate(error_violation(e.kind()), machine_->label(m.label) + ": " + e.what(),
                                    res.trace_to(i));
                            continue;
                        }
                    } else {
                        EvalResult r = machine_->pred(m.guard).eval_state(s);
                        if (!r.ok) {
                            violate(error_violation(r.error), machine_->label(m.label) + ": " + r.message,
                                    res.trace_to(i));
                            continue;
                        }
                        next_cont = r.is_true() ? m.next_true : m.next_false;
                    }
                    std::copy(next.begin(), next.end(), row.begin());
                    for (std::size_t b = 0; b < conts.size(); ++b) {
                        row[u_.size() + b] = static_cast<std::uint16_t>(b == a ? next_cont : conts[b]);
                    }
                    auto [to, fresh] = add(static_cast<std::uint32_t>(i), static_cast<int>(a), m.label);
                    (void)fresh;
                    if (to == ExploreResult::kNone) break;
                    res.edges_.push_back({static_cast<std::uint32_t>(i), to, static_cast<std::int16_t>(a), m.label});
                }
            }

            if (rely) {
                std::u16string skey = key_of(s.data(), s.size());
                auto it = env_cache.find(skey);
                if (it == env_cache.end()) {
                    it = env_cache.emplace(skey, rely->posts(s)).first;
                }
                const std::vector<std::uint16_t>& flat = *it->second;
                for (std::size_t k = 0; k < flat.size(); k += u_.size()) {
                    std::copy_n(flat.begin() + static_cast<long>(k), u_.size(), row.begin());
                    for (std::size_t b = 0; b < conts.size(); ++b) {
                        row[u_.size() + b] = static_cast<std::uint16_t>(conts[b]);
                    }
                    add(static_cast<std::uint32_t>(i), kEnvActor, -1);
                    ++res.stats.env_transitions;
                }
            }
            if (!res.complete) break;
        }
        res.stats.configs = res.parent_.size();
        res.stats.states = seen_states.size();
        res.stats.transitions = res.edges_.size();
        res.stats.terminals = res.terminals_.size();
        res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }

    static std::string error_violation(EvalErrorKind k)
    {
        bool partial = k == EvalErrorKind::UnguardedIndex || k == EvalErrorKind::EmptyList;
        return partial ? "unguarded-index" : "evaluation-error";
    }

private:
    const Universe& u_;
    std::shared_ptr<detail::Machine> machine_;
};

inline ExploreResult explore(const Command& program, const Expr& init, const Universe& u, const ExploreOptions& o = {})
{
    return Explorer(u, program).run(init, o);
}

// ---------------------------------------------------------------------------
// Checks over an exploration

struct SemanticVerdict {
    bool holds = true;
    bool complete = true;  // false: the exploration hit its ceiling, so "holds" is qualified
    std::optional<Violation> violation;
    ExploreStats stats;

    explicit operator bool() const { return holds; }
};

inline SemanticVerdict check_global_invariant(const ExploreResult& res, const Expr& inv)
{
    SemanticVerdict v;
    v.complete = res.complete;
    v.stats = res.stats;
    Compiled c(res.universe(), inv);
    for (std::size_t i = 0; i < res.config_count(); ++i) {
        State s = res.state(i);
        EvalResult r = c.eval_state(s);
        if (!r.ok || !r.is_true()) {
            v.holds = false;
            v.violation = Violation{r.ok ? "invariant" : Explorer::error_violation(r.error),
                                    r.ok ? to_sexpr(inv) : r.message, res.trace_to(i)};
            return v;
        }
    }
    return v;
}

/// Every step of actor a satisfies g(a). Actors without an entry are unconstrained.
inline SemanticVerdict check_guarantees(const ExploreResult& res, const std::map<int, Expr>& g)
{
    SemanticVerdict v;
    v.complete = res.complete;
    v.stats = res.stats;
    std::map<int, std::unique_ptr<Compiled>> cs;
    for (const auto& [a, e] : g) cs[a] = std::make_unique<Compiled>(res.universe(), e);
    std::size_t n = res.universe().size();
    std::vector<std::uint16_t> frame(2 * n);
    for (const auto& e : res.edges()) {
        auto it = cs.find(e.actor);
        if (it == cs.end()) continue;
        State pre = res.state(e.from);
        State post = res.state(e.to);
        std::copy(pre.begin(), pre.end(), frame.begin());
        std::copy(post.begin(), post.end(), frame.begin() + static_cast<long>(n));
        EvalResult r = it->second->eval(frame.data(), true);
        if (!r.ok || !r.is_true()) {
            v.holds = false;
            v.violation = Violation{r.ok ? "guarantee" : Explorer::error_violation(r.error),
                                    r.ok ? res.machine().actor_name(e.actor) + ": " + to_sexpr(g.at(e.actor)) : r.message,
                                    res.trace_through(e)};
            return v;
        }
    }
    return v;
}

/// A property of whole configs; `fn` returns a message when it fails.
inline SemanticVerdict check_configs(const ExploreResult& res,
                                     const std::function<std::optional<std::string>(std::size_t)>& fn)
{
    SemanticVerdict v;
    v.complete = res.complete;
    v.stats = res.stats;
    for (std::size_t i = 0; i < res.config_count(); ++i) {
        if (auto msg = fn(i)) {
            v.holds = false;
            v.violation = Violation{"property", *msg, res.trace_to(i)};
            return v;
        }
    }
    return v;
}

/// The first violation recorded during exploration, as a verdict.
inline SemanticVerdict exploration_verdict(const ExploreResult& res)
{
    SemanticVerdict v;
    v.complete = res.complete;
    v.stats = res.stats;
    if (!res.violations.empty()) {
        v.holds = false;
        v.violation = res.violations.front();
    }
    return v;
}

/// {p, r} c {g, q} by exploring c from every p-state, interleaved with
/// arbitrary r-steps of the environment.
inline SemanticVerdict check_quintuple_semantic(const Quintuple& q, const Universe& u, const Bounds& b = {})
{
    ExploreOptions o;
    o.bounds = b;
    o.rely = q.r;
    o.post = q.q;
    ExploreResult res = Explorer(u, q.c).run(q.p, o);
    SemanticVerdict v = exploration_verdict(res);
    if (!v.holds) return v;
    std::map<int, Expr> g;
    for (std::size_t a = 0; a < res.machine().actor_count(); ++a) g[static_cast<int>(a)] = q.g;
    v = check_guarantees(res, g);
    return v;
}

struct TransformEquivVerdict {
    SemanticVerdict reference;
    SemanticVerdict transformed;
    bool holds() const { return reference.holds && transformed.holds; }
};

/// Both the sequential reference and the transformed command satisfy the
/// same quintuple.
inline TransformEquivVerdict check_transform_equiv(const Quintuple& shared, const Command& reference,
                                                   const Command& transformed, const Universe& u, const Bounds& b = {})
{
    Quintuple a = shared;
    a.c = reference;
    Quintuple t = shared;
    t.c = transformed;
    return {check_quintuple_semantic(a, u, b), check_quintuple_semantic(t, u, b)};
}

/// Re-executes a trace against the program and rely, returning the final config.
inline Config replay(const ExploreResult& res, const Trace& t, const Expr& rely = nullptr)
{
    detail::Machine& m = res.machine();
    const Universe& u = res.universe();
    bool known = false;
    for (std::size_t i = 0; i < res.config_count() && res.is_initial(i); ++i) {
        known = known || res.state(i) == t.initial;
    }
    if (!known) throw BrokenTrace("initial state is not an initial config");
    std::vector<int> conts = m.initial();
    State s = t.initial;
    std::unique_ptr<Compiled> r = rely ? std::make_unique<Compiled>(u, rely) : nullptr;
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const Transition& st = t.steps[k];
        std::string where = "step " + std::to_string(k + 1) + " (" + st.label + ")";
        if (st.pre != s) throw BrokenTrace(where + ": pre-state does not match");
        if (st.actor == kEnvActor) {
            if (!r || !r->holds(st.pre, st.post)) throw BrokenTrace(where + ": not an environment step");
            s = st.post;
            continue;
        }
        if (st.actor < 0 || static_cast<std::size_t>(st.actor) >= conts.size()) {
            throw BrokenTrace(where + ": unknown actor");
        }
        bool matched = false;
        auto a = static_cast<std::size_t>(st.actor);
        for (const auto& mv : m.moves(conts[a])) {
            if (m.label(mv.label) != st.label) continue;
            State next = s;
            int nc = mv.next_true;
            try {
                if (mv.kind == detail::Move::Exec) {
                    next = m.exec(mv.instr, s);
                } else {
                    nc = m.pred(mv.guard).holds(s) ? mv.next_true : mv.next_false;
                }
            } catch (const EvalError&) {
                continue;
            }
            if (next == st.post) {
                conts[a] = nc;
                s = next;
                matched = true;
                break;
            }
        }
        if (!matched) throw BrokenTrace(where + ": no matching step");
    }
    Config c{s, {}};
    for (int cid : conts) c.continuations.push_back(m.command(cid));
    return c;
}

}  // namespace rgclh
