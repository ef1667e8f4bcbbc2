#pragma once

#include <rgclh/check.hpp>
#include <rgclh/command.hpp>
#include <rgclh/quintuple.hpp>

#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace rgclh {

// ---------------------------------------------------------------------------
// Reports

/// One side condition or shape requirement of a rule application.
struct Condition {
    std::string path;  // position of the rule node in the derivation, e.g. "0/1"
    std::string rule;
    std::string name;
    bool shape = false;  // a structural premise rather than a semantic side condition
    bool holds = true;
    Verdict verdict;
    std::string note;
    double seconds = 0;
};

struct CheckReport {
    std::vector<Condition> conditions;
    CheckMode mode = CheckMode::Full;

    bool holds() const
    {
        for (const auto& c : conditions) {
            if (!c.holds) return false;
        }
        return true;
    }
    const Condition* first_failure() const
    {
        for (const auto& c : conditions) {
            if (!c.holds) return &c;
        }
        return nullptr;
    }
    void append(const CheckReport& o) { conditions.insert(conditions.end(), o.conditions.begin(), o.conditions.end()); }
};

enum class Rule { Asgn, SpinLoop, Seq, Conseq, ParU, ParInt, ParGen };

inline const char* rule_name(Rule r)
{
    switch (r) {
    case Rule::Asgn: return "asgn";
    case Rule::SpinLoop: return "spin";
    case Rule::Seq: return "seq";
    case Rule::Conseq: return "conseq";
    case Rule::ParU: return "par-u";
    case Rule::ParInt: return "par-int";
    case Rule::ParGen: return "par-gen";
    }
    return "?";
}

struct Derivation {
    Rule rule = Rule::Asgn;
    Quintuple concl;
    Expr mid;  // Seq only
    std::vector<Derivation> kids;
};

namespace detail {

class RuleChecker {
public:
    RuleChecker(const Universe& u, CheckOptions o, std::string path, std::string rule)
        : u_(u), o_(std::move(o)), path_(std::move(path)), rule_(std::move(rule))
    {
        report.mode = o_.filter ? CheckMode::Filtered : CheckMode::Full;
    }

    void side(const std::string& name, const std::function<Verdict()>& check)
    {
        Condition c{path_, rule_, name, false, true, {}, "", 0};
        auto t0 = std::chrono::steady_clock::now();
        try {
            c.verdict = check();
            c.holds = c.verdict.holds;
            if (!c.holds) c.note = describe_verdict(c.verdict, u_);
        } catch (const EvalError& e) {
            c.holds = false;
            c.note = e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.conditions.push_back(std::move(c));
    }

    void shape(const std::string& name, bool ok, const std::string& note = "")
    {
        Condition c{path_, rule_, name, true, ok, {}, ok ? "" : note, 0};
        c.verdict.holds = ok;
        report.conditions.push_back(std::move(c));
    }

    /// Syntactic equality of canonical forms, then two-way implication.
    bool same(const Expr& a, const Expr& b, bool relation)
    {
        if (!a || !b) return a == b;
        try {
            Expr x = expand(a, u_);
            Expr y = expand(b, u_);
            if (to_sexpr(x) == to_sexpr(y)) return true;
            CheckOptions plain;
            plain.node_limit = o_.node_limit;
            if (relation) return implies_rel(x, y, u_, plain).holds && implies_rel(y, x, u_, plain).holds;
            return implies_pred(x, y, u_, plain).holds && implies_pred(y, x, u_, plain).holds;
        } catch (const EvalError&) {
            return false;
        }
    }

    void same_shape(const std::string& name, const Expr& a, const Expr& b, bool relation)
    {
        bool ok = same(a, b, relation);
        shape(name, ok, ok ? "" : to_sexpr(a) + " differs from " + to_sexpr(b));
    }

    const Universe& u_;
    CheckOptions o_;
    std::string path_;
    std::string rule_;
    CheckReport report;
};

/// Sequential elements of a command, with annotations dropped.
inline std::vector<std::string> seq_elements(const Command& c)
{
    std::vector<Command> xs;
    flatten(c, CmdKind::Seq, xs);
    std::vector<std::string> out;
    for (const auto& x : xs) {
        if (x->kind != CmdKind::Assert && x->kind != CmdKind::Skip) out.push_back(to_sexpr(x));
    }
    return out;
}

inline bool same_command(const Command& a, const Command& b) { return seq_elements(a) == seq_elements(b); }

/// The command with leading and trailing annotations removed.
inline Command strip_annotations(const Command& c)
{
    std::vector<Command> xs;
    flatten(c, CmdKind::Seq, xs);
    std::vector<Command> kept;
    for (const auto& x : xs) {
        if (x->kind != CmdKind::Assert && x->kind != CmdKind::Skip) kept.push_back(x);
    }
    return kept.size() == 1 ? kept[0] : c;
}

/// Splits g into g0 when it is written g0 or id.
inline std::optional<Expr> strip_identity(const Expr& g, const Universe& u)
{
    if (g->op != Op::Or) return std::nullopt;
    std::vector<Expr> rest;
    bool found = false;
    for (const auto& d : g->kids) {
        bool is_id = d->op == Op::IdAll;
        if (!is_id && d->op == Op::Id) {
            std::set<std::string> mine, all;
            for (const auto& x : conjuncts(expand(d, u))) mine.insert(to_sexpr(x));
            for (const auto& x : conjuncts(expand(ex::id_all(), u))) all.insert(to_sexpr(x));
            is_id = mine == all;
        }
        if (is_id && !found) {
            found = true;
        } else {
            rest.push_back(d);
        }
    }
    if (!found) return std::nullopt;
    return rest.size() == 1 ? rest[0] : ex::or_(rest);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rules

inline CheckReport check_asgn(const Quintuple& concl, const Universe& u, const CheckOptions& o = {},
                              const std::string& path = "")
{
    detail::RuleChecker rc(u, o, path, "asgn");
    Command c = detail::strip_annotations(concl.c);
    bool lone = c->kind == CmdKind::Instr && c->instr.kind != InstrKind::Check;
    rc.shape("command is a lone assignment", lone, to_sexpr(concl.c));
    auto g0 = detail::strip_identity(concl.g, u);
    rc.shape("guarantee has the form g or id", g0.has_value(), to_sexpr(concl.g));
    if (!lone || !g0) return rc.report;
    rc.side("stable p under r", [&] { return stable(concl.p, concl.r, u, o); });
    rc.side("stable q under r", [&] { return stable(concl.q, concl.r, u, o); });
    rc.side("p updated establishes q", [&] {
        Substitution s;
        s.vars = symbolic_effect(c->instr, u);
        return implies_pred(concl.p, substitute(expand(concl.q, u), s, u), u, o);
    });
    rc.side("step satisfies g", [&] {
        return implies_rel(restrict(concl.p, transition_relation(c->instr, u)), *g0, u, o);
    });
    return rc.report;
}

inline CheckReport check_spin_loop(const Quintuple& concl, const Universe& u, const CheckOptions& o = {},
                                   const std::string& path = "")
{
    detail::RuleChecker rc(u, o, path, "spin");
    Command c = detail::strip_annotations(concl.c);
    rc.shape("command is a spin loop", c->kind == CmdKind::Spin, to_sexpr(concl.c));
    if (c->kind != CmdKind::Spin) return rc.report;
    rc.side("stable p under r", [&] { return stable(concl.p, concl.r, u, o); });
    rc.side("stable q under r", [&] { return stable(concl.q, concl.r, u, o); });
    rc.side("id satisfies g", [&] { return implies_rel(ex::id_all(), concl.g, u, o); });
    rc.side("p and exit establish q", [&] { return implies_pred(ex::and_({concl.p, c->guard}), concl.q, u, o); });
    return rc.report;
}

inline CheckReport check_seq(const Quintuple& concl, const Expr& mid, const Quintuple& left, const Quintuple& right,
                             const Universe& u, const CheckOptions& o = {}, const std::string& path = "")
{
    detail::RuleChecker rc(u, o, path, "seq");
    auto whole = detail::seq_elements(concl.c);
    auto l = detail::seq_elements(left.c);
    auto r = detail::seq_elements(right.c);
    l.insert(l.end(), r.begin(), r.end());
    rc.shape("command splits into the premises", whole == l, to_sexpr(concl.c));
    rc.same_shape("left p", left.p, concl.p, false);
    rc.same_shape("left q is mid", left.q, mid, false);
    rc.same_shape("right p is mid", right.p, mid, false);
    rc.same_shape("right q", right.q, concl.q, false);
    rc.same_shape("left r", left.r, concl.r, true);
    rc.same_shape("right r", right.r, concl.r, true);
    rc.same_shape("left g", left.g, concl.g, true);
    rc.same_shape("right g", right.g, concl.g, true);
    return rc.report;
}

inline CheckReport check_conseq(const Quintuple& concl, const Quintuple& inner, const Universe& u,
                                const CheckOptions& o = {}, const std::string& path = "")
{
    detail::RuleChecker rc(u, o, path, "conseq");
    rc.shape("same command", detail::same_command(concl.c, inner.c), to_sexpr(concl.c) + " vs " + to_sexpr(inner.c));
    rc.side("p strengthens p0", [&] { return implies_pred(concl.p, inner.p, u, o); });
    rc.side("r strengthens r0", [&] { return implies_rel(concl.r, inner.r, u, o); });
    rc.side("g0 strengthens g", [&] { return implies_rel(inner.g, concl.g, u, o); });
    rc.side("q0 strengthens q", [&] { return implies_pred(inner.q, concl.q, u, o); });
    return rc.report;
}

namespace detail {

inline std::vector<Command> par_children(const Command& c)
{
    std::vector<Command> xs;
    Command x = strip_annotations(c);
    if (x->kind == CmdKind::ParN) return x->kids;
    flatten(x, CmdKind::Par, xs);
    return xs;
}

}  // namespace detail

inline CheckReport check_par_u(const Quintuple& concl, const Quintuple& left, const Quintuple& right,
                               const Universe& u, const CheckOptions& o = {}, const std::string& path = "")
{
    detail::RuleChecker rc(u, o, path, "par-u");
    Command c = detail::strip_annotations(concl.c);
    bool is_par = c->kind == CmdKind::Par && detail::same_command(c->kids[0], left.c) &&
                  detail::same_command(c->kids[1], right.c);
    rc.shape("command is the parallel composition of the premises", is_par, to_sexpr(concl.c));
    rc.same_shape("left p", left.p, concl.p, false);
    rc.same_shape("right p", right.p, concl.p, false);
    rc.same_shape("left r is r or g2", left.r, ex::or_({concl.r, right.g}), true);
    rc.same_shape("right r is r or g1", right.r, ex::or_({concl.r, left.g}), true);
    rc.same_shape("g is g1 or g2", concl.g, ex::or_({left.g, right.g}), true);
    rc.same_shape("q is q1 and q2", concl.q, ex::and_({left.q, right.q}), false);
    return rc.report;
}

inline CheckReport check_par_gen(const Quintuple& concl, const std::vector<Quintuple>& kids, const Universe& u,
                                 const CheckOptions& o = {}, const std::string& path = "",
                                 const std::string& rule = "par-gen")
{
    detail::RuleChecker rc(u, o, path, rule);
    auto cs = detail::par_children(concl.c);
    bool shape_ok = cs.size() == kids.size();
    for (std::size_t k = 0; shape_ok && k < kids.size(); ++k) {
        shape_ok = detail::same_command(cs[k], kids[k].c);
    }
    rc.shape("command is the parallel composition of the premises", shape_ok, to_sexpr(concl.c));
    std::vector<Expr> ps, rs, gs, qs;
    for (const auto& k : kids) {
        ps.push_back(k.p);
        rs.push_back(k.r);
        gs.push_back(k.g);
        qs.push_back(k.q);
    }
    rc.same_shape("p is the conjunction of premises", concl.p, ex::and_(ps), false);
    rc.same_shape("r is the conjunction of premises", concl.r, ex::and_(rs), true);
    rc.same_shape("g is the disjunction of premises", concl.g, ex::or_(gs), true);
    rc.same_shape("q is the conjunction of premises", concl.q, ex::and_(qs), false);
    for (std::size_t i = 0; i < kids.size(); ++i) {
        for (std::size_t j = 0; j < kids.size(); ++j) {
            if (i == j) continue;
            rc.side("g" + std::to_string(i + 1) + " implies r" + std::to_string(j + 1),
                    [&] { return implies_rel(kids[i].g, kids[j].r, u, o); });
        }
    }
    return rc.report;
}

inline CheckReport check_par_int(const Quintuple& concl, const Quintuple& left, const Quintuple& right,
                                 const Universe& u, const CheckOptions& o = {}, const std::string& path = "")
{
    return check_par_gen(concl, {left, right}, u, o, path, "par-int");
}

/// Checks every rule application in the tree, children first.
inline CheckReport check_derivation(const Derivation& d, const Universe& u, const CheckOptions& o = {},
                                    const std::string& path = "0")
{
    CheckReport out;
    out.mode = o.filter ? CheckMode::Filtered : CheckMode::Full;
    auto need = [&](std::size_t n, bool exact) {
        bool ok = exact ? d.kids.size() == n : d.kids.size() >= n;
        if (!ok) {
            detail::RuleChecker rc(u, o, path, rule_name(d.rule));
            rc.shape("premise count", false, std::to_string(d.kids.size()) + " premises");
            out.append(rc.report);
        }
        return ok;
    };
    for (std::size_t k = 0; k < d.kids.size(); ++k) {
        out.append(check_derivation(d.kids[k], u, o, path + "/" + std::to_string(k)));
    }
    switch (d.rule) {
    case Rule::Asgn:
        if (need(0, true)) out.append(check_asgn(d.concl, u, o, path));
        break;
    case Rule::SpinLoop:
        if (need(0, true)) out.append(check_spin_loop(d.concl, u, o, path));
        break;
    case Rule::Seq:
        if (need(2, true)) {
            if (!d.mid) throw std::invalid_argument("seq node without a mid predicate");
            out.append(check_seq(d.concl, d.mid, d.kids[0].concl, d.kids[1].concl, u, o, path));
        }
        break;
    case Rule::Conseq:
        if (need(1, true)) out.append(check_conseq(d.concl, d.kids[0].concl, u, o, path));
        break;
    case Rule::ParU:
        if (need(2, true)) out.append(check_par_u(d.concl, d.kids[0].concl, d.kids[1].concl, u, o, path));
        break;
    case Rule::ParInt:
        if (need(2, true)) out.append(check_par_int(d.concl, d.kids[0].concl, d.kids[1].concl, u, o, path));
        break;
    case Rule::ParGen:
        if (need(2, false)) {
            std::vector<Quintuple> qs;
            for (const auto& k : d.kids) qs.push_back(k.concl);
            out.append(check_par_gen(d.concl, qs, u, o, path));
        }
        break;
    }
    return out;
}

/// All concluded quintuples of a derivation, root first.
inline void collect_quintuples(const Derivation& d, std::vector<Quintuple>& out)
{
    out.push_back(d.concl);
    for (const auto& k : d.kids) collect_quintuples(k, out);
}

// ---------------------------------------------------------------------------
// S-expression form

namespace detail {

inline SExpr apply_defines(const SExpr& s, const std::map<std::string, SExpr>& defs)
{
    if (s.atom) {
        auto it = defs.find(s.text);
        return it == defs.end() ? s : it->second;
    }
    SExpr out = s;
    for (auto& k : out.items) k = apply_defines(k, defs);
    return out;
}

inline Quintuple parse_quintuple(const SExpr& s)
{
    bool inv = s.is_form("iquint");
    if (!(s.is_form("quint") || inv) || s.items.size() != (inv ? 7u : 6u)) {
        throw ParseError("expected (quint p r c g q) or (iquint p r c g q inv)", s.line);
    }
    Quintuple q{parse_expr(s.items[1]), parse_expr(s.items[2]), parse_command(s.items[3]), parse_expr(s.items[4]),
                parse_expr(s.items[5])};
    if (inv) return expand_invariant({q, parse_expr(s.items[6])});
    return q;
}

inline Derivation parse_derivation_node(const SExpr& s)
{
    if (s.atom || s.items.size() < 2) throw ParseError("expected a rule application", s.line);
    const std::string& h = s.head();
    Derivation d;
    static const std::map<std::string, Rule> rules = {{"asgn", Rule::Asgn},     {"spin", Rule::SpinLoop},
                                                      {"seq", Rule::Seq},       {"conseq", Rule::Conseq},
                                                      {"par-u", Rule::ParU},    {"par-int", Rule::ParInt},
                                                      {"par-gen", Rule::ParGen}};
    auto it = rules.find(h);
    if (it == rules.end()) throw ParseError("unknown rule '" + h + "'", s.line);
    d.rule = it->second;
    d.concl = parse_quintuple(s.items[1]);
    std::size_t from = 2;
    if (d.rule == Rule::Seq) {
        if (s.items.size() < 3) throw ParseError("(seq Q mid D1 D2)", s.line);
        d.mid = parse_expr(s.items[2]);
        from = 3;
    }
    for (std::size_t k = from; k < s.items.size(); ++k) d.kids.push_back(parse_derivation_node(s.items[k]));
    return d;
}

}  // namespace detail

/// Parses (define name form)* followed by one derivation.
inline Derivation parse_derivation(std::string_view text)
{
    auto forms = parse_sexprs(text);
    std::map<std::string, SExpr> defs;
    std::optional<SExpr> body;
    for (const auto& f : forms) {
        if (f.is_form("define")) {
            if (f.items.size() != 3 || !f.items[1].atom) throw ParseError("(define name form)", f.line);
            defs[f.items[1].text] = detail::apply_defines(f.items[2], defs);
        } else if (body) {
            throw ParseError("more than one derivation", f.line);
        } else {
            body = f;
        }
    }
    if (!body) throw ParseError("no derivation", 1);
    return detail::parse_derivation_node(detail::apply_defines(*body, defs));
}

inline std::string to_sexpr(const Derivation& d)
{
    std::string s = "(" + std::string(rule_name(d.rule)) + " " + to_sexpr(d.concl);
    if (d.rule == Rule::Seq) s += " " + to_sexpr(d.mid);
    for (const auto& k : d.kids) s += " " + to_sexpr(k);
    return s + ")";
}

}  // namespace rgclh
