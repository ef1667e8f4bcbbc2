#pragma once

#include <rgclh/command.hpp>
#include <rgclh/expr.hpp>
#include <rgclh/normalize.hpp>

#include <string>

namespace rgclh {

/// {p, r} c {g, q}
struct Quintuple {
    Expr p;
    Expr r;
    Command c;
    Expr g;
    Expr q;
};

/// A quintuple with an invariant factored out.
struct InvariantQuintuple {
    Quintuple base;
    Expr inv;
};

/// Preservation of the invariant across one step.
inline Expr preserves(const Expr& inv) { return ex::implies(inv, prime(inv)); }

inline Quintuple expand_invariant(const InvariantQuintuple& iq)
{
    const Quintuple& b = iq.base;
    return {ex::and_({b.p, iq.inv}), ex::and_({b.r, preserves(iq.inv)}), b.c, ex::and_({b.g, preserves(iq.inv)}),
            ex::and_({b.q, iq.inv})};
}

inline std::string to_sexpr(const Quintuple& q)
{
    return "(quint " + to_sexpr(q.p) + " " + to_sexpr(q.r) + " " + to_sexpr(q.c) + " " + to_sexpr(q.g) + " " +
           to_sexpr(q.q) + ")";
}

}  // namespace rgclh
