#pragma once

#include <rgclh/expr.hpp>
#include <rgclh/value.hpp>

#include <span>
#include <string>

namespace rgclh::ops {

inline void require_kind(const Value& v, Kind k, const char* op)
{
    if (v.kind != k) {
        throw EvalError(EvalErrorKind::TypeMismatch,
                        std::string(op) + ": expected " + kind_name(k) + ", got " + kind_name(v.kind));
    }
}

inline void require_list(const Value& v, const char* op) { require_kind(v, Kind::List, op); }

inline void require_nonempty(const Value& v, const char* op)
{
    require_list(v, op);
    if (v.len == 0) {
        throw EvalError(EvalErrorKind::EmptyList, std::string(op) + " of empty list");
    }
}

inline bool equal(const Value& a, const Value& b)
{
    if (a.kind != b.kind) {
        throw EvalError(EvalErrorKind::TypeMismatch,
                        std::string("comparing ") + kind_name(a.kind) + " with " + kind_name(b.kind));
    }
    return a == b;
}

inline Value make_list(Kind elem, const int* xs, std::size_t n) { return Value::list(elem, std::span<const int>(xs, n)); }

/// Element kind of a list, resolving the untyped empty list against `other`.
inline Kind join_elem(const Value& a, const Value& b, const char* op)
{
    if (a.len == 0) {
        return b.elem;
    }
    if (b.len == 0) {
        return a.elem;
    }
    if (a.elem != b.elem) {
        throw EvalError(EvalErrorKind::TypeMismatch, std::string(op) + ": mixed element kinds");
    }
    return a.elem;
}

inline bool is_scalar(const Value& v) { return v.kind != Kind::List; }

inline Value list_of(std::span<const Value> xs)
{
    int buf[kMaxListLen];
    if (xs.size() > kMaxListLen) {
        throw EvalError(EvalErrorKind::OutOfDomain, "list literal too long");
    }
    Kind elem = Kind::Thread;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!is_scalar(xs[k])) {
            throw EvalError(EvalErrorKind::TypeMismatch, "nested lists are not supported");
        }
        if (k == 0) {
            elem = xs[k].kind;
        } else if (xs[k].kind != elem) {
            throw EvalError(EvalErrorKind::TypeMismatch, "list literal with mixed element kinds");
        }
        buf[k] = xs[k].i;
    }
    return make_list(elem, buf, xs.size());
}

inline int position(const Value& l, const Value& x)
{
    for (std::size_t k = 0; k < l.len; ++k) {
        if (l.elem == x.kind && l.items[k] == x.i) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

/// Strict operators over fully evaluated arguments. Logical connectives and
/// ite are handled by the callers, which need non-strict evaluation.
inline Value apply(Op op, std::span<const Value> a)
{
    switch (op) {
    case Op::Not: return Value::boolean(!a[0].as_bool());
    case Op::Eq: return Value::boolean(equal(a[0], a[1]));
    case Op::Ne: return Value::boolean(!equal(a[0], a[1]));
    case Op::Lt:
        require_kind(a[0], Kind::Int, "<");
        require_kind(a[1], Kind::Int, "<");
        return Value::boolean(a[0].i < a[1].i);
    case Op::Le:
        require_kind(a[0], Kind::Int, "<=");
        require_kind(a[1], Kind::Int, "<=");
        return Value::boolean(a[0].i <= a[1].i);
    case Op::Add:
        require_kind(a[0], Kind::Int, "+");
        require_kind(a[1], Kind::Int, "+");
        return Value::integer(a[0].i + a[1].i);
    case Op::Sub:
        require_kind(a[0], Kind::Int, "-");
        require_kind(a[1], Kind::Int, "-");
        return Value::integer(a[0].i - a[1].i);
    case Op::ListLit: return list_of(a);
    case Op::Hd:
        require_nonempty(a[0], "hd");
        return a[0].at(0);
    case Op::Last:
        require_nonempty(a[0], "last");
        return a[0].at(a[0].len - 1u);
    case Op::Tl: {
        require_nonempty(a[0], "tl");
        Value v = a[0];
        for (std::size_t k = 0; k + 1 < v.len; ++k) {
            v.items[k] = v.items[k + 1];
        }
        v.items[v.len - 1u] = 0;
        --v.len;
        return v;
    }
    case Op::Butlast: {
        require_nonempty(a[0], "butlast");
        Value v = a[0];
        v.items[v.len - 1u] = 0;
        --v.len;
        return v;
    }
    case Op::Concat: {
        require_list(a[0], "concat");
        require_list(a[1], "concat");
        Kind elem = join_elem(a[0], a[1], "concat");
        if (a[0].len + a[1].len > kMaxListLen) {
            throw EvalError(EvalErrorKind::OutOfDomain, "concat result too long");
        }
        int buf[kMaxListLen];
        std::size_t n = 0;
        for (std::size_t k = 0; k < a[0].len; ++k) buf[n++] = a[0].items[k];
        for (std::size_t k = 0; k < a[1].len; ++k) buf[n++] = a[1].items[k];
        return make_list(elem, buf, n);
    }
    case Op::Cons: {
        require_list(a[1], "cons");
        if (!is_scalar(a[0])) {
            throw EvalError(EvalErrorKind::TypeMismatch, "cons of a list");
        }
        if (a[1].len > 0 && a[1].elem != a[0].kind) {
            throw EvalError(EvalErrorKind::TypeMismatch, "cons: mixed element kinds");
        }
        if (a[1].len + 1u > kMaxListLen) {
            throw EvalError(EvalErrorKind::OutOfDomain, "cons result too long");
        }
        int buf[kMaxListLen];
        buf[0] = a[0].i;
        for (std::size_t k = 0; k < a[1].len; ++k) buf[k + 1] = a[1].items[k];
        return make_list(a[0].kind, buf, a[1].len + 1u);
    }
    case Op::Mem:
        require_list(a[1], "in");
        return Value::boolean(position(a[1], a[0]) >= 0);
    case Op::IndexOf: {
        require_list(a[0], "index");
        int p = position(a[0], a[1]);
        if (p < 0) {
            throw EvalError(EvalErrorKind::UnguardedIndex, to_string(a[1]) + " not in " + to_string(a[0]));
        }
        return Value::integer(p);
    }
    case Op::Len: require_list(a[0], "len"); return Value::integer(a[0].len);
    case Op::Distinct: {
        require_list(a[0], "distinct");
        for (std::size_t x = 0; x < a[0].len; ++x) {
            for (std::size_t y = x + 1; y < a[0].len; ++y) {
                if (a[0].items[x] == a[0].items[y]) {
                    return Value::boolean(false);
                }
            }
        }
        return Value::boolean(true);
    }
    default: break;
    }
    throw EvalError(EvalErrorKind::TypeMismatch, "operator is not strict");
}

}  // namespace rgclh::ops
