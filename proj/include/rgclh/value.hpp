#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace rgclh {

enum class Kind : std::uint8_t { Bool, Int, Thread, Node, Status, Lock, List };

inline const char* kind_name(Kind k)
{
    switch (k) {
    case Kind::Bool: return "bool";
    case Kind::Int: return "int";
    case Kind::Thread: return "thread";
    case Kind::Node: return "node";
    case Kind::Status: return "status";
    case Kind::Lock: return "lock";
    case Kind::List: return "list";
    }
    return "?";
}

enum class StatusVal : std::int32_t { Granted = 0, Pending = 1 };

enum class EvalErrorKind {
    UnguardedIndex,
    TypeMismatch,
    MissingPostState,
    DereferenceUninitialised,
    OutOfDomain,
    EmptyList,
    UndeclaredVariable,
};

inline const char* error_kind_name(EvalErrorKind k)
{
    switch (k) {
    case EvalErrorKind::UnguardedIndex: return "UnguardedIndex";
    case EvalErrorKind::TypeMismatch: return "TypeMismatch";
    case EvalErrorKind::MissingPostState: return "MissingPostState";
    case EvalErrorKind::DereferenceUninitialised: return "DereferenceUninitialised";
    case EvalErrorKind::OutOfDomain: return "OutOfDomain";
    case EvalErrorKind::EmptyList: return "EmptyList";
    case EvalErrorKind::UndeclaredVariable: return "UndeclaredVariable";
    }
    return "?";
}

class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind)
    {
    }
    EvalErrorKind kind() const noexcept { return kind_; }

private:
    EvalErrorKind kind_;
};

inline constexpr std::size_t kMaxListLen = 8;

/// A finite-domain value. Threads are stored zero-based (t1 is 0), nodes as
/// their index (n0 is 0) with -1 for the uninitialised token, and the lock
/// status as -1 for Free or the holding thread otherwise. Lists hold small
/// element payloads inline so values never allocate.
struct Value {
    Kind kind = Kind::Bool;
    Kind elem = Kind::Bool;
    std::uint8_t len = 0;
    std::int32_t i = 0;
    std::array<std::int8_t, kMaxListLen> items{};

    static Value boolean(bool b) { return scalar(Kind::Bool, b ? 1 : 0); }
    static Value integer(int v) { return scalar(Kind::Int, v); }
    static Value thread(int t) { return scalar(Kind::Thread, t); }
    static Value node(int n) { return scalar(Kind::Node, n); }
    static Value bottom() { return scalar(Kind::Node, -1); }
    static Value status(StatusVal s) { return scalar(Kind::Status, static_cast<std::int32_t>(s)); }
    static Value granted() { return status(StatusVal::Granted); }
    static Value pending() { return status(StatusVal::Pending); }
    static Value lock_free() { return scalar(Kind::Lock, -1); }
    static Value held(int t) { return scalar(Kind::Lock, t); }

    static Value list(Kind elem, std::span<const int> xs)
    {
        if (xs.size() > kMaxListLen) {
            throw EvalError(EvalErrorKind::OutOfDomain, "list longer than " + std::to_string(kMaxListLen));
        }
        Value v;
        v.kind = Kind::List;
        v.elem = elem;
        v.len = static_cast<std::uint8_t>(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            v.items[k] = static_cast<std::int8_t>(xs[k]);
        }
        return v;
    }
    static Value list(Kind elem, std::initializer_list<int> xs)
    {
        return list(elem, std::span<const int>(xs.begin(), xs.size()));
    }

    bool is_bottom() const { return kind == Kind::Node && i < 0; }

    bool as_bool() const
    {
        if (kind != Kind::Bool) {
            throw EvalError(EvalErrorKind::TypeMismatch, std::string("expected bool, got ") + kind_name(kind));
        }
        return i != 0;
    }

    /// The i-th list element as a scalar value.
    Value at(std::size_t k) const { return scalar(elem, items[k]); }

    friend bool operator==(const Value& a, const Value& b)
    {
        if (a.kind != b.kind) {
            return false;
        }
        if (a.kind != Kind::List) {
            return a.i == b.i;
        }
        if (a.len != b.len) {
            return false;
        }
        // an empty list literal carries no element kind
        if (a.len > 0 && a.elem != b.elem) {
            return false;
        }
        for (std::size_t k = 0; k < a.len; ++k) {
            if (a.items[k] != b.items[k]) {
                return false;
            }
        }
        return true;
    }

private:
    static Value scalar(Kind k, std::int32_t payload)
    {
        Value v;
        v.kind = k;
        v.i = payload;
        return v;
    }
};

inline std::string thread_name(int t) { return "t" + std::to_string(t + 1); }
inline std::string node_name(int n) { return n < 0 ? std::string("bot") : "n" + std::to_string(n); }

inline std::string to_string(const Value& v)
{
    switch (v.kind) {
    case Kind::Bool: return v.i ? "true" : "false";
    case Kind::Int: return std::to_string(v.i);
    case Kind::Thread: return thread_name(v.i);
    case Kind::Node: return node_name(v.i);
    case Kind::Status: return v.i == 0 ? "Granted" : "Pending";
    case Kind::Lock: return v.i < 0 ? std::string("Free") : "(Held " + thread_name(v.i) + ")";
    case Kind::List: {
        std::string s = "(list";
        for (std::size_t k = 0; k < v.len; ++k) {
            s += ' ';
            s += to_string(v.at(k));
        }
        return s + ")";
    }
    }
    return "?";
}

}  // namespace rgclh
