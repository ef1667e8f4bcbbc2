#pragma once

#include <rgclh/value.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rgclh {

/// The finite set of values a variable may take, in a fixed order.
struct Domain {
    std::string type_name;
    std::vector<Value> values;

    int index_of(const Value& v) const
    {
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (values[k] == v) {
                return static_cast<int>(k);
            }
        }
        return -1;
    }

    std::size_t size() const { return values.size(); }

    static Domain booleans() { return {"bool", {Value::boolean(false), Value::boolean(true)}}; }

    static Domain ints(int lo, int hi)
    {
        Domain d{"int[" + std::to_string(lo) + ".." + std::to_string(hi) + "]", {}};
        for (int v = lo; v <= hi; ++v) {
            d.values.push_back(Value::integer(v));
        }
        return d;
    }

    static Domain threads(int n)
    {
        Domain d{"thread", {}};
        for (int t = 0; t < n; ++t) {
            d.values.push_back(Value::thread(t));
        }
        return d;
    }

    static Domain nodes(int count, bool with_bottom)
    {
        Domain d{with_bottom ? "node?" : "node", {}};
        for (int n = 0; n < count; ++n) {
            d.values.push_back(Value::node(n));
        }
        if (with_bottom) {
            d.values.push_back(Value::bottom());
        }
        return d;
    }

    static Domain statuses() { return {"status", {Value::granted(), Value::pending()}}; }

    static Domain locks(int n)
    {
        Domain d{"lock", {Value::lock_free()}};
        for (int t = 0; t < n; ++t) {
            d.values.push_back(Value::held(t));
        }
        return d;
    }

    /// Every sequence of thread identifiers of length at most max_len,
    /// duplicates included, ordered by length and then lexicographically.
    static Domain thread_seqs(int n, int max_len)
    {
        Domain d{"seq", {}};
        std::vector<int> cur;
        for (int len = 0; len <= max_len; ++len) {
            cur.assign(static_cast<std::size_t>(len), 0);
            while (true) {
                d.values.push_back(Value::list(Kind::Thread, std::span<const int>(cur)));
                int k = len - 1;
                while (k >= 0 && cur[static_cast<std::size_t>(k)] == n - 1) {
                    cur[static_cast<std::size_t>(k)] = 0;
                    --k;
                }
                if (k < 0) {
                    break;
                }
                ++cur[static_cast<std::size_t>(k)];
            }
        }
        return d;
    }
};

enum class IndexKind { Threads, Nodes };

struct VarDecl {
    std::string name;
    std::shared_ptr<const Domain> domain;
    std::string array;  // empty for scalars
    int index = -1;     // cell index within the array
};

struct ArrayDecl {
    std::string name;
    IndexKind index = IndexKind::Threads;
    std::vector<int> cells;  // variable id per index
};

/// Variable declarations over a fixed number of threads and nodes. Arrays
/// (per-thread variables, heap cells) are flattened into scalar cells named
/// `name[t1]` or `name[n0]`. Variable ids follow lexicographic name order,
/// which is also the enumeration order.
class Universe {
public:
    class Builder {
    public:
        Builder(int threads, int nodes) : threads_(threads), nodes_(nodes)
        {
            if (threads < 0 || nodes < 0) {
                throw std::invalid_argument("negative thread or node count");
            }
        }

        Builder& scalar(std::string name, Domain d)
        {
            pending_.push_back({std::move(name), std::make_shared<const Domain>(std::move(d)), "", -1});
            return *this;
        }

        Builder& array(const std::string& name, IndexKind index, Domain d)
        {
            auto dom = std::make_shared<const Domain>(std::move(d));
            int count = index == IndexKind::Threads ? threads_ : nodes_;
            for (int k = 0; k < count; ++k) {
                std::string cell = name + "[" + (index == IndexKind::Threads ? thread_name(k) : node_name(k)) + "]";
                pending_.push_back({cell, dom, name, k});
            }
            arrays_.push_back({name, index, {}});
            return *this;
        }

        Universe build() const { return Universe(threads_, nodes_, pending_, arrays_); }

    private:
        int threads_;
        int nodes_;
        std::vector<VarDecl> pending_;
        std::vector<ArrayDecl> arrays_;
    };

    Universe() = default;

    int threads() const { return threads_; }
    int nodes() const { return nodes_; }
    std::size_t size() const { return vars_.size(); }
    const VarDecl& var(std::size_t id) const { return vars_[id]; }
    const std::vector<VarDecl>& vars() const { return vars_; }

    std::optional<int> find(const std::string& name) const
    {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    int id(const std::string& name) const
    {
        auto v = find(name);
        if (!v) {
            throw EvalError(EvalErrorKind::UndeclaredVariable, name);
        }
        return *v;
    }

    const ArrayDecl* array(const std::string& name) const
    {
        auto it = arrays_.find(name);
        return it == arrays_.end() ? nullptr : &it->second;
    }
    const std::map<std::string, ArrayDecl>& arrays() const { return arrays_; }

    /// Product of domain sizes (saturating).
    double state_count() const
    {
        double c = 1;
        for (const auto& v : vars_) {
            c *= static_cast<double>(v.domain->size());
        }
        return c;
    }

private:
    Universe(int threads, int nodes, std::vector<VarDecl> decls, const std::vector<ArrayDecl>& arrays)
        : threads_(threads), nodes_(nodes), vars_(std::move(decls))
    {
        std::sort(vars_.begin(), vars_.end(), [](const VarDecl& a, const VarDecl& b) { return a.name < b.name; });
        for (std::size_t k = 0; k < vars_.size(); ++k) {
            if (vars_[k].domain->values.empty()) {
                throw std::invalid_argument("empty domain for " + vars_[k].name);
            }
            if (vars_[k].domain->values.size() > 65535) {
                throw std::invalid_argument("domain too large for " + vars_[k].name);
            }
            if (!by_name_.emplace(vars_[k].name, static_cast<int>(k)).second) {
                throw std::invalid_argument("duplicate variable " + vars_[k].name);
            }
        }
        for (const auto& a : arrays) {
            ArrayDecl decl = a;
            int count = a.index == IndexKind::Threads ? threads_ : nodes_;
            decl.cells.assign(static_cast<std::size_t>(count), -1);
            arrays_.emplace(a.name, std::move(decl));
        }
        for (std::size_t k = 0; k < vars_.size(); ++k) {
            if (!vars_[k].array.empty()) {
                arrays_.at(vars_[k].array).cells[static_cast<std::size_t>(vars_[k].index)] = static_cast<int>(k);
            }
        }
    }

    int threads_ = 0;
    int nodes_ = 0;
    std::vector<VarDecl> vars_;
    std::map<std::string, int> by_name_;
    std::map<std::string, ArrayDecl> arrays_;
};

/// A total assignment: one domain index per declared variable.
using State = std::vector<std::uint16_t>;

inline const Value& value_of(const Universe& u, const State& s, int id)
{
    return u.var(static_cast<std::size_t>(id)).domain->values[s[static_cast<std::size_t>(id)]];
}

inline void assign(const Universe& u, State& s, int id, const Value& v)
{
    const auto& decl = u.var(static_cast<std::size_t>(id));
    int k = decl.domain->index_of(v);
    if (k < 0) {
        throw EvalError(EvalErrorKind::OutOfDomain, to_string(v) + " not in domain of " + decl.name);
    }
    s[static_cast<std::size_t>(id)] = static_cast<std::uint16_t>(k);
}

inline void assign(const Universe& u, State& s, const std::string& name, const Value& v) { assign(u, s, u.id(name), v); }

/// The state with every variable at its first domain value, overridden by `values`.
inline State make_state(const Universe& u, const std::map<std::string, Value>& values = {})
{
    State s(u.size(), 0);
    for (const auto& [name, v] : values) {
        assign(u, s, name, v);
    }
    return s;
}

inline std::string describe(const Universe& u, const State& s)
{
    std::string out = "{";
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (k) {
            out += ", ";
        }
        out += u.var(k).name + "=" + to_string(value_of(u, s, static_cast<int>(k)));
    }
    return out + "}";
}

}  // namespace rgclh
