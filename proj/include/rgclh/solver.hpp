#pragma once

#include <rgclh/compile.hpp>
#include <rgclh/universe.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgclh {

/// Raised when a search exceeds its node budget.
class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolveStatus { Unsat, Sat, Error };

struct SolveOutcome {
    SolveStatus status = SolveStatus::Unsat;
    std::vector<std::uint16_t> frame;  // the model, or the state where evaluation failed
    EvalErrorKind error = EvalErrorKind::TypeMismatch;
    std::string message;
    std::uint64_t nodes = 0;
};

/// Finite-domain search for frames on which every constraint evaluates to
/// true. A frame where some constraint fails to evaluate while none is false
/// counts as an Error model: the conjunction is undefined there.
///
/// Search order is either greedy (existence checks; constraints with the
/// fewest open slots are closed first) or by ascending slot (enumeration,
/// which then yields frames in lexicographic order).
class Solver {
public:
    Solver(const Universe& u, int nslots, std::vector<const Compiled*> constraints)
        : u_(u), nslots_(nslots), cons_(std::move(constraints))
    {
    }

    void set_node_limit(std::uint64_t limit) { limit_ = limit; }
    std::uint64_t nodes_visited() const { return total_nodes_; }

    /// Some model, or Unsat. `fixed` holds a domain index per slot or -1.
    /// Slots no constraint reads are pinned to their first value.
    SolveOutcome solve(const std::vector<int>& fixed, int focus = -1)
    {
        SolveOutcome out;
        plan(fixed, focus, true);
        found_ = &out;
        stop_ = false;
        nodes_ = 0;
        on_model_ = nullptr;
        run();
        out.nodes = nodes_;
        total_nodes_ += nodes_;
        return out;
    }

    /// The lexicographically least model (by slot, then domain order).
    SolveOutcome solve_lexmin(const std::vector<int>& fixed, int focus = -1)
    {
        SolveOutcome first = solve(fixed, focus);
        if (first.status == SolveStatus::Unsat) {
            return first;
        }
        std::vector<int> f = fixed;
        std::uint64_t nodes = first.nodes;
        SolveOutcome best = first;
        std::vector<bool> read(static_cast<std::size_t>(nslots_), false);
        for (const auto* c : cons_) {
            for (int s : c->slots()) {
                if (s < nslots_) read[static_cast<std::size_t>(s)] = true;
            }
        }
        for (int slot = 0; slot < nslots_; ++slot) {
            if (f[static_cast<std::size_t>(slot)] >= 0) {
                continue;
            }
            if (!read[static_cast<std::size_t>(slot)]) {
                f[static_cast<std::size_t>(slot)] = 0;
                continue;
            }
            int dsize = static_cast<int>(domain_size(slot));
            bool placed = false;
            for (int v = 0; v < dsize && !placed; ++v) {
                if (v == best.frame[static_cast<std::size_t>(slot)]) {
                    // the current witness already agrees with this prefix
                    f[static_cast<std::size_t>(slot)] = v;
                    placed = true;
                    break;
                }
                f[static_cast<std::size_t>(slot)] = v;
                SolveOutcome o = solve(f, focus);
                nodes += o.nodes;
                if (o.status != SolveStatus::Unsat) {
                    best = o;
                    placed = true;
                }
            }
            if (!placed) {
                throw std::logic_error("lexmin search lost its witness");
            }
        }
        best.nodes = nodes;
        return best;
    }

    /// Calls `fn` for every model in lexicographic order (no pinning); stops
    /// early when `fn` returns false. Error models raise EvalError.
    void for_each(const std::vector<int>& fixed, const std::function<bool(const std::uint16_t*)>& fn)
    {
        SolveOutcome out;
        plan(fixed, -1, false);
        found_ = &out;
        stop_ = false;
        nodes_ = 0;
        on_model_ = &fn;
        run();
        total_nodes_ += nodes_;
        if (out.status == SolveStatus::Error) {
            throw EvalError(out.error, out.message);
        }
    }

    std::size_t domain_size(int slot) const
    {
        int v = static_cast<int>(u_.size());
        return u_.var(static_cast<std::size_t>(slot % v)).domain->size();
    }

private:
    void plan(const std::vector<int>& fixed, int focus, bool greedy)
    {
        frame_.assign(static_cast<std::size_t>(nslots_), 0);
        std::vector<int> pos(static_cast<std::size_t>(nslots_), -1);
        order_.clear();
        std::vector<bool> is_free(static_cast<std::size_t>(nslots_), false);
        for (int s = 0; s < nslots_; ++s) {
            int f = s < static_cast<int>(fixed.size()) ? fixed[static_cast<std::size_t>(s)] : -1;
            if (f >= 0) {
                frame_[static_cast<std::size_t>(s)] = static_cast<std::uint16_t>(f);
            } else {
                is_free[static_cast<std::size_t>(s)] = true;
            }
        }
        auto place = [&](int s) {
            if (s < nslots_ && is_free[static_cast<std::size_t>(s)] && pos[static_cast<std::size_t>(s)] < 0) {
                pos[static_cast<std::size_t>(s)] = static_cast<int>(order_.size());
                order_.push_back(s);
            }
        };
        if (greedy) {
            if (focus >= 0) {
                for (int s : cons_[static_cast<std::size_t>(focus)]->slots()) place(s);
            }
            std::vector<bool> done(cons_.size(), false);
            while (true) {
                int pick = -1;
                std::size_t best_open = std::numeric_limits<std::size_t>::max();
                std::size_t best_size = 0;
                for (std::size_t k = 0; k < cons_.size(); ++k) {
                    if (done[k]) continue;
                    std::size_t open = 0;
                    for (int s : cons_[k]->slots()) {
                        if (s < nslots_ && is_free[static_cast<std::size_t>(s)] && pos[static_cast<std::size_t>(s)] < 0) {
                            ++open;
                        }
                    }
                    if (open == 0) {
                        done[k] = true;
                        continue;
                    }
                    std::size_t size = cons_[k]->slots().size();
                    if (open < best_open || (open == best_open && size < best_size)) {
                        pick = static_cast<int>(k);
                        best_open = open;
                        best_size = size;
                    }
                }
                if (pick < 0) break;
                for (int s : cons_[static_cast<std::size_t>(pick)]->slots()) place(s);
                done[static_cast<std::size_t>(pick)] = true;
            }
            // unread free slots stay at their first value
        } else {
            for (int s = 0; s < nslots_; ++s) place(s);
        }
        levels_.assign(order_.size() + 1, {});
        for (std::size_t k = 0; k < cons_.size(); ++k) {
            int lvl = 0;  // 0: before any choice
            for (int s : cons_[k]->slots()) {
                if (s < nslots_ && pos[static_cast<std::size_t>(s)] >= 0) {
                    lvl = std::max(lvl, pos[static_cast<std::size_t>(s)] + 1);
                }
            }
            levels_[static_cast<std::size_t>(lvl)].push_back(static_cast<int>(k));
        }
        err_level_ = -1;
    }

    // evaluates the constraints closed at `level`; false if one is false
    bool check_level(std::size_t level)
    {
        bool has_post = nslots_ > static_cast<int>(u_.size());
        for (int k : levels_[level]) {
            EvalResult r = cons_[static_cast<std::size_t>(k)]->eval(frame_.data(), has_post);
            if (r.ok) {
                if (r.value.kind != Kind::Bool) {
                    r.ok = false;
                    r.error = EvalErrorKind::TypeMismatch;
                    r.message = "constraint is not boolean";
                } else if (r.value.i == 0) {
                    return false;
                } else {
                    continue;
                }
            }
            if (err_level_ < 0) {
                err_level_ = static_cast<int>(level);
                err_ = std::move(r);
            }
        }
        return true;
    }

    void run()
    {
        if (!check_level(0)) {
            return;
        }
        dfs(0);
    }

    void leaf()
    {
        if (err_level_ >= 0) {
            found_->status = SolveStatus::Error;
            found_->error = err_.error;
            found_->message = err_.message;
            found_->frame = frame_;
            stop_ = true;
            return;
        }
        if (on_model_) {
            if (!(*on_model_)(frame_.data())) {
                stop_ = true;
            }
            return;
        }
        found_->status = SolveStatus::Sat;
        found_->frame = frame_;
        stop_ = true;
    }

    void dfs(std::size_t depth)
    {
        if (depth == order_.size()) {
            leaf();
            return;
        }
        int slot = order_[depth];
        std::size_t dsize = domain_size(slot);
        for (std::size_t v = 0; v < dsize && !stop_; ++v) {
            if (++nodes_ > limit_) {
                throw ResourceLimit("search exceeded " + std::to_string(limit_) + " nodes");
            }
            frame_[static_cast<std::size_t>(slot)] = static_cast<std::uint16_t>(v);
            bool ok = check_level(depth + 1);
            if (ok) {
                dfs(depth + 1);
            }
            if (err_level_ == static_cast<int>(depth + 1)) {
                err_level_ = -1;
            }
        }
    }

    const Universe& u_;
    int nslots_;
    std::vector<const Compiled*> cons_;
    std::vector<std::uint16_t> frame_;
    std::vector<int> order_;
    std::vector<std::vector<int>> levels_;
    int err_level_ = -1;
    EvalResult err_;
    SolveOutcome* found_ = nullptr;
    const std::function<bool(const std::uint16_t*)>* on_model_ = nullptr;
    bool stop_ = false;
    std::uint64_t nodes_ = 0;
    std::uint64_t total_nodes_ = 0;
    std::uint64_t limit_ = std::numeric_limits<std::uint64_t>::max();
};

}  // namespace rgclh
