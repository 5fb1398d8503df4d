#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "connection_matrix.hpp"

namespace fitex {

// One row of a level: either a gate carried over from the circuit or a
// spurious pass-through node forwarding one value from the level below.
struct level_entry {
    bool is_pass;
    // Gate rows: operand positions in the previous level plus the gate.
    int src_a = -1;
    int src_b = -1;
    polarity pol_a = polarity::direct;
    polarity pol_b = polarity::direct;
    gate_kind gate = gate_kind::OR;
    // Bookkeeping: the circuit node this row computes (gate rows) or the
    // node whose value it forwards (pass rows).
    node_ref origin = node_ref::input(0);
};

// Level-by-level form of a circuit: after inserting spurious nodes every
// connection spans exactly one level, so evaluation is a chain of
// per-level matrix applications.  Level 0 is the inputs; the top level
// holds exactly the ending node.
class level_decomposition {
public:
    int n_inputs = 0;
    std::vector<std::vector<level_entry>> levels;

    int depth() const { return static_cast<int>(levels.size()); }

    int spurious_count() const {
        int s = 0;
        for (const auto& lvl : levels)
            for (const auto& e : lvl) s += e.is_pass ? 1 : 0;
        return s;
    }

    connection_matrix level_matrix(int level) const {
        const auto& lvl = levels[static_cast<std::size_t>(level)];
        const int prev = level == 0 ? n_inputs : static_cast<int>(levels[static_cast<std::size_t>(level - 1)].size());
        connection_matrix m(static_cast<int>(lvl.size()), prev);
        for (int r = 0; r < static_cast<int>(lvl.size()); ++r) {
            const auto& e = lvl[static_cast<std::size_t>(r)];
            if (e.is_pass) {
                m.set(r, e.src_a, matrix_symbol::pass);
            } else {
                m.set(r, e.src_a, make_symbol(e.gate, e.pol_a));
                m.set(r, e.src_b, make_symbol(e.gate, e.pol_b));
            }
        }
        return m;
    }

    std::vector<connection_matrix> matrices() const {
        std::vector<connection_matrix> out;
        out.reserve(levels.size());
        for (int k = 0; k < depth(); ++k) out.push_back(level_matrix(k));
        return out;
    }
};

namespace detail {

// Within-level row order: pass rows sort as if their second operand sat
// beyond every real position, gate rows by sorted operand positions,
// then OR before AND and direct before negated.
struct level_row_key {
    int lo, hi, gate, lo_pol, hi_pol;
    friend auto operator<=>(const level_row_key&, const level_row_key&) = default;
};

inline level_row_key row_key(const level_entry& e) {
    if (e.is_pass) return {e.src_a, std::numeric_limits<int>::max(), 0, 0, 0};
    int lo = e.src_a, hi = e.src_b;
    int lq = static_cast<int>(e.pol_a), hq = static_cast<int>(e.pol_b);
    if (lo > hi) {
        std::swap(lo, hi);
        std::swap(lq, hq);
    }
    return {lo, hi, static_cast<int>(e.gate), lq, hq};
}

} // namespace detail

inline level_decomposition decompose_levels(const circuit& c) {
    if (c.is_degenerate())
        throw contract_error("degenerate circuits have no level decomposition");
    if (!is_valid(c)) throw contract_error("decompose_levels requires a valid circuit");

    const int n = c.n_inputs();
    const int d = c.node_count();
    const std::vector<int> lvl_of = node_levels(c);
    const int depth = *std::max_element(lvl_of.begin(), lvl_of.end());

    // Highest level at which each node's value is consumed; determines
    // how far a pass-through chain must carry it.
    auto need_upto = [&](node_ref r) {
        int last = r.is_input ? 0 : lvl_of[static_cast<std::size_t>(r.index)];
        for (int i = 0; i < d; ++i) {
            const auto& g = c.nodes()[static_cast<std::size_t>(i)];
            if (g.left.from == r || g.right.from == r)
                last = std::max(last, lvl_of[static_cast<std::size_t>(i)] - 1);
        }
        return last;
    };

    level_decomposition dec;
    dec.n_inputs = n;
    dec.levels.resize(static_cast<std::size_t>(depth));

    // Position of every value at every level: pos[k] maps a node (by
    // canonical position) to its row in level k.
    std::vector<std::map<int, int>> pos(static_cast<std::size_t>(depth + 1));
    for (int j = 0; j < n; ++j) pos[0][j] = j;

    for (int k = 1; k <= depth; ++k) {
        std::vector<level_entry> rows;
        for (int i = 0; i < d; ++i) {
            if (lvl_of[static_cast<std::size_t>(i)] != k) continue;
            const auto& g = c.nodes()[static_cast<std::size_t>(i)];
            level_entry e;
            e.is_pass = false;
            e.gate = g.gate;
            e.src_a = pos[static_cast<std::size_t>(k - 1)].at(g.left.from.position(n));
            e.pol_a = g.left.pol;
            e.src_b = pos[static_cast<std::size_t>(k - 1)].at(g.right.from.position(n));
            e.pol_b = g.right.pol;
            e.origin = node_ref::working(i);
            rows.push_back(e);
        }
        // Spurious rows: one per value produced below level k and still
        // needed above it.
        for (const auto& [p, row] : pos[static_cast<std::size_t>(k - 1)]) {
            const node_ref r = p < n ? node_ref::input(p) : node_ref::working(p - n);
            if ((r.is_input ? 0 : lvl_of[static_cast<std::size_t>(r.index)]) < k && need_upto(r) >= k) {
                level_entry e;
                e.is_pass = true;
                e.src_a = row;
                e.origin = r;
                rows.push_back(e);
            }
        }
        std::stable_sort(rows.begin(), rows.end(), [](const level_entry& a, const level_entry& b) {
            return detail::row_key(a) < detail::row_key(b);
        });
        for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
            const auto& e = rows[static_cast<std::size_t>(r)];
            pos[static_cast<std::size_t>(k)][e.origin.position(n)] = r;
        }
        dec.levels[static_cast<std::size_t>(k - 1)] = std::move(rows);
    }
    return dec;
}

// Applies one level to the value vector of the level below.
inline std::vector<bool> apply_level(const std::vector<level_entry>& level, const std::vector<bool>& below) {
    std::vector<bool> out;
    out.reserve(level.size());
    for (const auto& e : level) {
        if (e.is_pass) {
            out.push_back(below[static_cast<std::size_t>(e.src_a)]);
        } else {
            const bool a = apply_polarity(e.pol_a, below[static_cast<std::size_t>(e.src_a)]);
            const bool b = apply_polarity(e.pol_b, below[static_cast<std::size_t>(e.src_b)]);
            out.push_back(apply_gate(e.gate, a, b));
        }
    }
    return out;
}

// Value vectors of every level, index 0 = inputs.
inline std::vector<std::vector<bool>> level_values(const level_decomposition& dec, const bit_vector& v) {
    if (v.dimension() != dec.n_inputs)
        throw contract_error("input dimension does not match decomposition");
    std::vector<std::vector<bool>> trace;
    std::vector<bool> cur;
    cur.reserve(static_cast<std::size_t>(v.dimension()));
    for (int j = 0; j < v.dimension(); ++j) cur.push_back(v.bit(j));
    trace.push_back(cur);
    for (const auto& lvl : dec.levels) {
        cur = apply_level(lvl, cur);
        trace.push_back(cur);
    }
    return trace;
}

inline bool eval_by_levels(const level_decomposition& dec, const bit_vector& v) {
    const auto trace = level_values(dec, v);
    if (trace.back().size() != 1) throw contract_error("top level must hold exactly the ending node");
    return trace.back().front();
}

// K: number of levels; 0 for degenerate bodies.
inline int depth(const circuit& c) {
    if (c.is_degenerate()) return 0;
    const auto lvl = node_levels(c);
    return *std::max_element(lvl.begin(), lvl.end());
}

} // namespace fitex
