#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "errors.hpp"

namespace fitex {

// Cell symbols of connection matrices.  `pass` only appears in level
// matrices (spurious rows), never in whole-circuit matrices.
enum class matrix_symbol : std::uint8_t {
    zero = 0,
    or_direct,
    or_negated,
    and_direct,
    and_negated,
    pass,
};

inline const char* symbol_text(matrix_symbol s) {
    switch (s) {
        case matrix_symbol::zero: return "0";
        case matrix_symbol::or_direct: return "|";
        case matrix_symbol::or_negated: return "|!";
        case matrix_symbol::and_direct: return "&";
        case matrix_symbol::and_negated: return "&!";
        case matrix_symbol::pass: return "s";
    }
    return "?";
}

inline matrix_symbol make_symbol(gate_kind g, polarity p) {
    if (g == gate_kind::OR)
        return p == polarity::direct ? matrix_symbol::or_direct : matrix_symbol::or_negated;
    return p == polarity::direct ? matrix_symbol::and_direct : matrix_symbol::and_negated;
}

inline gate_kind symbol_gate(matrix_symbol s) {
    return (s == matrix_symbol::and_direct || s == matrix_symbol::and_negated) ? gate_kind::AND
                                                                               : gate_kind::OR;
}

inline polarity symbol_polarity(matrix_symbol s) {
    return (s == matrix_symbol::or_negated || s == matrix_symbol::and_negated) ? polarity::negated
                                                                               : polarity::direct;
}

// The d x (N+d-1) symbolic matrix of a circuit.  Row i describes
// working node g_{i+1}; columns address b_1..b_N, g_1..g_{d-1}.  The
// ending node has no column.
class connection_matrix {
public:
    connection_matrix(int rows, int cols)
        : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, matrix_symbol::zero) {
        if (rows < 1 || cols < 1) throw contract_error("connection matrix must have positive shape");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int n_inputs() const { return cols_ - rows_ + 1; }

    matrix_symbol at(int r, int c) const { return cells_[idx(r, c)]; }
    void set(int r, int c, matrix_symbol s) { cells_[idx(r, c)] = s; }

    friend bool operator==(const connection_matrix&, const connection_matrix&) = default;

private:
    std::size_t idx(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw contract_error("matrix index out of range");
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
    }

    int rows_, cols_;
    std::vector<matrix_symbol> cells_;
};

inline connection_matrix to_connection_matrix(const circuit& c) {
    if (c.is_degenerate())
        throw contract_error("degenerate circuits have no connection matrix");
    if (!is_valid(c))
        throw contract_error("to_connection_matrix requires a valid circuit");
    const int d = c.node_count();
    connection_matrix m(d, c.n_inputs() + d - 1);
    for (int i = 0; i < d; ++i) {
        const auto& g = c.nodes()[static_cast<std::size_t>(i)];
        m.set(i, g.left.from.position(c.n_inputs()), make_symbol(g.gate, g.left.pol));
        m.set(i, g.right.from.position(c.n_inputs()), make_symbol(g.gate, g.right.pol));
    }
    return m;
}

// Rebuilds the circuit a matrix encodes.  Reports the first offending
// cell coordinates (1-based) on any invariant violation.
inline circuit from_connection_matrix(const connection_matrix& m) {
    const int n = m.n_inputs();
    if (n < 1)
        throw contract_error("matrix shape implies a non-positive input count");
    std::vector<working_node> nodes;
    std::vector<int> fanout(static_cast<std::size_t>(m.rows()), 0);
    std::vector<int> col_use(static_cast<std::size_t>(m.cols()), 0);
    for (int r = 0; r < m.rows(); ++r) {
        std::vector<int> hits;
        for (int ccol = 0; ccol < m.cols(); ++ccol) {
            const matrix_symbol s = m.at(r, ccol);
            if (s == matrix_symbol::pass)
                throw contract_error("pass symbol at row " + std::to_string(r + 1) + ", column " +
                                     std::to_string(ccol + 1) + " is only allowed in level matrices");
            if (s != matrix_symbol::zero) hits.push_back(ccol);
        }
        if (hits.size() != 2)
            throw contract_error("row " + std::to_string(r + 1) + " has " + std::to_string(hits.size()) +
                                 " connections, expected exactly 2");
        const matrix_symbol sl = m.at(r, hits[0]);
        const matrix_symbol sr = m.at(r, hits[1]);
        if (symbol_gate(sl) != symbol_gate(sr))
            throw contract_error("row " + std::to_string(r + 1) + " mixes gate kinds at columns " +
                                 std::to_string(hits[0] + 1) + " and " + std::to_string(hits[1] + 1));
        auto decode = [&](int col) -> node_ref {
            if (col < n) return node_ref::input(col);
            const int k = col - n;
            if (k >= r)
                throw contract_error("row " + std::to_string(r + 1) + ", column " + std::to_string(col + 1) +
                                     " references g" + std::to_string(k + 1) + " at or above the row's own node");
            ++fanout[static_cast<std::size_t>(k)];
            return node_ref::working(k);
        };
        working_node g;
        g.gate = symbol_gate(sl);
        g.left = {decode(hits[0]), symbol_polarity(sl)};
        g.right = {decode(hits[1]), symbol_polarity(sr)};
        nodes.push_back(g);
        ++col_use[static_cast<std::size_t>(hits[0])];
        ++col_use[static_cast<std::size_t>(hits[1])];
    }
    for (int ccol = 0; ccol < m.cols(); ++ccol)
        if (col_use[static_cast<std::size_t>(ccol)] == 0)
            throw contract_error("column " + std::to_string(ccol + 1) + " has no connection");
    return circuit::from_nodes(n, std::move(nodes));
}

namespace detail {

// Sort key realizing the natural order inside one level: dictionary
// order on the (sorted) pair of operand positions, OR before AND on a
// tie, then direct-before-negated polarities.
struct natural_key {
    int level;
    int lo_pos, hi_pos;
    int gate;
    int lo_pol, hi_pol;

    friend auto operator<=>(const natural_key&, const natural_key&) = default;
};

inline natural_key key_of(const working_node& g, int level, int n_inputs,
                          const std::vector<int>& new_pos) {
    auto pos = [&](node_ref r) {
        return r.is_input ? r.index : n_inputs + new_pos[static_cast<std::size_t>(r.index)];
    };
    int lp = pos(g.left.from), rp = pos(g.right.from);
    int lq = static_cast<int>(g.left.pol), rq = static_cast<int>(g.right.pol);
    if (lp > rp) {
        std::swap(lp, rp);
        std::swap(lq, rq);
    }
    return {level, lp, rp, static_cast<int>(g.gate), lq, rq};
}

} // namespace detail

// Permutes working nodes into the natural order: nodes grouped by the
// round in which they become evaluable, dictionary order on operand
// positions within a round.  Each node's operands are stored sorted by
// position.  Idempotent and evaluation preserving.
inline circuit natural_order(const circuit& c) {
    if (c.is_degenerate()) return c;
    if (!is_valid(c)) throw contract_error("natural_order requires a valid circuit");
    const int d = c.node_count();
    const int n = c.n_inputs();
    const std::vector<int> levels = node_levels(c);
    const int depth = *std::max_element(levels.begin(), levels.end());

    std::vector<int> new_pos(static_cast<std::size_t>(d), -1);  // old index -> new rank
    std::vector<int> order;                                     // new rank -> old index
    order.reserve(static_cast<std::size_t>(d));
    for (int lvl = 1; lvl <= depth; ++lvl) {
        std::vector<int> members;
        for (int i = 0; i < d; ++i)
            if (levels[static_cast<std::size_t>(i)] == lvl) members.push_back(i);
        // Operands live in strictly lower levels, so their new positions
        // are already assigned.
        std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
            return detail::key_of(c.nodes()[static_cast<std::size_t>(a)], lvl, n, new_pos) <
                   detail::key_of(c.nodes()[static_cast<std::size_t>(b)], lvl, n, new_pos);
        });
        for (int i : members) {
            new_pos[static_cast<std::size_t>(i)] = static_cast<int>(order.size());
            order.push_back(i);
        }
    }

    std::vector<working_node> nodes;
    nodes.reserve(static_cast<std::size_t>(d));
    for (int old : order) {
        working_node g = c.nodes()[static_cast<std::size_t>(old)];
        auto remap = [&](connection& conn) {
            if (!conn.from.is_input)
                conn.from = node_ref::working(new_pos[static_cast<std::size_t>(conn.from.index)]);
        };
        remap(g.left);
        remap(g.right);
        const int lp = g.left.from.position(n), rp = g.right.from.position(n);
        if (lp > rp) std::swap(g.left, g.right);
        nodes.push_back(g);
    }
    return circuit::from_nodes(n, std::move(nodes));
}

} // namespace fitex
