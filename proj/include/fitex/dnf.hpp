#pragma once

#include <vector>

#include "circuit.hpp"
#include "sample.hpp"

namespace fitex {

// Circuit that is 1 exactly at v: a left-deep AND chain over all N
// literals, literal j negated where v_j = 0.  Uses N-1 nodes; for N = 1
// it degenerates to a bare literal.
inline circuit minterm_circuit(const bit_vector& v) {
    const int n = v.dimension();
    auto pol = [&](int j) { return v.bit(j) ? polarity::direct : polarity::negated; };
    if (n == 1) return circuit::literal(1, 0, pol(0));
    std::vector<working_node> nodes;
    nodes.reserve(static_cast<std::size_t>(n - 1));
    nodes.push_back({gate_kind::AND, {node_ref::input(0), pol(0)}, {node_ref::input(1), pol(1)}});
    for (int j = 2; j < n; ++j)
        nodes.push_back({gate_kind::AND,
                         {node_ref::working(j - 2), polarity::direct},
                         {node_ref::input(j), pol(j)}});
    return circuit::from_nodes(n, std::move(nodes));
}

// Fits a valued sample set with the OR of the positive samples'
// minterms (left-deep chain).  Positive minterms are pairwise disjoint,
// so all negative samples land on 0.  Node count is at most
// N * (#positives) - 1; with no positive sample the result is the
// constant-0 circuit.
inline circuit dnf_fitting_circuit(const sample_set& sv) {
    if (sv.empty() || !sv.valued())
        throw contract_error("dnf_fitting_circuit needs a nonempty valued sample set");
    const int n = sv.dimension();
    std::vector<bit_vector> positives;
    for (const auto& s : sv.samples())
        if (*s.output) positives.push_back(s.input);

    if (positives.empty()) return circuit::constant(n, false);
    if (positives.size() == 1) return minterm_circuit(positives.front());

    if (n == 1) {
        // Both points of B^1 positive: the constant-1 circuit fits.
        return circuit::constant(1, true);
    }

    std::vector<working_node> nodes;
    std::vector<connection> ends;  // ending connection of each minterm chain
    for (const auto& v : positives) {
        const circuit m = minterm_circuit(v);
        const int base = static_cast<int>(nodes.size());
        for (working_node g : m.nodes()) {
            if (!g.left.from.is_input) g.left.from.index += base;
            if (!g.right.from.is_input) g.right.from.index += base;
            nodes.push_back(g);
        }
        ends.push_back({node_ref::working(static_cast<int>(nodes.size()) - 1), polarity::direct});
    }
    connection acc = ends[0];
    for (std::size_t k = 1; k < ends.size(); ++k) {
        nodes.push_back({gate_kind::OR, acc, ends[k]});
        acc = {node_ref::working(static_cast<int>(nodes.size()) - 1), polarity::direct};
    }
    return circuit::from_nodes(n, std::move(nodes));
}

} // namespace fitex
