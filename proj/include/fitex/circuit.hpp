#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bit_vector.hpp"
#include "errors.hpp"

namespace fitex {

// Gate kinds of working nodes.  OR orders before AND everywhere a
// tie-break between the two is needed.
enum class gate_kind : std::uint8_t { OR = 0, AND = 1 };

// Edge polarity: a direct connection forwards the value, a negated
// connection inverts it.
enum class polarity : std::uint8_t { direct = 0, negated = 1 };

inline bool apply_polarity(polarity p, bool value) {
    return p == polarity::negated ? !value : value;
}

inline bool apply_gate(gate_kind g, bool a, bool b) {
    return g == gate_kind::AND ? (a && b) : (a || b);
}

inline char gate_char(gate_kind g) { return g == gate_kind::AND ? '&' : '|'; }

// Reference to a node: one of the N inputs or one of the d working
// nodes, both 0-based.
struct node_ref {
    bool is_input;
    int index;

    static node_ref input(int j) { return {true, j}; }
    static node_ref working(int k) { return {false, k}; }

    // Canonical position: inputs first, then working nodes in list order.
    int position(int n_inputs) const { return is_input ? index : n_inputs + index; }

    friend bool operator==(const node_ref&, const node_ref&) = default;
};

struct connection {
    node_ref from;
    polarity pol = polarity::direct;

    friend bool operator==(const connection&, const connection&) = default;
};

// A 2-fanin AND/OR node.  Both incoming connections must originate at
// strictly earlier nodes of the owning circuit.
struct working_node {
    gate_kind gate;
    connection left;
    connection right;

    friend bool operator==(const working_node&, const working_node&) = default;
};

enum class violation_kind : std::uint8_t {
    bad_input_index,    // operand references an input outside 1..N
    forward_reference,  // operand references the node itself or a later node
    duplicate_operand,  // both operands originate at the same node
    dangling_node,      // non-ending node with no outgoing connection
    empty_body,         // Nodes form with zero nodes
};

struct violation {
    violation_kind kind;
    int node;  // 0-based working-node index, -1 when not applicable
    std::string detail;
};

// A boolean circuit over B^N.  Besides the general form (a
// topologically ordered list of working nodes whose last element is
// the ending node) the zero-node degenerate forms are admitted:
// constants and single (possibly negated) input literals.
class circuit {
public:
    enum class body_kind : std::uint8_t { const_false = 0, const_true = 1, literal = 2, nodes = 3 };

    static circuit constant(int n_inputs, bool value) {
        circuit c(n_inputs);
        c.kind_ = value ? body_kind::const_true : body_kind::const_false;
        return c;
    }

    static circuit literal(int n_inputs, int input, polarity pol = polarity::direct) {
        if (input < 0 || input >= n_inputs)
            throw contract_error("literal input index out of range");
        circuit c(n_inputs);
        c.kind_ = body_kind::literal;
        c.lit_input_ = input;
        c.lit_pol_ = pol;
        return c;
    }

    static circuit from_nodes(int n_inputs, std::vector<working_node> nodes) {
        circuit c(n_inputs);
        c.kind_ = body_kind::nodes;
        c.nodes_ = std::move(nodes);
        return c;
    }

    int n_inputs() const { return n_; }
    body_kind kind() const { return kind_; }
    bool is_degenerate() const { return kind_ != body_kind::nodes; }

    int literal_input() const { return lit_input_; }
    polarity literal_polarity() const { return lit_pol_; }
    const std::vector<working_node>& nodes() const { return nodes_; }

    // d(C): number of AND/OR nodes.
    int node_count() const {
        return kind_ == body_kind::nodes ? static_cast<int>(nodes_.size()) : 0;
    }

    // s(C): d(C) plus one per negation connection.  A negated literal
    // costs one inverter even though it has no node.
    int gate_size() const {
        if (kind_ == body_kind::literal) return lit_pol_ == polarity::negated ? 1 : 0;
        int s = node_count();
        for (const auto& g : nodes_) {
            if (g.left.pol == polarity::negated) ++s;
            if (g.right.pol == polarity::negated) ++s;
        }
        return s;
    }

    friend bool operator==(const circuit&, const circuit&) = default;

private:
    explicit circuit(int n_inputs) : n_(n_inputs) {
        if (n_inputs < 1 || n_inputs > max_dimension)
            throw contract_error("circuit dimension out of range");
    }

    int n_;
    body_kind kind_ = body_kind::const_false;
    int lit_input_ = 0;
    polarity lit_pol_ = polarity::direct;
    std::vector<working_node> nodes_;
};

// Returns every invariant violation; an empty list means the circuit is
// well formed.  Cycles cannot occur with index-based references, so the
// acyclicity check degenerates to the forward-reference check.
inline std::vector<violation> validate(const circuit& c) {
    std::vector<violation> out;
    if (c.is_degenerate()) return out;
    const auto& nodes = c.nodes();
    if (nodes.empty()) {
        out.push_back({violation_kind::empty_body, -1, "Nodes form requires d >= 1"});
        return out;
    }
    const int d = static_cast<int>(nodes.size());
    std::vector<int> fanout(static_cast<std::size_t>(d), 0);
    for (int i = 0; i < d; ++i) {
        auto check = [&](const connection& conn, const char* side) {
            const node_ref r = conn.from;
            if (r.is_input) {
                if (r.index < 0 || r.index >= c.n_inputs())
                    out.push_back({violation_kind::bad_input_index, i,
                                   std::string(side) + " operand input index " + std::to_string(r.index + 1)});
            } else {
                if (r.index < 0 || r.index >= i)
                    out.push_back({violation_kind::forward_reference, i,
                                   std::string(side) + " operand references g" + std::to_string(r.index + 1)});
                else
                    ++fanout[static_cast<std::size_t>(r.index)];
            }
        };
        check(nodes[static_cast<std::size_t>(i)].left, "left");
        check(nodes[static_cast<std::size_t>(i)].right, "right");
        if (nodes[static_cast<std::size_t>(i)].left.from == nodes[static_cast<std::size_t>(i)].right.from)
            out.push_back({violation_kind::duplicate_operand, i, "both operands share one source"});
    }
    for (int i = 0; i + 1 < d; ++i)
        if (fanout[static_cast<std::size_t>(i)] == 0)
            out.push_back({violation_kind::dangling_node, i,
                           "g" + std::to_string(i + 1) + " has no outgoing connection"});
    return out;
}

inline bool is_valid(const circuit& c) { return validate(c).empty(); }

// Values taken at every node of a circuit for one input.
struct node_values {
    bit_vector inputs;
    std::vector<bool> working;

    bool value_of(node_ref r) const {
        return r.is_input ? inputs.bit(r.index) : working[static_cast<std::size_t>(r.index)];
    }
};

inline node_values propagate(const circuit& c, const bit_vector& v) {
    if (v.dimension() != c.n_inputs())
        throw contract_error("input dimension " + std::to_string(v.dimension()) +
                             " does not match circuit dimension " + std::to_string(c.n_inputs()));
    node_values nv{v, {}};
    if (c.kind() == circuit::body_kind::nodes) {
        nv.working.reserve(c.nodes().size());
        for (const auto& g : c.nodes()) {
            const bool a = apply_polarity(g.left.pol, nv.value_of(g.left.from));
            const bool b = apply_polarity(g.right.pol, nv.value_of(g.right.from));
            nv.working.push_back(apply_gate(g.gate, a, b));
        }
    }
    return nv;
}

inline bool evaluate(const circuit& c, const bit_vector& v) {
    switch (c.kind()) {
        case circuit::body_kind::const_false: return false;
        case circuit::body_kind::const_true: return true;
        case circuit::body_kind::literal: {
            if (v.dimension() != c.n_inputs())
                throw contract_error("input dimension does not match circuit dimension");
            return apply_polarity(c.literal_polarity(), v.bit(c.literal_input()));
        }
        case circuit::body_kind::nodes: break;
    }
    return propagate(c, v).working.back();
}

// Level of each working node: 1 + max level of its operands, inputs at
// level 0.  Assumes a topologically ordered node list.
inline std::vector<int> node_levels(const circuit& c) {
    std::vector<int> lvl;
    lvl.reserve(c.nodes().size());
    for (const auto& g : c.nodes()) {
        auto of = [&](node_ref r) { return r.is_input ? 0 : lvl[static_cast<std::size_t>(r.index)]; };
        lvl.push_back(1 + std::max(of(g.left.from), of(g.right.from)));
    }
    return lvl;
}

// Total order on circuits used wherever a single canonical
// representative must be chosen.  Degenerate bodies order
// ConstFalse < ConstTrue < b_1 < !b_1 < b_2 < ... and precede all
// Nodes-form circuits; Nodes-form circuits compare by node count, then
// lexicographically by per-node tuples.
inline std::vector<int> canonical_key(const circuit& c) {
    std::vector<int> key;
    switch (c.kind()) {
        case circuit::body_kind::const_false: key = {0, 0}; return key;
        case circuit::body_kind::const_true: key = {0, 1}; return key;
        case circuit::body_kind::literal:
            key = {0, 2 + 2 * c.literal_input() + (c.literal_polarity() == polarity::negated ? 1 : 0)};
            return key;
        case circuit::body_kind::nodes: break;
    }
    key.push_back(c.node_count());
    for (const auto& g : c.nodes()) {
        key.push_back(g.left.from.position(c.n_inputs()));
        key.push_back(g.right.from.position(c.n_inputs()));
        key.push_back(static_cast<int>(g.gate));
        key.push_back(static_cast<int>(g.left.pol));
        key.push_back(static_cast<int>(g.right.pol));
    }
    return key;
}

inline bool canonical_less(const circuit& a, const circuit& b) {
    return canonical_key(a) < canonical_key(b);
}

} // namespace fitex
