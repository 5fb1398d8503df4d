#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bit_vector.hpp"
#include "circuit.hpp"

namespace fitex {

// Full value table of a boolean function on B^N.  Entry order is the
// canonical input order (b_1 varies fastest).
class truth_table {
public:
    explicit truth_table(int dimension)
        : n_(dimension), bits_(bit_vector::space_size(dimension), 0) {
        if (dimension < 1 || dimension > max_dimension)
            throw contract_error("truth table dimension out of range");
    }

    static truth_table from_string(int dimension, const std::string& bits) {
        truth_table t(dimension);
        if (bits.size() != t.bits_.size())
            throw contract_error("truth table expects " + std::to_string(t.bits_.size()) + " entries");
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != '0' && bits[i] != '1') throw contract_error("truth table entries must be 0 or 1");
            t.bits_[i] = bits[i] == '1';
        }
        return t;
    }

    static truth_table from_u64(int dimension, std::uint64_t bits) {
        if (dimension > 6) throw contract_error("packed tables support at most 6 inputs");
        truth_table t(dimension);
        for (std::size_t i = 0; i < t.bits_.size(); ++i) t.bits_[i] = (bits >> i) & 1u;
        return t;
    }

    static truth_table from_function(int dimension, const std::function<bool(const bit_vector&)>& f) {
        truth_table t(dimension);
        for (std::uint32_t i = 0; i < bit_vector::space_size(dimension); ++i)
            t.bits_[i] = f(bit_vector::from_index(dimension, i));
        return t;
    }

    int dimension() const { return n_; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(bits_.size()); }

    bool value(const bit_vector& v) const {
        if (v.dimension() != n_) throw contract_error("truth table dimension mismatch");
        return bits_[v.index()];
    }
    bool value_at(std::uint32_t index) const { return bits_[index]; }
    void set(std::uint32_t index, bool v) { bits_[index] = v; }

    std::uint64_t as_u64() const {
        if (n_ > 6) throw contract_error("table too wide for 64-bit packing");
        std::uint64_t out = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out |= std::uint64_t{1} << i;
        return out;
    }

    std::string to_string() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) s[i] = '1';
        return s;
    }

    friend bool operator==(const truth_table&, const truth_table&) = default;
    friend auto operator<=>(const truth_table& a, const truth_table& b) {
        if (auto c = a.n_ <=> b.n_; c != 0) return c;
        return a.bits_ <=> b.bits_;
    }

private:
    int n_;
    std::vector<std::uint8_t> bits_;
};

inline truth_table truth_table_of(const circuit& c) {
    return truth_table::from_function(c.n_inputs(), [&](const bit_vector& v) { return evaluate(c, v); });
}

// Parity: 1 iff the number of ones is odd.
inline truth_table parity_fn(int dimension) {
    return truth_table::from_function(dimension,
                                      [](const bit_vector& v) { return v.count_ones() % 2 == 1; });
}

// sign(x) = 1 iff x > 0; zero maps to 0.
inline bool sign_positive(double x) { return x > 0.0; }

// Linear threshold: 1 iff sum(weights[j] * b_{j+1}) - theta > 0.
inline truth_table threshold_fn(const std::vector<double>& weights, double theta, int dimension) {
    if (static_cast<int>(weights.size()) != dimension)
        throw contract_error("threshold_fn expects one weight per input");
    return truth_table::from_function(dimension, [&](const bit_vector& v) {
        double acc = -theta;
        for (int j = 0; j < dimension; ++j)
            if (v.bit(j)) acc += weights[static_cast<std::size_t>(j)];
        return sign_positive(acc);
    });
}

// Embeds v as sum b_k * 2^-k, evaluates the polynomial given by its
// coefficients (coeffs[i] multiplies x^i) and applies the sign.
inline truth_table polynomial_embed_fn(const std::vector<double>& coeffs, int dimension) {
    return truth_table::from_function(dimension, [&](const bit_vector& v) {
        double x = 0.0;
        for (int k = 0; k < dimension; ++k)
            if (v.bit(k)) x += std::pow(0.5, k + 1);
        double p = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) p = p * x + coeffs[i];
        return sign_positive(p);
    });
}

} // namespace fitex
