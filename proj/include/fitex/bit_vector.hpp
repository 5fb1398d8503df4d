#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "errors.hpp"

namespace fitex {

// Largest dimension for which exhaustive sweeps over the whole input
// space are supported.
inline constexpr int max_dimension = 20;

// A point of the N-dimensional boolean space.  Coordinate j (0-based)
// holds the value of input b_{j+1}.  The packed representation doubles
// as the point's rank in the canonical input order: coordinate 1 varies
// fastest, so rank = sum of bit(j) << j.
class bit_vector {
public:
    bit_vector(int dimension, std::uint32_t bits) : n_(dimension), bits_(bits) {
        if (dimension < 1 || dimension > max_dimension)
            throw contract_error("bit_vector dimension out of range: " + std::to_string(dimension));
        bits_ &= mask(dimension);
    }

    static bit_vector from_index(int dimension, std::uint32_t index) {
        return bit_vector(dimension, index);
    }

    static bit_vector zero(int dimension) { return bit_vector(dimension, 0); }

    static bit_vector unit(int dimension, int coordinate) {
        return bit_vector(dimension, std::uint32_t{1} << coordinate);
    }

    int dimension() const { return n_; }

    bool bit(int coordinate) const { return (bits_ >> coordinate) & 1u; }

    bit_vector with_bit(int coordinate, bool value) const {
        std::uint32_t b = bits_;
        if (value)
            b |= std::uint32_t{1} << coordinate;
        else
            b &= ~(std::uint32_t{1} << coordinate);
        return bit_vector(n_, b);
    }

    bit_vector flipped(int coordinate) const {
        return bit_vector(n_, bits_ ^ (std::uint32_t{1} << coordinate));
    }

    int count_ones() const { return __builtin_popcount(bits_); }

    // Rank in the canonical order (b_1 fastest).
    std::uint32_t index() const { return bits_; }

    // Leftmost character is b_1.
    std::string to_string() const {
        std::string s(static_cast<std::size_t>(n_), '0');
        for (int j = 0; j < n_; ++j)
            if (bit(j)) s[static_cast<std::size_t>(j)] = '1';
        return s;
    }

    static std::optional<bit_vector> parse(const std::string& text) {
        if (text.empty() || text.size() > static_cast<std::size_t>(max_dimension)) return std::nullopt;
        std::uint32_t bits = 0;
        for (std::size_t j = 0; j < text.size(); ++j) {
            if (text[j] == '1')
                bits |= std::uint32_t{1} << j;
            else if (text[j] != '0')
                return std::nullopt;
        }
        return bit_vector(static_cast<int>(text.size()), bits);
    }

    static std::uint32_t mask(int dimension) {
        return dimension >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << dimension) - 1;
    }

    static std::uint32_t space_size(int dimension) { return std::uint32_t{1} << dimension; }

    friend bool operator==(const bit_vector&, const bit_vector&) = default;
    friend auto operator<=>(const bit_vector& a, const bit_vector& b) {
        if (auto c = a.n_ <=> b.n_; c != 0) return c;
        return a.bits_ <=> b.bits_;
    }

private:
    int n_;
    std::uint32_t bits_;
};

} // namespace fitex
