#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "bit_vector.hpp"
#include "errors.hpp"
#include "truth_table.hpp"

namespace fitex {

// One observation: an input point and an optional output bit.
struct sample {
    bit_vector input;
    std::optional<bool> output;

    friend bool operator==(const sample&, const sample&) = default;
};

// A set of samples over one input space, keyed by input (duplicates are
// rejected).  Iteration order is the canonical input order regardless
// of insertion order, which keeps everything downstream deterministic.
class sample_set {
public:
    explicit sample_set(int dimension) : n_(dimension) {
        if (dimension < 1 || dimension > max_dimension)
            throw contract_error("sample set dimension out of range");
    }

    int dimension() const { return n_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const std::vector<sample>& samples() const { return samples_; }

    bool valued() const {
        return std::all_of(samples_.begin(), samples_.end(),
                           [](const sample& s) { return s.output.has_value(); });
    }

    bool contains(const bit_vector& input) const { return find(input) != nullptr; }

    const sample* find(const bit_vector& input) const {
        auto it = lower_bound(input);
        if (it != samples_.end() && it->input == input) return &*it;
        return nullptr;
    }

    void insert(const sample& s) {
        if (s.input.dimension() != n_) throw contract_error("sample dimension mismatch");
        auto it = lower_bound(s.input);
        if (it != samples_.end() && it->input == s.input)
            throw contract_error("duplicate sample input " + s.input.to_string());
        samples_.insert(it, s);
    }

    void insert(const bit_vector& input, std::optional<bool> output) { insert(sample{input, output}); }

    // Re-observing an input with the same label is a no-op; a different
    // label is a stream inconsistency.
    void insert_or_check(const sample& s) {
        if (s.input.dimension() != n_) throw contract_error("sample dimension mismatch");
        auto it = lower_bound(s.input);
        if (it != samples_.end() && it->input == s.input) {
            if (it->output != s.output)
                throw contract_error("conflicting label for input " + s.input.to_string());
            return;
        }
        samples_.insert(it, s);
    }

    // Samples of f restricted to the given points.
    static sample_set of_function(const truth_table& f, const std::vector<bit_vector>& points) {
        sample_set out(f.dimension());
        for (const auto& x : points) out.insert_or_check(sample{x, f.value(x)});
        return out;
    }

    static sample_set full_domain(const truth_table& f) {
        sample_set out(f.dimension());
        for (std::uint32_t i = 0; i < f.size(); ++i)
            out.insert(sample{bit_vector::from_index(f.dimension(), i), f.value_at(i)});
        return out;
    }

    std::vector<bit_vector> inputs() const {
        std::vector<bit_vector> out;
        out.reserve(samples_.size());
        for (const auto& s : samples_) out.push_back(s.input);
        return out;
    }

    // Labeled subset only.
    sample_set labeled_subset() const {
        sample_set out(n_);
        for (const auto& s : samples_)
            if (s.output) out.samples_.push_back(s);
        return out;
    }

    friend bool operator==(const sample_set&, const sample_set&) = default;

private:
    std::vector<sample>::iterator lower_bound(const bit_vector& input) {
        return std::lower_bound(samples_.begin(), samples_.end(), input,
                                [](const sample& s, const bit_vector& v) { return s.input < v; });
    }
    std::vector<sample>::const_iterator lower_bound(const bit_vector& input) const {
        return std::lower_bound(samples_.begin(), samples_.end(), input,
                                [](const sample& s, const bit_vector& v) { return s.input < v; });
    }

    int n_;
    std::vector<sample> samples_;  // sorted by input
};

} // namespace fitex
