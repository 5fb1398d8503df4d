#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "circuit.hpp"
#include "connection_matrix.hpp"
#include "dnf.hpp"
#include "sample.hpp"
#include "truth_table.hpp"

namespace fitex {

struct synthesis_stats {
    std::uint64_t examined = 0;
    std::uint64_t pruned = 0;
    double elapsed_seconds = 0.0;
};

// Extremum problem: minimize the node count over circuits agreeing with
// a valued sample set.
struct fit_problem {
    sample_set samples;
    std::optional<int> d_cap;        // search ceiling; default min(N*|S|-1, 8)
    bool enumerate_all = false;      // collect every minimal function class
    int threads = 1;
    int max_class_dimension = 5;     // guard for full-domain class collection

    explicit fit_problem(sample_set sv) : samples(std::move(sv)) {}
};

struct synthesis_result {
    int d_min = 0;
    // Least witness first; with enumerate_all, the least witness of each
    // function class, ordered by class table.
    std::vector<circuit> witnesses;
    std::vector<truth_table> function_classes;  // populated only with enumerate_all
    synthesis_stats stats;
};

// An operand available to the synthesizer: one of the inputs (cost 0)
// or an opaque sub-circuit whose internal nodes count toward the total.
struct primitive {
    std::uint64_t sig = 0;       // values on the sample inputs
    std::uint64_t full_sig = 0;  // values on all of B^N (dimension <= 6)
    int cost = 0;
    circuit expansion;
};

// The solver packs per-sample values into 64-bit signatures.
inline constexpr std::size_t max_solver_samples = 64;

namespace detail {

struct node_tuple {
    int lo, hi;
    std::uint8_t gate, lp, rp;
};

struct search_config {
    int n = 0;
    std::uint64_t mask = 0;
    std::uint64_t target = 0;
    std::uint64_t full_mask = 0;
    bool track_full = false;
    bool enumerate_all = false;
    bool weighted = false;  // any primitive with nonzero cost
    std::vector<primitive> prims;
};

struct level_fit {
    circuit witness;
    std::uint64_t full_sig = 0;

    explicit level_fit(circuit c) : witness(std::move(c)) {}
};

struct chunk_result {
    bool skipped = false;
    std::vector<level_fit> fits;  // DFS order; first = least within chunk
    std::uint64_t examined = 0;
    std::uint64_t pruned = 0;
};

// Natural-order key of a candidate node, packed so that plain integer
// comparison realizes (level, lo, hi, gate, polarities).
inline std::uint64_t pack_key(int level, const node_tuple& t) {
    return (static_cast<std::uint64_t>(level) << 40) | (static_cast<std::uint64_t>(t.lo) << 24) |
           (static_cast<std::uint64_t>(t.hi) << 8) | (static_cast<std::uint64_t>(t.gate) << 2) |
           (static_cast<std::uint64_t>(t.lp) << 1) | t.rp;
}

// Rebuilds a circuit from placed node tuples, splicing in the expansion
// of every primitive on first use.
inline circuit expand_tuples(const search_config& cfg, const std::vector<node_tuple>& tuples) {
    const int p_count = static_cast<int>(cfg.prims.size());
    std::vector<working_node> nodes;
    struct resolved {
        node_ref ref = node_ref::input(0);
        polarity base = polarity::direct;
        bool done = false;
    };
    std::vector<resolved> prim_ref(static_cast<std::size_t>(p_count));
    std::vector<node_ref> tuple_ref(tuples.size(), node_ref::input(0));

    auto resolve = [&](int pos, polarity pol) -> connection {
        if (pos >= p_count) return {tuple_ref[static_cast<std::size_t>(pos - p_count)], pol};
        auto& r = prim_ref[static_cast<std::size_t>(pos)];
        if (!r.done) {
            const circuit& e = cfg.prims[static_cast<std::size_t>(pos)].expansion;
            if (e.kind() == circuit::body_kind::literal) {
                r.ref = node_ref::input(e.literal_input());
                r.base = e.literal_polarity();
            } else {
                const int base = static_cast<int>(nodes.size());
                for (working_node g : e.nodes()) {
                    if (!g.left.from.is_input) g.left.from.index += base;
                    if (!g.right.from.is_input) g.right.from.index += base;
                    nodes.push_back(g);
                }
                r.ref = node_ref::working(static_cast<int>(nodes.size()) - 1);
            }
            r.done = true;
        }
        const polarity combined =
            (pol == polarity::negated) != (r.base == polarity::negated) ? polarity::negated : polarity::direct;
        return {r.ref, combined};
    };

    for (std::size_t i = 0; i < tuples.size(); ++i) {
        const auto& t = tuples[i];
        working_node g;
        g.gate = static_cast<gate_kind>(t.gate);
        g.left = resolve(t.lo, static_cast<polarity>(t.lp));
        g.right = resolve(t.hi, static_cast<polarity>(t.rp));
        nodes.push_back(g);
        tuple_ref[i] = node_ref::working(static_cast<int>(nodes.size()) - 1);
    }
    return circuit::from_nodes(cfg.n, std::move(nodes));
}

// Depth-first enumeration of all natural-ordered, live, duplicate-free
// node listings of one (depth, budget) slice of one search level.
class level_searcher {
public:
    level_searcher(const search_config& cfg, int depth, int budget, chunk_result& out)
        : cfg_(cfg), depth_(depth), budget_(budget), out_(out) {
        const std::size_t slots = cfg.prims.size() + static_cast<std::size_t>(depth);
        sig_.resize(slots);
        full_.resize(slots);
        level_.resize(slots, 0);
        for (std::size_t p = 0; p < cfg.prims.size(); ++p) {
            sig_[p] = cfg.prims[p].sig;
            full_[p] = cfg.prims[p].full_sig;
        }
        prim_used_.assign(cfg.prims.size(), false);
        refcnt_.assign(static_cast<std::size_t>(depth), 0);
        tuples_.resize(static_cast<std::size_t>(depth));
        keys_.resize(static_cast<std::size_t>(depth));
    }

    // Runs the slice with node 0 fixed to the given candidate.
    void run(const node_tuple& first) {
        if (try_place(0, first)) {
            if (depth_ > 1)
                place(1);
            else
                check_fit();
            unplace(0);
        }
    }

    bool stop() const { return stop_; }

private:
    const search_config& cfg_;
    const int depth_;
    const int budget_;
    chunk_result& out_;

    std::vector<std::uint64_t> sig_, full_;
    std::vector<int> level_;
    std::vector<bool> prim_used_;
    std::vector<int> refcnt_;
    std::vector<node_tuple> tuples_;
    std::vector<std::uint64_t> keys_;
    std::vector<int> undo_prims_;  // flattened (node, prim) undo log
    int cost_ = 0;
    int unref_ = 0;
    bool stop_ = false;

    int prim_count() const { return static_cast<int>(cfg_.prims.size()); }

    bool signature_is_fresh(std::uint64_t s, int placed) const {
        if (s == 0 || s == cfg_.mask) return false;
        const std::uint64_t sc = ~s & cfg_.mask;
        for (int p = 0; p < prim_count(); ++p) {
            if (cfg_.prims[static_cast<std::size_t>(p)].cost > 0 && !prim_used_[static_cast<std::size_t>(p)])
                continue;  // an unused costly operand is not a free substitute
            if (sig_[static_cast<std::size_t>(p)] == s || sig_[static_cast<std::size_t>(p)] == sc) return false;
        }
        for (int k = 0; k < placed; ++k) {
            const std::uint64_t q = sig_[static_cast<std::size_t>(prim_count() + k)];
            if (q == s || q == sc) return false;
        }
        return true;
    }

    bool try_place(int i, const node_tuple& t) {
        ++out_.examined;
        const std::size_t slot = static_cast<std::size_t>(prim_count() + i);
        const int lvl = 1 + std::max(level_[static_cast<std::size_t>(t.lo)], level_[static_cast<std::size_t>(t.hi)]);
        const std::uint64_t key = pack_key(lvl, t);
        if (i > 0 && key <= keys_[static_cast<std::size_t>(i - 1)]) {
            ++out_.pruned;
            return false;
        }

        int added_cost = 1;
        if (cfg_.weighted) {
            if (t.lo < prim_count() && !prim_used_[static_cast<std::size_t>(t.lo)])
                added_cost += cfg_.prims[static_cast<std::size_t>(t.lo)].cost;
            if (t.hi < prim_count() && !prim_used_[static_cast<std::size_t>(t.hi)])
                added_cost += cfg_.prims[static_cast<std::size_t>(t.hi)].cost;
        }
        const int remaining = depth_ - 1 - i;
        if (cost_ + added_cost + remaining > budget_) {
            ++out_.pruned;
            return false;
        }

        const std::uint64_t ls =
            t.lp ? (~sig_[static_cast<std::size_t>(t.lo)] & cfg_.mask) : sig_[static_cast<std::size_t>(t.lo)];
        const std::uint64_t rs =
            t.rp ? (~sig_[static_cast<std::size_t>(t.hi)] & cfg_.mask) : sig_[static_cast<std::size_t>(t.hi)];
        const std::uint64_t s = t.gate == static_cast<std::uint8_t>(gate_kind::AND) ? (ls & rs) : (ls | rs);
        if (!signature_is_fresh(s, i)) {
            ++out_.pruned;
            return false;
        }

        // Live-node feasibility: every later node absorbs at most two
        // unreferenced nodes and introduces one.
        int unref_after = unref_ + 1;
        const int before_lo = t.lo >= prim_count() ? refcnt_[static_cast<std::size_t>(t.lo - prim_count())] : -1;
        const int before_hi = t.hi >= prim_count() ? refcnt_[static_cast<std::size_t>(t.hi - prim_count())] : -1;
        if (before_lo == 0) --unref_after;
        if (before_hi == 0) --unref_after;
        if (unref_after > 1 + remaining) {
            ++out_.pruned;
            return false;
        }

        // Commit.
        tuples_[static_cast<std::size_t>(i)] = t;
        keys_[static_cast<std::size_t>(i)] = key;
        sig_[slot] = s;
        level_[slot] = lvl;
        if (cfg_.track_full) {
            const std::uint64_t lf =
                t.lp ? (~full_[static_cast<std::size_t>(t.lo)] & cfg_.full_mask) : full_[static_cast<std::size_t>(t.lo)];
            const std::uint64_t rf =
                t.rp ? (~full_[static_cast<std::size_t>(t.hi)] & cfg_.full_mask) : full_[static_cast<std::size_t>(t.hi)];
            full_[slot] = t.gate == static_cast<std::uint8_t>(gate_kind::AND) ? (lf & rf) : (lf | rf);
        }
        cost_ += added_cost;
        unref_ = unref_after;
        if (t.lo >= prim_count()) ++refcnt_[static_cast<std::size_t>(t.lo - prim_count())];
        if (t.hi >= prim_count()) ++refcnt_[static_cast<std::size_t>(t.hi - prim_count())];
        if (cfg_.weighted) {
            if (t.lo < prim_count() && !prim_used_[static_cast<std::size_t>(t.lo)]) {
                prim_used_[static_cast<std::size_t>(t.lo)] = true;
                undo_prims_.push_back(t.lo | (i << 16));
            }
            if (t.hi < prim_count() && !prim_used_[static_cast<std::size_t>(t.hi)]) {
                prim_used_[static_cast<std::size_t>(t.hi)] = true;
                undo_prims_.push_back(t.hi | (i << 16));
            }
        }
        return true;
    }

    void unplace(int i) {
        const auto& t = tuples_[static_cast<std::size_t>(i)];
        if (t.lo >= prim_count()) {
            if (--refcnt_[static_cast<std::size_t>(t.lo - prim_count())] == 0) ++unref_;
        }
        if (t.hi >= prim_count()) {
            if (--refcnt_[static_cast<std::size_t>(t.hi - prim_count())] == 0) ++unref_;
        }
        --unref_;  // the node itself leaves
        int added_cost = 1;
        if (cfg_.weighted) {
            while (!undo_prims_.empty() && (undo_prims_.back() >> 16) == i) {
                const int p = undo_prims_.back() & 0xffff;
                undo_prims_.pop_back();
                prim_used_[static_cast<std::size_t>(p)] = false;
                added_cost += cfg_.prims[static_cast<std::size_t>(p)].cost;
            }
        }
        cost_ -= added_cost;
    }

    void check_fit() {
        const std::size_t last = static_cast<std::size_t>(prim_count() + depth_ - 1);
        if (sig_[last] != cfg_.target) return;
        if (cfg_.weighted && cost_ != budget_) return;  // cheaper fits belong to exhausted levels
        level_fit fit(expand_tuples(cfg_, tuples_));
        if (cfg_.track_full) fit.full_sig = full_[last];
        out_.fits.push_back(std::move(fit));
        if (!cfg_.enumerate_all) stop_ = true;
    }

    void place(int i) {
        const int top = prim_count() + i;
        node_tuple t{};
        for (t.lo = 0; t.lo < top - 1 && !stop_; ++t.lo) {
            for (t.hi = t.lo + 1; t.hi < top && !stop_; ++t.hi) {
                for (int g = 0; g < 2 && !stop_; ++g) {
                    t.gate = static_cast<std::uint8_t>(g);
                    for (int pp = 0; pp < 4 && !stop_; ++pp) {
                        t.lp = static_cast<std::uint8_t>(pp >> 1);
                        t.rp = static_cast<std::uint8_t>(pp & 1);
                        if (!try_place(i, t)) continue;
                        if (i + 1 < depth_)
                            place(i + 1);
                        else
                            check_fit();
                        unplace(i);
                    }
                }
            }
        }
    }
};

// All admissible candidates for the first node, in canonical order.
inline std::vector<node_tuple> first_node_candidates(const search_config& cfg) {
    std::vector<node_tuple> out;
    const int p = static_cast<int>(cfg.prims.size());
    node_tuple t{};
    for (t.lo = 0; t.lo < p - 1; ++t.lo)
        for (t.hi = t.lo + 1; t.hi < p; ++t.hi)
            for (int g = 0; g < 2; ++g)
                for (int pp = 0; pp < 4; ++pp) {
                    t.gate = static_cast<std::uint8_t>(g);
                    t.lp = static_cast<std::uint8_t>(pp >> 1);
                    t.rp = static_cast<std::uint8_t>(pp & 1);
                    out.push_back(t);
                }
    return out;
}

// Zero-cost fits: constants, bare literals, bare zero-cost primitives.
inline std::vector<level_fit> degenerate_fits(const search_config& cfg) {
    std::vector<level_fit> fits;
    auto add = [&](std::uint64_t s, std::uint64_t f, circuit c) {
        if (s != cfg.target) return;
        level_fit fit(std::move(c));
        fit.full_sig = f;
        fits.push_back(std::move(fit));
    };
    add(0, 0, circuit::constant(cfg.n, false));
    add(cfg.mask, cfg.full_mask, circuit::constant(cfg.n, true));
    for (int j = 0; j < cfg.n; ++j) {
        const auto& p = cfg.prims[static_cast<std::size_t>(j)];
        add(p.sig, p.full_sig, circuit::literal(cfg.n, j, polarity::direct));
        add(~p.sig & cfg.mask, ~p.full_sig & cfg.full_mask, circuit::literal(cfg.n, j, polarity::negated));
    }
    for (std::size_t p = static_cast<std::size_t>(cfg.n); p < cfg.prims.size(); ++p)
        if (cfg.prims[p].cost == 0)
            add(cfg.prims[p].sig, cfg.prims[p].full_sig, cfg.prims[p].expansion);
    std::stable_sort(fits.begin(), fits.end(), [](const level_fit& a, const level_fit& b) {
        return canonical_less(a.witness, b.witness);
    });
    return fits;
}

// Bare costly primitives fitting at exactly this budget.
inline std::vector<level_fit> bare_primitive_fits(const search_config& cfg, int budget) {
    std::vector<level_fit> fits;
    for (std::size_t p = static_cast<std::size_t>(cfg.n); p < cfg.prims.size(); ++p) {
        if (cfg.prims[p].cost != budget || cfg.prims[p].sig != cfg.target) continue;
        level_fit fit(cfg.prims[p].expansion);
        fit.full_sig = cfg.prims[p].full_sig;
        fits.push_back(std::move(fit));
    }
    std::stable_sort(fits.begin(), fits.end(), [](const level_fit& a, const level_fit& b) {
        return canonical_less(a.witness, b.witness);
    });
    return fits;
}

// Searches one whole cost level across worker threads.  Chunks are the
// first-node candidates; merging in chunk order keeps the outcome
// independent of scheduling.
inline std::vector<level_fit> search_level(const search_config& cfg, int budget, int threads,
                                           synthesis_stats& stats) {
    std::vector<level_fit> collected = bare_primitive_fits(cfg, budget);
    if (!collected.empty() && !cfg.enumerate_all) return collected;

    const std::vector<node_tuple> firsts = first_node_candidates(cfg);
    if (firsts.empty()) return collected;

    // Unweighted searches place exactly `budget` nodes; weighted ones
    // must scan every node count that can reach the budget.
    const int depth_hi = budget;
    const int first_depth = cfg.weighted ? 1 : budget;

    std::vector<chunk_result> chunks(firsts.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> best_chunk{firsts.size()};
    std::atomic<bool> failed{false};
    std::exception_ptr eptr;
    std::mutex eptr_mutex;

    auto worker = [&]() {
        try {
            for (;;) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= firsts.size()) break;
                // Later chunks can only yield lexicographically larger
                // witnesses, but only when node count is fixed.
                if (!cfg.enumerate_all && !cfg.weighted && idx > best_chunk.load()) {
                    chunks[idx].skipped = true;
                    continue;
                }
                chunk_result& res = chunks[idx];
                for (int depth = first_depth; depth <= depth_hi; ++depth) {
                    level_searcher searcher(cfg, depth, budget, res);
                    searcher.run(firsts[idx]);
                    if (!cfg.enumerate_all && !res.fits.empty()) break;
                }
                if (!cfg.enumerate_all && !res.fits.empty()) {
                    std::size_t cur = best_chunk.load();
                    while (idx < cur && !best_chunk.compare_exchange_weak(cur, idx)) {
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(eptr_mutex);
            if (!eptr) eptr = std::current_exception();
            failed.store(true);
        }
    };

    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) std::rethrow_exception(eptr);

    for (auto& ch : chunks) {
        stats.examined += ch.examined;
        stats.pruned += ch.pruned;
        if (ch.skipped) continue;
        for (auto& f : ch.fits) collected.push_back(std::move(f));
    }
    return collected;
}

inline search_config make_config(const sample_set& sv, const std::vector<primitive>& extra,
                                 bool enumerate_all) {
    if (sv.empty() || !sv.valued()) throw contract_error("fitting requires a nonempty valued sample set");
    if (sv.size() > max_solver_samples)
        throw budget_error("solver supports at most " + std::to_string(max_solver_samples) + " samples");
    const int n = sv.dimension();

    search_config cfg;
    cfg.n = n;
    cfg.mask = sv.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << sv.size()) - 1;
    cfg.track_full = n <= 6;
    cfg.full_mask = cfg.track_full
                        ? (bit_vector::space_size(n) == 64 ? ~std::uint64_t{0}
                                                           : (std::uint64_t{1} << bit_vector::space_size(n)) - 1)
                        : 0;
    cfg.enumerate_all = enumerate_all;

    const auto& rows = sv.samples();
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (*rows[i].output) cfg.target |= std::uint64_t{1} << i;

    for (int j = 0; j < n; ++j) {
        primitive p;
        p.cost = 0;
        p.expansion = circuit::literal(n, j, polarity::direct);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].input.bit(j)) p.sig |= std::uint64_t{1} << i;
        if (cfg.track_full)
            for (std::uint32_t v = 0; v < bit_vector::space_size(n); ++v)
                if ((v >> j) & 1u) p.full_sig |= std::uint64_t{1} << v;
        cfg.prims.push_back(std::move(p));
    }

    // Library hygiene: constants never help, and among equal sample
    // behavior only the cheapest operand can appear in a least-cost fit.
    for (const auto& e : extra) {
        if (e.sig == 0 || e.sig == cfg.mask) continue;
        bool dominated = false;
        for (const auto& have : cfg.prims)
            if (have.sig == e.sig && have.cost <= e.cost) {
                dominated = true;
                break;
            }
        if (!dominated) cfg.prims.push_back(e);
    }
    std::stable_sort(cfg.prims.begin() + n, cfg.prims.end(), [](const primitive& a, const primitive& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return canonical_less(a.expansion, b.expansion);
    });
    for (const auto& p : cfg.prims)
        if (p.cost > 0) cfg.weighted = true;
    return cfg;
}

} // namespace detail

// Exact fitting extremum over an operand library.  Iterative deepening
// on total cost: levels below the answer are exhausted, which is the
// minimality certificate.
inline synthesis_result solve_min_with_library(const fit_problem& p, const std::vector<primitive>& library) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::search_config cfg = detail::make_config(p.samples, library, p.enumerate_all);
    if (p.enumerate_all && cfg.n > p.max_class_dimension)
        throw budget_error("function-class enumeration limited to " +
                           std::to_string(p.max_class_dimension) + " inputs");

    const int n = cfg.n;
    const int cap = p.d_cap.value_or(
        std::min<int>(n * static_cast<int>(p.samples.size()) - 1, 8));

    synthesis_result result;
    for (int budget = 0; budget <= cap; ++budget) {
        std::vector<detail::level_fit> fits =
            budget == 0 ? detail::degenerate_fits(cfg)
                        : detail::search_level(cfg, budget, p.threads, result.stats);
        if (fits.empty()) continue;

        result.d_min = budget;
        if (!p.enumerate_all) {
            circuit best = fits.front().witness;
            for (std::size_t i = 1; i < fits.size(); ++i)
                if (canonical_less(fits[i].witness, best)) best = fits[i].witness;
            result.witnesses.push_back(std::move(best));
        } else {
            std::map<std::uint64_t, circuit> by_class;
            for (auto& f : fits) {
                auto it = by_class.find(f.full_sig);
                if (it == by_class.end())
                    by_class.emplace(f.full_sig, std::move(f.witness));
                else if (canonical_less(f.witness, it->second))
                    it->second = std::move(f.witness);
            }
            for (auto& [sig, wit] : by_class) {
                result.function_classes.push_back(truth_table::from_u64(n, sig));
                result.witnesses.push_back(std::move(wit));
            }
        }
        result.stats.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return result;
    }
    throw budget_error("no fitting circuit within node ceiling " + std::to_string(cap), cap);
}

inline synthesis_result solve_min(const fit_problem& p) { return solve_min_with_library(p, {}); }

// The distinct full-domain behaviors among all minimal fitting circuits.
inline std::vector<truth_table> enumerate_min_functions(fit_problem p) {
    p.enumerate_all = true;
    return solve_min_with_library(p, {}).function_classes;
}

// DNF construction giving the guaranteed search ceiling d <= N*|S| - 1.
inline circuit upper_bound_circuit(const sample_set& sv) { return dnf_fitting_circuit(sv); }

} // namespace fitex
