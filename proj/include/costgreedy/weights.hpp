#pragma once
// Computing the cost-greedy weighting: exactly, by the rank-induction dynamic
// program for finite-support cost models on small graphs, and empirically, by
// rounds of simulated queries whose per-vertex remaining costs are pooled
// into a translation-invariant, log-compressed distance vector (optionally
// conditioned on a degree class).

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "costgreedy/costs.hpp"
#include "costgreedy/search.hpp"
#include "costgreedy/topology.hpp"

namespace costgreedy {

// ---------------------------------------------------------------------------
// Exact mode: full per-vertex table for a fixed destination.

struct FullWeightTable {
    VertexId dest = 0;
    std::vector<double> values;  // one per vertex; values[dest] == 0

    static FullWeightTable fill(std::uint32_t n, VertexId dest, double value);
};

class TableWeighting final : public Weighting {
public:
    explicit TableWeighting(const FullWeightTable& table) : table_(&table) {}
    double weight(const CostGraph&, VertexId y, VertexId) const override {
        return table_->values[y];
    }

private:
    const FullWeightTable* table_;
};

// One pass of Eq.-style value iteration: w'(x) = E[T^z(x; F_w)], computed by
// enumerating the joint cost tuple on x's forward edges, applying the
// forward-weighted decision under the INPUT w, and pricing the continuation
// with already-finalized w' values of closer vertices (processing in rank
// order makes a single pass exact). Throws on continuous models and when the
// tuple enumeration would exceed `max_terms`.
FullWeightTable exact_iterate(const CostGraph& g, const CostModel& m, const FullWeightTable& w,
                              VertexId z, std::uint64_t max_terms = 10'000'000);

struct ExactFixpointResult {
    FullWeightTable weights;
    std::uint32_t iterations = 0;         // first k with w_k == w_{k+1}
    std::vector<FullWeightTable> trace;   // w_0 .. w_iterations when requested
};

// Iterates exact_iterate from w0 (all-zero when null) until the vector stops
// changing; Theorem-style convergence guarantees at most n-1 iterations.
ExactFixpointResult exact_fixpoint(const CostGraph& g, const CostModel& m, VertexId z,
                                   const FullWeightTable* w0 = nullptr,
                                   bool keep_trace = false);

// ---------------------------------------------------------------------------
// Compressed distance-indexed vectors: zones [2^i, 2^{i+1}) with kz recorded
// positions per zone; lookup is piecewise constant at the nearest recorded
// position at or below d, and 0 at d = 0.

inline std::uint32_t zone_of(std::uint32_t d) { return std::bit_width(d) - 1; }
inline std::uint32_t zone_count(std::uint32_t n) { return std::bit_width(n - 1); }

struct ZonedWeights {
    std::uint32_t n = 0;
    std::uint32_t kz = 1;
    std::vector<std::uint32_t> positions;  // zone_count * kz entries
    std::vector<double> values;

    static ZonedWeights zeros(std::uint32_t n, std::uint32_t kz);

    std::uint32_t entries() const { return static_cast<std::uint32_t>(values.size()); }
    std::uint32_t entry_of(std::uint32_t d) const;  // d >= 1

    double lookup(std::uint32_t d) const {
        return d == 0 ? 0.0 : values[entry_of(d)];
    }
};

// Compress a full distance-indexed vector (index d, size n, entry 0 ignored).
// kz == 1 records the zone mean; kz > 1 samples values at kz evenly spaced
// positions per zone (exact at the recorded positions).
ZonedWeights compress(const std::vector<double>& full, std::uint32_t kz);

void save_weights_csv(const ZonedWeights& w, std::ostream& out);  // zone,position,value
ZonedWeights load_weights_csv(std::istream& in, std::uint32_t n, std::uint32_t kz);

// ---------------------------------------------------------------------------
// Empirical estimation.

inline std::uint32_t degree_class(std::uint32_t out_degree) {
    return std::bit_width(out_degree) - 1;
}

// Translation-invariant weighting: one zoned vector, or one per degree class
// of the neighbor being priced.
class DistanceWeighting final : public Weighting {
public:
    DistanceWeighting() = default;
    explicit DistanceWeighting(ZonedWeights zw);
    DistanceWeighting(std::vector<ZonedWeights> per_class);

    static DistanceWeighting zeros(std::uint32_t n, std::uint32_t kz, bool degree_conditioned);

    double weight(const CostGraph& g, VertexId y, VertexId z) const override {
        const std::uint32_t d = g.distance(y, z);
        if (d == 0) return 0.0;
        if (per_class_.size() == 1) return per_class_[0].lookup(d);
        const std::uint32_t cls = degree_class(g.out_degree(y));
        return per_class_[cls < per_class_.size() ? cls : per_class_.size() - 1].lookup(d);
    }

    bool degree_conditioned() const { return per_class_.size() > 1; }
    const ZonedWeights& vector_for_class(std::uint32_t cls = 0) const { return per_class_[cls]; }
    std::uint32_t class_count() const { return static_cast<std::uint32_t>(per_class_.size()); }

private:
    std::vector<ZonedWeights> per_class_;
};

struct EstimationConfig {
    std::uint64_t queries_per_round = 0;  // 0 means 20 * n
    std::uint32_t rounds = 10;
    std::uint32_t kz = 1;
    bool degree_conditioned = false;
    std::uint32_t workers = 1;

    std::uint64_t resolved_queries(std::uint32_t n) const {
        return queries_per_round ? queries_per_round : 20ull * n;
    }
    void validate() const;
};

struct RoundDiagnostics {
    std::uint32_t round = 0;
    double mean_cost = 0.0;
    double mean_steps = 0.0;
    double ci95_cost = 0.0;
    double ci95_steps = 0.0;
    std::uint64_t queries = 0;
};

// One round of cfg.resolved_queries(n) searches between uniform random
// ordered pairs under the frozen weighting w; every visited vertex records
// its remaining realized cost into the category of its distance (and degree
// class when enabled). Categories with no samples inherit w's value.
DistanceWeighting empirical_round(const CostGraph& g, const CostModel& m,
                                  const DistanceWeighting& w, const EstimationConfig& cfg,
                                  std::uint64_t seed, std::uint32_t round_index,
                                  RoundDiagnostics* diag = nullptr);

struct EstimationResult {
    DistanceWeighting weighting;
    std::vector<RoundDiagnostics> rounds;
};

// Rounds of empirical_round starting from w0 == 0, each round's output
// becoming the next round's weighting.
EstimationResult iterate_to_fixpoint(const CostGraph& g, const CostModel& m,
                                     const EstimationConfig& cfg, std::uint64_t seed);

void save_diagnostics_csv(const std::vector<RoundDiagnostics>& rounds, std::ostream& out);

}  // namespace costgreedy
