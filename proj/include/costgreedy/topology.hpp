#pragma once
// Edge-independent random graphs: a directed ring of n vertices augmented
// with power-law shortcuts (P(x ~> y) proportional to d(x,y)^-alpha). The
// directed arc distance is adapted for search: the ring successor edge
// guarantees a strictly closer out-neighbor for every (x, z), x != z.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "costgreedy/rng.hpp"

namespace costgreedy {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

// Directed arc distance (z - x) mod n. Zero iff x == z.
inline std::uint32_t ring_distance(VertexId x, VertexId z, std::uint32_t n) {
    return z >= x ? z - x : n - (x - z);
}

enum class DegreeLaw {
    Constant,    // every vertex gets `count` shortcuts
    Log2OfN,     // constant round(log2 n), resolved at generation time
    TwoType,     // floor(frac_a * n) vertices get count_a, the rest count_b
    ParetoTail   // floor(Pareto(tail_exponent, min 1)), capped at n-1
};

struct DegreeSpec {
    DegreeLaw law = DegreeLaw::Constant;
    std::uint32_t count = 0;
    std::uint32_t count_a = 0;
    std::uint32_t count_b = 0;
    double frac_a = 0.0;
    double tail_exponent = 0.0;

    static DegreeSpec constant(std::uint32_t q);
    static DegreeSpec log2_of_n();
    static DegreeSpec two_type(double frac_a, std::uint32_t count_a, std::uint32_t count_b);
    static DegreeSpec pareto(double tail_exponent);

    // "constant:3" | "log2" | "twotype:0.1,55,5" | "pareto:2"
    static DegreeSpec parse(const std::string& text);
    std::string to_string() const;
};

struct GraphSpec {
    std::uint32_t n = 0;
    double alpha = 1.0;
    DegreeSpec degrees;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

class CostGraph {
public:
    CostGraph() = default;
    CostGraph(std::uint32_t n, double alpha, std::uint64_t seed,
              std::vector<std::uint32_t> offsets, std::vector<VertexId> targets);

    std::uint32_t size() const { return n_; }
    double alpha() const { return alpha_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t edge_count() const { return targets_.size(); }

    std::uint32_t out_degree(VertexId x) const { return offsets_[x + 1] - offsets_[x]; }
    EdgeId first_edge(VertexId x) const { return offsets_[x]; }
    VertexId edge_target(EdgeId e) const { return targets_[e]; }
    // Ring successor edge first, then shortcuts in draw order.
    std::span<const VertexId> out_targets(VertexId x) const {
        return {targets_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
    }
    std::uint32_t shortcut_count(VertexId x) const { return out_degree(x) - 1; }

    std::uint32_t distance(VertexId x, VertexId z) const { return ring_distance(x, z, n_); }

    // Normalizer h_n = sum_{d=1}^{n-1} d^-alpha of the shortcut law.
    double harmonic_normalizer() const;

private:
    std::uint32_t n_ = 0;
    double alpha_ = 0.0;
    std::uint64_t seed_ = 0;
    std::vector<std::uint32_t> offsets_;  // n+1 entries
    std::vector<VertexId> targets_;       // edge id = index
};

// P(shortcut of x lands at distance d), d = 1..n-1; entry [d-1].
// Distance-indexed because the law is translation invariant: the target at
// distance d from x is (x + d) mod n.
std::vector<double> shortcut_distance_probs(std::uint32_t n, double alpha);

// Deterministic in spec.seed; shortcut destinations for distinct source
// vertices come from independent derived streams.
CostGraph generate_graph(const GraphSpec& spec);

// Explicit construction: ring edges plus the given per-vertex shortcut
// target lists. Used by tests and the tiny oracle instances.
CostGraph build_graph(std::uint32_t n, double alpha, std::uint64_t seed,
                      const std::vector<std::vector<VertexId>>& shortcuts);

// Out-edges of x whose target is strictly closer to z. Never empty for
// x != z (the ring successor qualifies). Throws on x == z.
std::vector<std::pair<EdgeId, VertexId>> forward_neighbors(const CostGraph& g, VertexId x,
                                                           VertexId z);

// Line-oriented text format: header "n alpha seed", then per vertex
// "id: succ shortcut...". Round-trips exactly.
void save_graph(const CostGraph& g, std::ostream& out);
CostGraph load_graph(std::istream& in);
void save_graph_file(const CostGraph& g, const std::string& path);
CostGraph load_graph_file(const std::string& path);

}  // namespace costgreedy
