#pragma once
// Fully decentralized variant: each vertex keeps its own compressed weight
// vector, computed as the mean of a FIFO buffer of the last m remaining
// costs it observed per distance category, plus traffic counters driving the
// starvation-reset heuristic. Routing at x reads only x's out-edge costs and
// the advertised vectors of its neighbors.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "costgreedy/costs.hpp"
#include "costgreedy/search.hpp"
#include "costgreedy/weights.hpp"

namespace costgreedy {

class DecentralizedNetwork {
public:
    // One fixed graph realization; only costs are redrawn per query.
    DecentralizedNetwork(const CostGraph& g, const CostModel& m,
                         std::uint32_t buffer_capacity = 20);

    const CostGraph& graph() const { return *graph_; }
    const CostModel& model() const { return *model_; }
    std::uint32_t categories() const { return cats_; }
    std::uint32_t buffer_capacity() const { return capacity_; }

    // Mean of the FIFO buffer for (vertex, category); 0 when empty.
    double node_weight(VertexId v, std::uint32_t cat) const {
        const std::size_t cell = static_cast<std::size_t>(v) * cats_ + cat;
        return lens_[cell] ? sums_[cell] / lens_[cell] : 0.0;
    }
    std::uint32_t buffer_len(VertexId v, std::uint32_t cat) const {
        return lens_[static_cast<std::size_t>(v) * cats_ + cat];
    }

    // Read-only weighting view over the node states (for frozen evaluation
    // and for the router itself).
    const Weighting& weighting() const { return weighting_; }

    // Route x -> z, then unwind the path: every visited vertex pushes its
    // remaining realized cost into the matching category buffer and bumps
    // that category's received counter; x bumps its self-initiated counter.
    SearchResult route_query(VertexId x, VertexId z, std::uint64_t query_seed);

    // End-of-interval starvation check: any category that received fewer
    // than a quarter of the queries the vertex initiated gets its buffer set
    // to capacity-many zeros (making the vertex maximally attractive for
    // that category). All interval counters restart from zero.
    void reset_check();

    // vertex,category,buffer_mean,buffer_len,received,self_count
    void snapshot_csv(std::ostream& out) const;

private:
    class StateWeighting final : public Weighting {
    public:
        explicit StateWeighting(const DecentralizedNetwork* net) : net_(net) {}
        double weight(const CostGraph& g, VertexId y, VertexId z) const override {
            const std::uint32_t d = g.distance(y, z);
            return d == 0 ? 0.0 : net_->node_weight(y, zone_of(d));
        }

    private:
        const DecentralizedNetwork* net_;
    };

    void push_sample(VertexId v, std::uint32_t cat, double value);

    const CostGraph* graph_;
    const CostModel* model_;
    std::uint32_t capacity_;
    std::uint32_t cats_;
    std::vector<double> buffers_;        // n * cats * capacity
    std::vector<double> sums_;           // n * cats
    std::vector<std::uint16_t> lens_;    // n * cats
    std::vector<std::uint16_t> heads_;   // n * cats
    std::vector<std::uint32_t> received_;  // n * cats, current interval
    std::vector<std::uint32_t> self_;      // n, current interval
    StateWeighting weighting_;
    SearchResult result_;
    SearchScratch scratch_;
};

// Sequential query stream between uniform random ordered pairs; reset_check
// at every round boundary; one diagnostics row per round. The [first, last]
// form continues an earlier run's stream, so splitting a schedule at a round
// boundary changes nothing.
std::vector<RoundDiagnostics> run_decentralized_experiment(DecentralizedNetwork& net,
                                                           std::uint32_t first_round,
                                                           std::uint32_t last_round,
                                                           std::uint64_t queries_per_round,
                                                           std::uint64_t seed);
std::vector<RoundDiagnostics> run_decentralized_experiment(DecentralizedNetwork& net,
                                                           std::uint32_t rounds,
                                                           std::uint64_t queries_per_round,
                                                           std::uint64_t seed);

}  // namespace costgreedy
