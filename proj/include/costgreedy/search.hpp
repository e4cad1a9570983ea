#pragma once
// The search-algorithm family: greedy, forward weighted greedy (cost-greedy
// once the weights solve the optimality equation), lowest-cost-forward, and
// the Simsek-Jensen expected-value baseline. Every stepper sees only a
// LocalView of the current vertex: its out-edges, their realized costs, the
// advertised weights of its neighbors, and model parameters. Tie-breaking is
// fully deterministic everywhere.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "costgreedy/costs.hpp"
#include "costgreedy/topology.hpp"

namespace costgreedy {

// Weight lookup w_z(y) >= 0, with w_z(z) = 0.
class Weighting {
public:
    virtual ~Weighting() = default;
    virtual double weight(const CostGraph& g, VertexId y, VertexId z) const = 0;
};

class ZeroWeighting final : public Weighting {
public:
    double weight(const CostGraph&, VertexId, VertexId) const override { return 0.0; }
};

// What a decentralized stepper may measure at the current vertex x: which
// out-edges x has, their realized costs, neighbor weights/degrees, and the
// distances of x and its neighbors to the destination. Nothing else.
class LocalView {
public:
    LocalView(const CostGraph& g, VertexId x, VertexId z, std::span<const double> edge_costs,
              const Weighting* w)
        : g_(g), x_(x), z_(z), costs_(edge_costs), w_(w),
          targets_(g.out_targets(x)), first_edge_(g.first_edge(x)),
          dist_here_(g.distance(x, z)) {}

    VertexId here() const { return x_; }
    VertexId dest() const { return z_; }
    std::uint32_t dist_here() const { return dist_here_; }
    std::uint32_t degree() const { return static_cast<std::uint32_t>(targets_.size()); }

    VertexId target(std::uint32_t i) const { return targets_[i]; }
    EdgeId edge(std::uint32_t i) const { return first_edge_ + i; }
    std::uint32_t dist(std::uint32_t i) const { return g_.distance(targets_[i], z_); }
    double cost(std::uint32_t i) const { return costs_[i]; }
    double neighbor_weight(std::uint32_t i) const {
        return w_ ? w_->weight(g_, targets_[i], z_) : 0.0;
    }
    std::uint32_t neighbor_shortcuts(std::uint32_t i) const {
        return g_.shortcut_count(targets_[i]);
    }

private:
    const CostGraph& g_;
    VertexId x_, z_;
    std::span<const double> costs_;
    const Weighting* w_;
    std::span<const VertexId> targets_;
    EdgeId first_edge_;
    std::uint32_t dist_here_;
};

struct GreedyStepper {};
struct ForwardWeightedStepper {};
struct SjStepper {
    double alpha = 1.0;
    double hn = 1.0;
    static SjStepper for_graph(const CostGraph& g) {
        return SjStepper{g.alpha(), g.harmonic_normalizer()};
    }
};
using Stepper = std::variant<GreedyStepper, ForwardWeightedStepper, SjStepper>;

// Each returns the local out-edge index of the chosen step.
std::uint32_t greedy_step(const LocalView& v);
std::uint32_t forward_weighted_step(const LocalView& v);
std::uint32_t sj_step(const LocalView& v, double alpha, double hn);
std::uint32_t step(const Stepper& s, const LocalView& v);

// Convenience forms for single-step inspection.
VertexId greedy_step(const CostGraph& g, VertexId x, VertexId z);
VertexId forward_weighted_step(const CostGraph& g, const CostAssignment& costs,
                               const Weighting& w, VertexId x, VertexId z);
VertexId sj_step(const CostGraph& g, VertexId x, VertexId z);

// The Simsek-Jensen hit estimate P(z in N(y)) used by sj_step: 1 for
// dist(y,z) <= 1, else 1 - (1 - d^-alpha / hn)^shortcuts.
double sj_hit_probability(std::uint32_t dist_to_dest, std::uint32_t shortcuts, double alpha,
                          double hn);

struct SearchResult {
    std::vector<VertexId> path;      // path.front() = x, path.back() = z on success
    std::vector<double> step_costs;  // realized cost of each hop taken
    std::uint32_t steps = 0;         // S^z
    double cost = 0.0;               // T^z
    double min_tally = 0.0;          // R^z: sum of min out-edge cost at each vertex left
    bool succeeded = false;

    void reset(VertexId start) {
        path.assign(1, start);
        step_costs.clear();
        steps = 0;
        cost = 0.0;
        min_tally = 0.0;
        succeeded = false;
    }
};

// Reusable per-thread scratch so the query loop does not allocate.
struct SearchScratch {
    std::vector<double> edge_costs;
};

// Iterates the stepper from x until z. Aborts with succeeded=false if a step
// ever fails to decrease the distance (a stepper bug, impossible for the
// steppers above on a ring base). Guaranteed <= d(x,z) steps otherwise.
void run_search(const CostGraph& g, const CostAssignment& costs, const Weighting* w,
                const Stepper& stepper, VertexId x, VertexId z, SearchResult& out,
                SearchScratch& scratch);
SearchResult run_search(const CostGraph& g, const CostAssignment& costs, const Weighting* w,
                        const Stepper& stepper, VertexId x, VertexId z);

enum class StepperKind { Greedy, CostGreedy, LowestCost, Sj };

StepperKind parse_stepper(const std::string& name);  // greedy|cost-greedy|lowest-cost|sj
std::string stepper_name(StepperKind kind);
// The SJ method estimates step counts; it is only defined for unit costs.
void validate_stepper(StepperKind kind, const CostModel& model);
Stepper make_stepper(StepperKind kind, const CostGraph& g);

// Summary of a batch of queries between uniform random ordered pairs with
// frozen weights. Pair and cost draws are pure functions of (seed, query
// index), so results do not depend on how the batch is split over workers
// aside from floating-point merge order (merged in fixed worker order).
struct BatchStats {
    std::uint64_t queries = 0;
    double mean_cost = 0.0, ci95_cost = 0.0;
    double mean_steps = 0.0, ci95_steps = 0.0;
    double mean_min_tally = 0.0;
    double mean_log_dist = 0.0;  // mean ln d(x,z) over the sampled pairs
    // raw sums for derived checks (Wald): sum of min_tally, steps, and their
    // squares/cross term
    double sum_min_tally = 0.0, sum_steps = 0.0;
    double sum_min_tally_sq = 0.0, sum_steps_sq = 0.0, sum_cross = 0.0;
};

BatchStats evaluate_batch(const CostGraph& g, const CostModel& m, const Weighting* w,
                          const Stepper& stepper, std::uint64_t seed, std::uint64_t queries,
                          std::uint32_t workers = 1);

}  // namespace costgreedy
