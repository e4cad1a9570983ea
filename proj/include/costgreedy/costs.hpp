#pragma once
// Edge-cost distributions and per-query i.i.d. realizations. Costs attach to
// edge ids, so parallel edges draw independent values; the realization of a
// query is a pure function of (query seed, edge id) and is recomputed on
// demand rather than materialized per query.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "costgreedy/rng.hpp"
#include "costgreedy/topology.hpp"

namespace costgreedy {

enum class CostLaw { Constant, Exponential, TwoPoint, Table };

class CostModel {
public:
    static CostModel constant(double c);
    static CostModel exponential(double rate);
    static CostModel two_point();  // 2 with probability 1/2, else 0
    static CostModel table(std::vector<double> values, std::vector<double> probs);

    // "constant:1" | "exp:1" | "twopoint" | "table:v1,p1;v2,p2"
    static CostModel parse(const std::string& text);
    std::string to_string() const;

    CostLaw law() const { return law_; }
    double mean() const;
    // Exact E[min of k i.i.d. draws]. Closed form for every supported law.
    double expected_min_of_k(std::uint32_t k) const;

    bool discrete() const { return law_ != CostLaw::Exponential; }
    bool unit_steps() const { return law_ == CostLaw::Constant; }
    // Finite support in ascending order (discrete laws only).
    std::span<const double> support() const { return values_; }
    std::span<const double> probs() const { return probs_; }

    double sample(SplitMix64& rng) const;
    // Cost of edge e in the query keyed by cost_seed. Pure function.
    double sample_at(std::uint64_t cost_seed, EdgeId e) const {
        SplitMix64 rng(derive_seed(cost_seed, e));
        return sample(rng);
    }

private:
    CostModel() = default;
    CostLaw law_ = CostLaw::Constant;
    double param_ = 1.0;  // c for Constant, rate for Exponential
    std::vector<double> values_;
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

// One query's realized costs. Fresh per query (distinct query seeds give
// independent assignments, identical seeds identical ones).
class CostAssignment {
public:
    CostAssignment(const CostModel& model, std::uint64_t query_seed)
        : model_(&model), seed_(derive_seed(query_seed, stream::kCosts)) {}

    double operator()(EdgeId e) const { return model_->sample_at(seed_, e); }

    // Full per-edge table, for tests and small exact computations.
    std::vector<double> materialize(std::size_t edge_count) const;

private:
    const CostModel* model_;
    std::uint64_t seed_;
};

inline CostAssignment sample_costs(const CostGraph&, const CostModel& m,
                                   std::uint64_t query_seed) {
    return CostAssignment(m, query_seed);
}

}  // namespace costgreedy
