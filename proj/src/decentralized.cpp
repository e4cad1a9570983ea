#include "costgreedy/decentralized.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace costgreedy {

DecentralizedNetwork::DecentralizedNetwork(const CostGraph& g, const CostModel& m,
                                           std::uint32_t buffer_capacity)
    : graph_(&g), model_(&m), capacity_(buffer_capacity), cats_(zone_count(g.size())),
      weighting_(this) {
    if (capacity_ < 1) throw std::invalid_argument("buffer capacity must be >= 1");
    const std::size_t cells = static_cast<std::size_t>(g.size()) * cats_;
    buffers_.assign(cells * capacity_, 0.0);
    sums_.assign(cells, 0.0);
    lens_.assign(cells, 0);
    heads_.assign(cells, 0);
    received_.assign(cells, 0);
    self_.assign(g.size(), 0);
}

void DecentralizedNetwork::push_sample(VertexId v, std::uint32_t cat, double value) {
    const std::size_t cell = static_cast<std::size_t>(v) * cats_ + cat;
    double* slots = buffers_.data() + cell * capacity_;
    const std::uint16_t head = heads_[cell];
    if (lens_[cell] == capacity_)
        sums_[cell] -= slots[head];  // evict oldest
    else
        lens_[cell] += 1;
    slots[head] = value;
    sums_[cell] += value;
    heads_[cell] = static_cast<std::uint16_t>((head + 1) % capacity_);
}

SearchResult DecentralizedNetwork::route_query(VertexId x, VertexId z,
                                               std::uint64_t query_seed) {
    if (x == z) throw std::invalid_argument("route_query: x == z");
    CostAssignment costs(*model_, query_seed);
    run_search(*graph_, costs, &weighting_, ForwardWeightedStepper{}, x, z, result_, scratch_);

    // Remaining costs are only known once the query completes; unwind the
    // stored path to record them.
    double remaining = result_.cost;
    for (std::uint32_t j = 0; j < result_.steps; ++j) {
        const VertexId v = result_.path[j];
        const std::uint32_t cat = zone_of(graph_->distance(v, z));
        push_sample(v, cat, remaining);
        received_[static_cast<std::size_t>(v) * cats_ + cat] += 1;
        remaining -= result_.step_costs[j];
    }
    self_[x] += 1;
    return result_;
}

void DecentralizedNetwork::reset_check() {
    for (VertexId v = 0; v < graph_->size(); ++v) {
        for (std::uint32_t cat = 0; cat < cats_; ++cat) {
            const std::size_t cell = static_cast<std::size_t>(v) * cats_ + cat;
            if (4ull * received_[cell] < self_[v]) {
                double* slots = buffers_.data() + cell * capacity_;
                for (std::uint32_t j = 0; j < capacity_; ++j) slots[j] = 0.0;
                lens_[cell] = static_cast<std::uint16_t>(capacity_);
                heads_[cell] = 0;
                sums_[cell] = 0.0;
            }
            received_[cell] = 0;
        }
        self_[v] = 0;
    }
}

void DecentralizedNetwork::snapshot_csv(std::ostream& out) const {
    out << "vertex,category,buffer_mean,buffer_len,received,self_count\n";
    out.precision(17);
    for (VertexId v = 0; v < graph_->size(); ++v) {
        for (std::uint32_t cat = 0; cat < cats_; ++cat) {
            const std::size_t cell = static_cast<std::size_t>(v) * cats_ + cat;
            out << v << ',' << cat << ',' << node_weight(v, cat) << ',' << lens_[cell] << ','
                << received_[cell] << ',' << self_[v] << '\n';
        }
    }
}

std::vector<RoundDiagnostics> run_decentralized_experiment(DecentralizedNetwork& net,
                                                           std::uint32_t first_round,
                                                           std::uint32_t last_round,
                                                           std::uint64_t queries_per_round,
                                                           std::uint64_t seed) {
    const std::uint32_t n = net.graph().size();
    std::vector<RoundDiagnostics> diagnostics;
    diagnostics.reserve(last_round - first_round + 1);
    for (std::uint32_t r = first_round; r <= last_round; ++r) {
        double cost_sum = 0.0, cost_sq = 0.0, steps_sum = 0.0, steps_sq = 0.0;
        for (std::uint64_t i = 0; i < queries_per_round; ++i) {
            SplitMix64 pair_rng(derive_seed(seed, stream::kTrainPairs, r, i));
            const auto x = static_cast<VertexId>(pair_rng.below(n));
            const auto zr = static_cast<VertexId>(pair_rng.below(n - 1));
            const VertexId z = zr + (zr >= x ? 1 : 0);
            const SearchResult& res =
                net.route_query(x, z, derive_seed(seed, stream::kTrainCosts, r, i));
            cost_sum += res.cost;
            cost_sq += res.cost * res.cost;
            steps_sum += res.steps;
            steps_sq += static_cast<double>(res.steps) * res.steps;
        }
        net.reset_check();

        RoundDiagnostics diag;
        diag.round = r;
        diag.queries = queries_per_round;
        const auto q = static_cast<double>(queries_per_round);
        diag.mean_cost = cost_sum / q;
        diag.mean_steps = steps_sum / q;
        if (queries_per_round > 1) {
            const double var_c =
                std::max(0.0, (cost_sq - diag.mean_cost * diag.mean_cost * q) / (q - 1));
            const double var_s =
                std::max(0.0, (steps_sq - diag.mean_steps * diag.mean_steps * q) / (q - 1));
            diag.ci95_cost = 1.96 * std::sqrt(var_c / q);
            diag.ci95_steps = 1.96 * std::sqrt(var_s / q);
        }
        diagnostics.push_back(diag);
    }
    return diagnostics;
}

std::vector<RoundDiagnostics> run_decentralized_experiment(DecentralizedNetwork& net,
                                                           std::uint32_t rounds,
                                                           std::uint64_t queries_per_round,
                                                           std::uint64_t seed) {
    return run_decentralized_experiment(net, 1, rounds, queries_per_round, seed);
}

}  // namespace costgreedy
