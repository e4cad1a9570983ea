#include "costgreedy/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace costgreedy {

std::uint32_t greedy_step(const LocalView& v) {
    // argmin d(y, z); ties to lower vertex id, then lower edge id (scan order).
    std::uint32_t best = 0;
    bool found = false;
    std::uint32_t best_dist = 0;
    VertexId best_target = 0;
    for (std::uint32_t i = 0; i < v.degree(); ++i) {
        const std::uint32_t d = v.dist(i);
        if (d >= v.dist_here()) continue;  // forward guard
        const VertexId y = v.target(i);
        if (!found || d < best_dist || (d == best_dist && y < best_target)) {
            best = i;
            best_dist = d;
            best_target = y;
            found = true;
        }
    }
    return best;
}

std::uint32_t forward_weighted_step(const LocalView& v) {
    // argmin C(x,y) + w(y) over forward edges; ties to smaller d(y,z), then
    // lower vertex id, then lower edge id.
    std::uint32_t best = 0;
    bool found = false;
    double best_score = 0.0;
    std::uint32_t best_dist = 0;
    VertexId best_target = 0;
    for (std::uint32_t i = 0; i < v.degree(); ++i) {
        const std::uint32_t d = v.dist(i);
        if (d >= v.dist_here()) continue;
        const double score = v.cost(i) + v.neighbor_weight(i);
        const VertexId y = v.target(i);
        if (!found || score < best_score ||
            (score == best_score &&
             (d < best_dist || (d == best_dist && y < best_target)))) {
            best = i;
            best_score = score;
            best_dist = d;
            best_target = y;
            found = true;
        }
    }
    return best;
}

double sj_hit_probability(std::uint32_t dist_to_dest, std::uint32_t shortcuts, double alpha,
                          double hn) {
    if (dist_to_dest <= 1) return 1.0;  // the ring successor is z (or y == z)
    const double per_edge = std::pow(static_cast<double>(dist_to_dest), -alpha) / hn;
    return 1.0 - std::pow(1.0 - per_edge, static_cast<double>(shortcuts));
}

std::uint32_t sj_step(const LocalView& v, double alpha, double hn) {
    // argmax P(z in N(y)) over forward edges; ties to smaller d(y,z), then
    // lower vertex id, then lower edge id.
    std::uint32_t best = 0;
    bool found = false;
    double best_p = 0.0;
    std::uint32_t best_dist = 0;
    VertexId best_target = 0;
    for (std::uint32_t i = 0; i < v.degree(); ++i) {
        const std::uint32_t d = v.dist(i);
        if (d >= v.dist_here()) continue;
        const double p = sj_hit_probability(d, v.neighbor_shortcuts(i), alpha, hn);
        const VertexId y = v.target(i);
        if (!found || p > best_p ||
            (p == best_p && (d < best_dist || (d == best_dist && y < best_target)))) {
            best = i;
            best_p = p;
            best_dist = d;
            best_target = y;
            found = true;
        }
    }
    return best;
}

std::uint32_t step(const Stepper& s, const LocalView& v) {
    if (std::holds_alternative<GreedyStepper>(s)) return greedy_step(v);
    if (std::holds_alternative<ForwardWeightedStepper>(s)) return forward_weighted_step(v);
    const auto& sj = std::get<SjStepper>(s);
    return sj_step(v, sj.alpha, sj.hn);
}

namespace {

void fill_edge_costs(const CostGraph& g, const CostAssignment& costs, VertexId x,
                     std::vector<double>& buf) {
    const std::uint32_t deg = g.out_degree(x);
    const EdgeId base = g.first_edge(x);
    buf.resize(deg);
    for (std::uint32_t i = 0; i < deg; ++i) buf[i] = costs(base + i);
}

}  // namespace

VertexId greedy_step(const CostGraph& g, VertexId x, VertexId z) {
    if (x == z) throw std::invalid_argument("greedy_step: x == z");
    std::vector<double> none(g.out_degree(x), 0.0);
    LocalView v(g, x, z, none, nullptr);
    return v.target(greedy_step(v));
}

VertexId forward_weighted_step(const CostGraph& g, const CostAssignment& costs,
                               const Weighting& w, VertexId x, VertexId z) {
    if (x == z) throw std::invalid_argument("forward_weighted_step: x == z");
    std::vector<double> buf;
    fill_edge_costs(g, costs, x, buf);
    LocalView v(g, x, z, buf, &w);
    return v.target(forward_weighted_step(v));
}

VertexId sj_step(const CostGraph& g, VertexId x, VertexId z) {
    if (x == z) throw std::invalid_argument("sj_step: x == z");
    std::vector<double> none(g.out_degree(x), 0.0);
    LocalView v(g, x, z, none, nullptr);
    const SjStepper s = SjStepper::for_graph(g);
    return v.target(sj_step(v, s.alpha, s.hn));
}

void run_search(const CostGraph& g, const CostAssignment& costs, const Weighting* w,
                const Stepper& stepper, VertexId x, VertexId z, SearchResult& out,
                SearchScratch& scratch) {
    out.reset(x);
    VertexId cur = x;
    const std::uint32_t bound = g.distance(x, z);
    while (cur != z) {
        if (out.steps >= bound) {
            out.succeeded = false;  // stepper failed to make forward progress
            return;
        }
        fill_edge_costs(g, costs, cur, scratch.edge_costs);
        LocalView view(g, cur, z, scratch.edge_costs, w);
        const std::uint32_t idx = step(stepper, view);
        const VertexId next = view.target(idx);
        if (g.distance(next, z) >= g.distance(cur, z)) {
            out.succeeded = false;
            return;
        }
        double min_cost = scratch.edge_costs[0];
        for (double c : scratch.edge_costs)
            if (c < min_cost) min_cost = c;
        out.min_tally += min_cost;
        out.cost += view.cost(idx);
        out.step_costs.push_back(view.cost(idx));
        out.path.push_back(next);
        ++out.steps;
        cur = next;
    }
    out.succeeded = true;
}

SearchResult run_search(const CostGraph& g, const CostAssignment& costs, const Weighting* w,
                        const Stepper& stepper, VertexId x, VertexId z) {
    SearchResult result;
    SearchScratch scratch;
    run_search(g, costs, w, stepper, x, z, result, scratch);
    return result;
}

StepperKind parse_stepper(const std::string& name) {
    if (name == "greedy") return StepperKind::Greedy;
    if (name == "cost-greedy") return StepperKind::CostGreedy;
    if (name == "lowest-cost") return StepperKind::LowestCost;
    if (name == "sj") return StepperKind::Sj;
    throw std::invalid_argument("unknown stepper: " + name);
}

std::string stepper_name(StepperKind kind) {
    switch (kind) {
        case StepperKind::Greedy: return "greedy";
        case StepperKind::CostGreedy: return "cost-greedy";
        case StepperKind::LowestCost: return "lowest-cost";
        case StepperKind::Sj: return "sj";
    }
    return "";
}

void validate_stepper(StepperKind kind, const CostModel& model) {
    if (kind == StepperKind::Sj && !model.unit_steps())
        throw std::invalid_argument("sj stepper is defined for step counts; "
                                    "it requires a constant cost model");
}

Stepper make_stepper(StepperKind kind, const CostGraph& g) {
    switch (kind) {
        case StepperKind::Greedy: return GreedyStepper{};
        case StepperKind::CostGreedy:
        case StepperKind::LowestCost: return ForwardWeightedStepper{};
        case StepperKind::Sj: return SjStepper::for_graph(g);
    }
    return GreedyStepper{};
}

namespace {

struct BatchSums {
    double cost = 0.0, cost_sq = 0.0;
    double steps = 0.0, steps_sq = 0.0;
    double min_tally = 0.0, min_tally_sq = 0.0, cross = 0.0;
    double log_dist = 0.0;

    void merge(const BatchSums& o) {
        cost += o.cost;
        cost_sq += o.cost_sq;
        steps += o.steps;
        steps_sq += o.steps_sq;
        min_tally += o.min_tally;
        min_tally_sq += o.min_tally_sq;
        cross += o.cross;
        log_dist += o.log_dist;
    }
};

void evaluate_block(const CostGraph& g, const CostModel& m, const Weighting* w,
                    const Stepper& stepper, std::uint64_t seed, std::uint64_t lo,
                    std::uint64_t hi, BatchSums& sums) {
    const std::uint32_t n = g.size();
    SearchResult result;
    SearchScratch scratch;
    for (std::uint64_t i = lo; i < hi; ++i) {
        SplitMix64 pair_rng(derive_seed(seed, stream::kEvalPairs, i));
        const auto x = static_cast<VertexId>(pair_rng.below(n));
        const auto zr = static_cast<VertexId>(pair_rng.below(n - 1));
        const VertexId z = zr + (zr >= x ? 1 : 0);
        CostAssignment costs(m, derive_seed(seed, stream::kEvalCosts, i));
        run_search(g, costs, w, stepper, x, z, result, scratch);
        sums.cost += result.cost;
        sums.cost_sq += result.cost * result.cost;
        sums.steps += result.steps;
        sums.steps_sq += static_cast<double>(result.steps) * result.steps;
        sums.min_tally += result.min_tally;
        sums.min_tally_sq += result.min_tally * result.min_tally;
        sums.cross += result.min_tally * result.steps;
        sums.log_dist += std::log(static_cast<double>(g.distance(x, z)));
    }
}

double batch_ci95(double sum, double sq, std::uint64_t count) {
    if (count < 2) return 0.0;
    const double mean = sum / static_cast<double>(count);
    const double var = std::max(
        0.0, (sq - mean * mean * static_cast<double>(count)) / static_cast<double>(count - 1));
    return 1.96 * std::sqrt(var / static_cast<double>(count));
}

}  // namespace

BatchStats evaluate_batch(const CostGraph& g, const CostModel& m, const Weighting* w,
                          const Stepper& stepper, std::uint64_t seed, std::uint64_t queries,
                          std::uint32_t workers) {
    BatchSums total;
    workers = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(workers ? workers : 1, std::max<std::uint64_t>(queries, 1)));
    if (workers <= 1) {
        evaluate_block(g, m, w, stepper, seed, 0, queries, total);
    } else {
        std::vector<BatchSums> partial(workers);
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::uint32_t t = 0; t < workers; ++t) {
            const std::uint64_t lo = queries * t / workers;
            const std::uint64_t hi = queries * (t + 1) / workers;
            threads.emplace_back([&, t, lo, hi] {
                evaluate_block(g, m, w, stepper, seed, lo, hi, partial[t]);
            });
        }
        for (auto& th : threads) th.join();
        for (std::uint32_t t = 0; t < workers; ++t) total.merge(partial[t]);
    }

    BatchStats stats;
    stats.queries = queries;
    const auto q = static_cast<double>(queries);
    stats.mean_cost = total.cost / q;
    stats.mean_steps = total.steps / q;
    stats.mean_min_tally = total.min_tally / q;
    stats.mean_log_dist = total.log_dist / q;
    stats.ci95_cost = batch_ci95(total.cost, total.cost_sq, queries);
    stats.ci95_steps = batch_ci95(total.steps, total.steps_sq, queries);
    stats.sum_min_tally = total.min_tally;
    stats.sum_steps = total.steps;
    stats.sum_min_tally_sq = total.min_tally_sq;
    stats.sum_steps_sq = total.steps_sq;
    stats.sum_cross = total.cross;
    return stats;
}

}  // namespace costgreedy
