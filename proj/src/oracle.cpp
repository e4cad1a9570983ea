#include "costgreedy/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace costgreedy {

std::uint64_t tuple_count(std::size_t support_size, std::size_t forward_degree) {
    std::uint64_t t = 1;
    for (std::size_t j = 0; j < forward_degree; ++j) {
        if (t > std::numeric_limits<std::uint64_t>::max() / support_size)
            return std::numeric_limits<std::uint64_t>::max();
        t *= support_size;
    }
    return t;
}

namespace {

std::vector<VertexId> rank_order(const CostGraph& g, VertexId z) {
    std::vector<VertexId> order;
    order.reserve(g.size() - 1);
    for (VertexId x = 0; x < g.size(); ++x)
        if (x != z) order.push_back(x);
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
        const auto da = g.distance(a, z), db = g.distance(b, z);
        return da != db ? da < db : a < b;
    });
    return order;
}

// Per-vertex enumeration tables shared by the policy evaluators: forward
// targets, and for every joint cost tuple its probability and per-edge costs.
struct VertexTuples {
    std::vector<VertexId> targets;            // forward targets, ascending edge id
    std::vector<std::uint32_t> dists;         // d(target, z)
    std::uint64_t tuples = 1;
    std::vector<double> prob;                  // [tuple]
    std::vector<std::vector<double>> cost;     // [tuple][slot]
};

struct InstanceTables {
    std::vector<VertexId> order;               // rank order
    std::vector<VertexTuples> at;              // indexed by vertex id
};

InstanceTables build_tables(const CostGraph& g, const CostModel& m, VertexId z,
                            std::uint64_t max_terms) {
    if (!m.discrete())
        throw std::invalid_argument("policy evaluation requires a finite cost support");
    const auto support = m.support();
    const auto probs = m.probs();
    const std::size_t s = support.size();

    InstanceTables tables;
    tables.order = rank_order(g, z);
    tables.at.resize(g.size());
    for (VertexId x : tables.order) {
        auto fwd = forward_neighbors(g, x, z);
        VertexTuples& vt = tables.at[x];
        const std::size_t k = fwd.size();
        vt.targets.resize(k);
        vt.dists.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            vt.targets[j] = fwd[j].second;
            vt.dists[j] = g.distance(fwd[j].second, z);
        }
        vt.tuples = tuple_count(s, k);
        if (vt.tuples > max_terms)
            throw std::runtime_error("policy evaluation: cost-tuple enumeration too large");
        vt.prob.resize(vt.tuples);
        vt.cost.assign(vt.tuples, std::vector<double>(k));
        std::vector<std::size_t> digit(k, 0);
        for (std::uint64_t t = 0; t < vt.tuples; ++t) {
            double p = 1.0;
            for (std::size_t j = 0; j < k; ++j) {
                p *= probs[digit[j]];
                vt.cost[t][j] = support[digit[j]];
            }
            vt.prob[t] = p;
            std::size_t carry = 0;
            while (carry < k && ++digit[carry] == s) digit[carry++] = 0;
        }
    }
    return tables;
}

std::vector<double> evaluate_policy(const InstanceTables& tables, const ForwardPolicy& policy,
                                    std::uint32_t n, VertexId z) {
    std::vector<double> values(n, 0.0);
    for (VertexId x : tables.order) {
        const VertexTuples& vt = tables.at[x];
        const auto& choice = policy.choices[x];
        double expected = 0.0;
        for (std::uint64_t t = 0; t < vt.tuples; ++t) {
            const std::uint8_t j = choice[t];
            expected += vt.prob[t] * (vt.cost[t][j] + values[vt.targets[j]]);
        }
        values[x] = expected;
    }
    values[z] = 0.0;
    return values;
}

std::uint8_t weighted_choice(const VertexTuples& vt, const std::vector<double>& w,
                             std::uint64_t t) {
    // Mirrors forward_weighted_step: min cost + w(y), ties to smaller
    // distance, then smaller vertex id, then smaller edge id (slot order).
    std::uint8_t best = 0;
    double best_score = 0.0;
    std::uint32_t best_dist = 0;
    VertexId best_target = 0;
    bool found = false;
    for (std::size_t j = 0; j < vt.targets.size(); ++j) {
        const double score = vt.cost[t][j] + w[vt.targets[j]];
        const VertexId y = vt.targets[j];
        if (!found || score < best_score ||
            (score == best_score &&
             (vt.dists[j] < best_dist || (vt.dists[j] == best_dist && y < best_target)))) {
            best = static_cast<std::uint8_t>(j);
            best_score = score;
            best_dist = vt.dists[j];
            best_target = y;
            found = true;
        }
    }
    return best;
}

}  // namespace

ForwardPolicy policy_from_weights(const CostGraph& g, const CostModel& m,
                                  const FullWeightTable& w, VertexId z) {
    const InstanceTables tables = build_tables(g, m, z, 10'000'000);
    ForwardPolicy policy;
    policy.dest = z;
    policy.choices.resize(g.size());
    for (VertexId x : tables.order) {
        const VertexTuples& vt = tables.at[x];
        policy.choices[x].resize(vt.tuples);
        for (std::uint64_t t = 0; t < vt.tuples; ++t)
            policy.choices[x][t] = weighted_choice(vt, w.values, t);
    }
    return policy;
}

std::vector<double> policy_expected_cost(const CostGraph& g, const CostModel& m,
                                         const ForwardPolicy& policy, VertexId z,
                                         std::uint64_t max_terms) {
    const InstanceTables tables = build_tables(g, m, z, max_terms);
    return evaluate_policy(tables, policy, g.size(), z);
}

std::vector<std::vector<double>> policy_step_distribution(const CostGraph& g,
                                                          const CostModel& m,
                                                          const ForwardPolicy& policy,
                                                          VertexId z) {
    const InstanceTables tables = build_tables(g, m, z, 10'000'000);
    const std::uint32_t n = g.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n + 1, 0.0));
    dist[z][0] = 1.0;
    for (VertexId x : tables.order) {
        const VertexTuples& vt = tables.at[x];
        const auto& choice = policy.choices[x];
        for (std::uint64_t t = 0; t < vt.tuples; ++t) {
            const auto& child = dist[vt.targets[choice[t]]];
            for (std::uint32_t j = 0; j + 1 <= n; ++j)
                if (child[j] > 0.0) dist[x][j + 1] += vt.prob[t] * child[j];
        }
    }
    return dist;
}

BatchStats simulate_policy(const CostGraph& g, const CostModel& m, const ForwardPolicy& policy,
                           VertexId x, VertexId z, std::uint64_t seed,
                           std::uint64_t queries) {
    const auto support = m.support();
    const std::size_t s = support.size();
    BatchStats stats;
    stats.queries = queries;
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t i = 0; i < queries; ++i) {
        CostAssignment costs(m, derive_seed(seed, stream::kWald, i));
        VertexId cur = x;
        double total = 0.0;
        while (cur != z) {
            const auto fwd = forward_neighbors(g, cur, z);
            std::uint64_t tuple = 0;
            std::uint64_t radix = 1;
            std::vector<double> edge_cost(fwd.size());
            for (std::size_t j = 0; j < fwd.size(); ++j) {
                const double c = costs(fwd[j].first);
                edge_cost[j] = c;
                std::size_t idx = 0;
                while (idx + 1 < s && support[idx] != c) ++idx;
                tuple += idx * radix;
                radix *= s;
            }
            const std::uint8_t j = policy.choices[cur][tuple];
            total += edge_cost[j];
            cur = fwd[j].second;
        }
        sum += total;
        sq += total * total;
    }
    stats.mean_cost = sum / static_cast<double>(queries);
    if (queries > 1) {
        const double var = std::max(
            0.0, (sq - stats.mean_cost * stats.mean_cost * static_cast<double>(queries)) /
                     static_cast<double>(queries - 1));
        stats.ci95_cost = 1.96 * std::sqrt(var / static_cast<double>(queries));
    }
    return stats;
}

void Report::add(std::string check, std::string instance, double value, double bound,
                 bool ok) {
    rows.push_back({std::move(check), std::move(instance), value, bound, ok});
    pass = pass && ok;
}

void write_report_csv(const Report& report, std::ostream& out) {
    out << "check,instance,value,bound,pass\n";
    out.precision(17);
    for (const auto& r : report.rows)
        out << r.check << ',' << r.instance << ',' << r.value << ',' << r.bound << ','
            << (r.pass ? 1 : 0) << '\n';
}

Report verify_optimality(const CostGraph& g, const CostModel& m, VertexId z,
                         const std::string& instance, double tol, double policy_limit) {
    Report report;
    const std::uint32_t n = g.size();
    const FullWeightTable fixed = exact_fixpoint(g, m, z).weights;

    // Residual of the optimality equation at the fixed point.
    {
        const FullWeightTable again = exact_iterate(g, m, fixed, z);
        double residual = 0.0;
        for (VertexId x = 0; x < n; ++x)
            residual = std::max(residual, std::abs(again.values[x] - fixed.values[x]));
        report.add("fixpoint_residual", instance, residual, tol, residual <= tol);
    }

    const InstanceTables tables = build_tables(g, m, z, 1u << 20);

    // Vertices with any actual decision to make.
    std::vector<VertexId> deciders;
    double total_policies = 1.0;
    for (VertexId x : tables.order) {
        const VertexTuples& vt = tables.at[x];
        const std::size_t k = vt.targets.size();
        if (k < 2) continue;
        double local = 1.0;
        for (std::uint64_t t = 0; t < vt.tuples; ++t) local *= static_cast<double>(k);
        total_policies *= local;
        deciders.push_back(x);
    }
    if (total_policies > policy_limit)
        throw std::invalid_argument("policy enumeration too large for this instance");

    ForwardPolicy policy;
    policy.dest = z;
    policy.choices.resize(n);
    for (VertexId x : tables.order)
        policy.choices[x].assign(tables.at[x].tuples, 0);

    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    best[z] = 0.0;
    double worst_beat = 0.0;  // max over policies and x of fixed - E (should stay <= tol)

    // Odometer over the joint policy space of the deciding vertices.
    std::vector<std::uint64_t> local_idx(deciders.size(), 0);
    bool done = false;
    std::uint64_t visited = 0;
    while (!done) {
        ++visited;
        const std::vector<double> values = evaluate_policy(tables, policy, n, z);
        for (VertexId x = 0; x < n; ++x) {
            best[x] = std::min(best[x], values[x]);
            worst_beat = std::max(worst_beat, fixed.values[x] - values[x]);
        }
        // advance
        std::size_t v = 0;
        for (; v < deciders.size(); ++v) {
            const VertexId x = deciders[v];
            const std::size_t k = tables.at[x].targets.size();
            auto& table = policy.choices[x];
            // increment the per-vertex decision table as a base-k counter
            std::uint64_t t = 0;
            for (; t < table.size(); ++t) {
                if (++table[t] < k) break;
                table[t] = 0;
            }
            if (t < table.size()) break;  // no carry out of this vertex
        }
        done = v == deciders.size();
    }

    double gap = 0.0;
    for (VertexId x = 0; x < n; ++x) gap = std::max(gap, std::abs(best[x] - fixed.values[x]));
    std::ostringstream count_label;
    count_label << instance << ":policies=" << visited;
    report.add("optimality_matches_enumeration", count_label.str(), gap, tol, gap <= tol);
    report.add("no_policy_beats_fixpoint", instance, worst_beat, tol, worst_beat <= tol);

    // Perturbing the fixed point can never produce a better policy.
    double perturbed_beat = 0.0;
    for (VertexId v = 0; v < n; ++v) {
        if (v == z) continue;
        FullWeightTable w = fixed;
        w.values[v] += 0.5;
        const ForwardPolicy p = policy_from_weights(g, m, w, z);
        const std::vector<double> values = evaluate_policy(tables, p, n, z);
        for (VertexId x = 0; x < n; ++x)
            perturbed_beat = std::max(perturbed_beat, fixed.values[x] - values[x]);
    }
    report.add("perturbed_never_better", instance, perturbed_beat, tol, perturbed_beat <= tol);
    return report;
}

Report verify_fixpoint_convergence(const CostGraph& g, const CostModel& m, VertexId z,
                                   const std::string& instance, double tol) {
    Report report;
    const std::uint32_t n = g.size();
    const FullWeightTable start_hundred = FullWeightTable::fill(n, z, 100.0);
    const ExactFixpointResult from_zero = exact_fixpoint(g, m, z, nullptr, true);
    const ExactFixpointResult from_hundred = exact_fixpoint(g, m, z, &start_hundred, true);

    report.add("converges_within_n_minus_1", instance + ":start=0",
               static_cast<double>(from_zero.iterations), static_cast<double>(n - 1),
               from_zero.iterations <= n - 1);
    report.add("converges_within_n_minus_1", instance + ":start=100",
               static_cast<double>(from_hundred.iterations), static_cast<double>(n - 1),
               from_hundred.iterations <= n - 1);

    double start_gap = 0.0;
    for (VertexId x = 0; x < n; ++x)
        start_gap = std::max(start_gap, std::abs(from_zero.weights.values[x] -
                                                 from_hundred.weights.values[x]));
    report.add("limit_start_independent", instance, start_gap, tol, start_gap <= tol);

    // Rank-r vertices keep their final value from pass r onward.
    const std::vector<VertexId> order = rank_order(g, z);
    double freeze_gap = 0.0;
    for (const ExactFixpointResult* run : {&from_zero, &from_hundred}) {
        for (std::size_t r = 1; r <= order.size(); ++r) {
            const VertexId x = order[r - 1];
            const double limit = run->weights.values[x];
            for (std::size_t i = r; i < run->trace.size(); ++i)
                freeze_gap =
                    std::max(freeze_gap, std::abs(run->trace[i].values[x] - limit));
        }
    }
    report.add("rank_r_frozen_after_pass_r", instance, freeze_gap, tol, freeze_gap <= tol);
    return report;
}

Report verify_approximation_bound(const CostGraph& g, const CostModel& m, VertexId z,
                                  double epsilon, std::uint32_t draws, std::uint64_t seed,
                                  const std::string& instance, double tol) {
    Report report;
    const std::uint32_t n = g.size();
    const FullWeightTable fixed = exact_fixpoint(g, m, z).weights;
    const InstanceTables tables = build_tables(g, m, z, 10'000'000);

    double max_regret = 0.0;
    double min_regret = 0.0;
    double step_form_excess = -std::numeric_limits<double>::infinity();
    for (std::uint32_t d = 0; d < draws; ++d) {
        SplitMix64 signs(derive_seed(seed, stream::kPerturb, d));
        FullWeightTable w = fixed;
        for (VertexId x = 0; x < n; ++x) {
            if (x == z) continue;
            const double delta = (signs.next() & 1) ? epsilon : -epsilon;
            w.values[x] = std::max(0.0, w.values[x] + delta);
        }
        const ForwardPolicy policy = policy_from_weights(g, m, w, z);
        const std::vector<double> values = evaluate_policy(tables, policy, n, z);
        std::vector<double> regret(n);
        for (VertexId x = 0; x < n; ++x) {
            regret[x] = values[x] - fixed.values[x];
            max_regret = std::max(max_regret, regret[x]);
            min_regret = std::min(min_regret, regret[x]);
        }
        // Per-step form: regret(x) <= 2 eps (k + n P(S > k)) for every k.
        const auto steps = policy_step_distribution(g, m, policy, z);
        for (VertexId x = 0; x < n; ++x) {
            double tail = 1.0;  // P(S > k)
            for (std::uint32_t k = 0; k <= n; ++k) {
                if (k > 0) tail -= steps[x][k - 1];
                const double cap = std::max(tail, 0.0);
                const double bound = 2.0 * epsilon * (k + static_cast<double>(n) * cap);
                step_form_excess = std::max(step_form_excess, regret[x] - bound);
            }
        }
    }
    std::ostringstream label;
    label << instance << ":eps=" << epsilon;
    report.add("regret_at_most_2ne", label.str(), max_regret, 2.0 * n * epsilon + tol,
               max_regret <= 2.0 * n * epsilon + tol);
    report.add("regret_nonnegative", label.str(), min_regret, -tol, min_regret >= -tol);
    report.add("per_step_form", label.str(), step_form_excess, tol, step_form_excess <= tol);
    return report;
}

Report verify_wald(const CostGraph& g, const CostModel& m, const std::vector<WaldEntry>& entries,
                   std::uint64_t queries, std::uint64_t seed) {
    Report report;
    const std::uint32_t degree = g.out_degree(0);
    for (VertexId x = 1; x < g.size(); ++x)
        if (g.out_degree(x) != degree)
            throw std::invalid_argument("Wald check requires a constant out-degree graph");

    const double c_min = m.expected_min_of_k(degree);
    std::size_t idx = 0;
    for (const auto& entry : entries) {
        const Stepper stepper = make_stepper(entry.kind, g);
        const BatchStats stats = evaluate_batch(g, m, entry.weighting, stepper,
                                                derive_seed(seed, stream::kWald, idx++),
                                                queries);
        const auto q = static_cast<double>(queries);
        const double sum_d = stats.sum_min_tally - c_min * stats.sum_steps;
        const double sum_d_sq = stats.sum_min_tally_sq - 2.0 * c_min * stats.sum_cross +
                                c_min * c_min * stats.sum_steps_sq;
        const double mean_d = sum_d / q;
        const double var_d = std::max(0.0, (sum_d_sq - mean_d * mean_d * q) / (q - 1.0));
        const double se = std::sqrt(var_d / q);
        std::ostringstream label;
        label << entry.label << ":degree=" << degree;
        report.add("wald_identity", label.str(), std::abs(mean_d), 3.0 * se,
                   std::abs(mean_d) <= 3.0 * se);
    }
    return report;
}

Report verify_scaling(const std::vector<std::uint32_t>& sizes, const CostModel& m,
                      std::uint64_t seed, std::uint32_t workers) {
    Report report;
    std::vector<double> ratios;
    for (const std::uint32_t n : sizes) {
        GraphSpec spec;
        spec.n = n;
        spec.alpha = 1.0;
        spec.degrees = DegreeSpec::log2_of_n();
        spec.seed = derive_seed(seed, stream::kGraph, n);
        const CostGraph g = generate_graph(spec);

        EstimationConfig cfg;
        cfg.workers = workers;
        const EstimationResult est =
            iterate_to_fixpoint(g, m, cfg, derive_seed(seed, stream::kTrainPairs, n));

        const std::uint64_t eval_queries = 10ull * n;
        const std::uint64_t eval_seed = derive_seed(seed, stream::kEvalPairs, n);
        const BatchStats cost_greedy = evaluate_batch(g, m, &est.weighting,
                                                      ForwardWeightedStepper{}, eval_seed,
                                                      eval_queries, workers);
        const BatchStats greedy = evaluate_batch(g, m, nullptr, GreedyStepper{}, eval_seed,
                                                 eval_queries, workers);

        const double ratio =
            cost_greedy.mean_cost / (std::log(static_cast<double>(n)) * cost_greedy.mean_log_dist);
        ratios.push_back(ratio);
        std::ostringstream label;
        label << "n=" << n;
        report.add("cost_greedy_not_above_greedy", label.str(), cost_greedy.mean_cost,
                   greedy.mean_cost, cost_greedy.mean_cost <= greedy.mean_cost);
        report.add("scaling_ratio", label.str(), ratio, 0.0, true);
    }
    if (ratios.size() >= 3) {
        const std::size_t k = ratios.size();
        const double top_max = std::max({ratios[k - 1], ratios[k - 2], ratios[k - 3]});
        const double top_min = std::min({ratios[k - 1], ratios[k - 2], ratios[k - 3]});
        const double spread = top_max / top_min - 1.0;
        report.add("scaling_ratio_spread_top3", "top3", spread, 0.25, spread < 0.25);
    }
    return report;
}

std::vector<TinyInstance> make_tiny_instances(std::size_t count, std::uint64_t seed) {
    std::vector<TinyInstance> instances;
    instances.reserve(count);
    SplitMix64 rng(derive_seed(seed, stream::kProperty));
    for (std::size_t i = 0; i < count; ++i) {
        const auto n = static_cast<std::uint32_t>(4 + rng.below(3));  // {4,5,6}
        const auto shortcut_edges = static_cast<std::uint32_t>(rng.below(3));
        std::vector<std::vector<VertexId>> shortcuts(n);
        for (std::uint32_t e = 0; e < shortcut_edges; ++e) {
            const auto src = static_cast<VertexId>(rng.below(n));
            const auto dist = static_cast<std::uint32_t>(1 + rng.below(n - 1));
            shortcuts[src].push_back((src + dist) % n);
        }
        TinyInstance inst{build_graph(n, 1.0, derive_seed(seed, i), shortcuts),
                          CostModel::two_point(), 0, ""};
        switch (rng.below(3)) {
            case 0: break;  // the paper's two-point example
            case 1: inst.model = CostModel::table({1.0, 3.0}, {0.3, 0.7}); break;
            default: inst.model = CostModel::table({0.5, 2.5}, {0.7, 0.3}); break;
        }
        inst.dest = static_cast<VertexId>(rng.below(n));
        std::ostringstream label;
        label << "tiny#" << i << ":n=" << n << ":shortcuts=" << shortcut_edges
              << ":z=" << inst.dest;
        inst.label = label.str();
        instances.push_back(std::move(inst));
    }
    return instances;
}

}  // namespace costgreedy
