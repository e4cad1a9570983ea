// Acceptance suite: runs each acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code is the number of
// failures. Criterion numbers can be passed as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "costgreedy/decentralized.hpp"
#include "costgreedy/harness.hpp"
#include "costgreedy/oracle.hpp"
#include "costgreedy/weights.hpp"

using namespace costgreedy;

namespace {

constexpr std::uint64_t kSeed = 20260810;
constexpr std::uint32_t kWorkers = 2;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Fmt {
    std::ostringstream os;
    Fmt() { os.precision(4); }
    template <typename T>
    Fmt& operator<<(const T& v) {
        os << v;
        return *this;
    }
    std::string str() const { return os.str(); }
};

const ExperimentRow* find_row(const std::vector<ExperimentRow>& rows, std::uint32_t size,
                              const std::string& algo, std::uint32_t round) {
    for (const auto& r : rows)
        if (r.size == size && r.algorithm == algo && r.round == round) return &r;
    return nullptr;
}

ExperimentConfig accept_config(const std::string& name) {
    ExperimentConfig cfg = ExperimentConfig::defaults(name);
    cfg.seed = kSeed;
    cfg.has_seed = true;
    cfg.workers = kWorkers;
    return cfg;
}

// --- criteria -------------------------------------------------------------

Outcome criterion_optimality() {
    Outcome out;
    double worst = 0.0;
    const auto instances = make_tiny_instances(20, kSeed);
    for (const auto& inst : instances) {
        const Report r = verify_optimality(inst.graph, inst.model, inst.dest, inst.label);
        out.pass = out.pass && r.pass;
        for (const auto& row : r.rows)
            if (row.check == "optimality_matches_enumeration")
                worst = std::max(worst, row.value);
    }
    out.detail = (Fmt() << instances.size()
                        << " tiny instances, max |fixpoint - enumeration min| = " << worst
                        << " (tol 1e-9)")
                     .str();
    return out;
}

Outcome criterion_fixpoint() {
    Outcome out;
    double worst_gap = 0.0, worst_freeze = 0.0;
    for (const auto& inst : make_tiny_instances(20, kSeed)) {
        const Report r = verify_fixpoint_convergence(inst.graph, inst.model, inst.dest,
                                                     inst.label);
        out.pass = out.pass && r.pass;
        for (const auto& row : r.rows) {
            if (row.check == "limit_start_independent") worst_gap = std::max(worst_gap, row.value);
            if (row.check == "rank_r_frozen_after_pass_r")
                worst_freeze = std::max(worst_freeze, row.value);
        }
    }
    out.detail = (Fmt() << "w0=0 vs w0=100 limit gap " << worst_gap
                        << ", rank-freeze deviation " << worst_freeze
                        << ", all within n-1 passes")
                     .str();
    return out;
}

Outcome criterion_approx() {
    Outcome out;
    double worst_margin = -1e30;
    for (const auto& inst : make_tiny_instances(20, kSeed)) {
        for (const double eps : {0.05, 0.1, 0.5}) {
            const Report r = verify_approximation_bound(inst.graph, inst.model, inst.dest, eps,
                                                        10, kSeed, inst.label);
            out.pass = out.pass && r.pass;
            for (const auto& row : r.rows)
                if (row.check == "regret_at_most_2ne")
                    worst_margin = std::max(worst_margin, row.value - row.bound);
        }
    }
    out.detail = (Fmt() << "eps in {0.05,0.1,0.5}, 10 draws each; max regret - 2n*eps = "
                        << worst_margin << " (<= 0 required)")
                     .str();
    return out;
}

Outcome criterion_wald() {
    Outcome out;
    GraphSpec spec;
    spec.n = 1u << 12;
    spec.alpha = 1.0;
    spec.degrees = DegreeSpec::constant(7);  // out-degree 8
    spec.seed = derive_seed(kSeed, stream::kGraph, 4);
    const CostGraph g = generate_graph(spec);
    const CostModel model = CostModel::exponential(1.0);
    EstimationConfig cfg;
    cfg.workers = kWorkers;
    const EstimationResult trained =
        iterate_to_fixpoint(g, model, cfg, derive_seed(kSeed, stream::kTrainPairs, 4));
    const Report r = verify_wald(g, model,
                                 {{"greedy", StepperKind::Greedy, nullptr},
                                  {"cost-greedy", StepperKind::CostGreedy, &trained.weighting}},
                                 100000, kSeed);
    out.pass = r.pass;
    Fmt f;
    f << "n=4096, degree 8, Exp(1), 1e5 queries per stepper:";
    for (const auto& row : r.rows)
        f << " |" << row.instance << "| = " << row.value << " vs 3se = " << row.bound << ";";
    out.detail = f.str();
    return out;
}

Outcome criterion_baseline(const std::vector<ExperimentRow>& rows,
                           const std::vector<std::uint32_t>& sizes) {
    Outcome out;
    double worst_ratio = 0.0;
    for (const std::uint32_t n : sizes) {
        const auto* greedy = find_row(rows, n, "greedy", 0);
        const ExperimentRow* cg = nullptr;
        for (const auto& r : rows)
            if (r.size == n && r.algorithm == "cost-greedy") cg = &r;
        if (!greedy || !cg) {
            out.pass = false;
            out.detail = "missing rows";
            return out;
        }
        const double ratio = cg->mean_steps / greedy->mean_steps;
        worst_ratio = std::max(worst_ratio, ratio);
        out.pass = out.pass && ratio <= 1.10;
    }
    out.detail = (Fmt() << "Constant(1), sizes 2^10..2^16: worst cost-greedy/greedy step ratio "
                        << worst_ratio << " (<= 1.10)")
                     .str();
    return out;
}

Outcome criterion_by_size(const std::vector<ExperimentRow>& rows,
                          const std::vector<std::uint32_t>& sizes) {
    Outcome out;
    Fmt f;
    f << "Exp(1): ";
    for (const std::uint32_t n : sizes) {
        if (n < (1u << 12)) continue;  // asserted at sizes >= 2^12
        const auto* greedy = find_row(rows, n, "greedy", 0);
        const ExperimentRow* cg = nullptr;
        for (const auto& r : rows)
            if (r.size == n && r.algorithm == "cost-greedy") cg = &r;
        if (!greedy || !cg) {
            out.pass = false;
            out.detail = "missing rows";
            return out;
        }
        const double cost_gap = greedy->mean_cost - cg->mean_cost;
        const double cost_ci = 3.0 * std::max(greedy->ci95_cost, cg->ci95_cost);
        const double step_gap = cg->mean_steps - greedy->mean_steps;
        const double step_ci = 3.0 * std::max(greedy->ci95_steps, cg->ci95_steps);
        const bool ok = cost_gap > 0 && cost_gap >= cost_ci && step_gap > 0 &&
                        step_gap >= step_ci;
        out.pass = out.pass && ok;
        if (n == sizes.back())
            f << "at 2^16 cost gap " << cost_gap << " (>= " << cost_ci << "), step gap "
              << step_gap << " (>= " << step_ci << ")";
    }
    out.detail = f.str();
    return out;
}

Outcome criterion_by_round() {
    Outcome out;
    const ExperimentConfig cfg = accept_config("by-round");
    const auto rows = run_experiment(cfg);
    const std::uint32_t n = cfg.sizes.front();
    const auto* r4 = find_row(rows, n, "cost-greedy", 4);
    const auto* r10 = find_row(rows, n, "cost-greedy", 10);
    if (!r4 || !r10) {
        out.pass = false;
        out.detail = "missing rows";
        return out;
    }
    const double rel = std::abs(r4->mean_cost - r10->mean_cost) / r10->mean_cost;
    out.pass = rel <= 0.02;
    out.detail = (Fmt() << "Exp(1), n=2^14: |round-4 - round-10| / round-10 = " << rel
                        << " (<= 0.02); round-4 " << r4->mean_cost << ", round-10 "
                        << r10->mean_cost)
                     .str();
    return out;
}

Outcome criterion_two_degree() {
    Outcome out;
    const ExperimentConfig cfg = accept_config("two-degree");
    const auto rows = run_experiment(cfg);
    Fmt f;
    f << "10% x55 / 90% x5, 4 graph seeds: ";
    for (const std::uint32_t n : cfg.sizes) {
        const auto* greedy = find_row(rows, n, "greedy", 0);
        const auto* cg = find_row(rows, n, "cost-greedy", cfg.rounds);
        const auto* sj = find_row(rows, n, "sj", cfg.rounds);
        if (!greedy || !cg || !sj) {
            out.pass = false;
            out.detail = "missing rows";
            return out;
        }
        const double rel = std::abs(sj->mean_steps - cg->mean_steps) / cg->mean_steps;
        const bool ok =
            sj->mean_steps < greedy->mean_steps && cg->mean_steps < greedy->mean_steps &&
            rel <= 0.10;
        out.pass = out.pass && ok;
        if (n == cfg.sizes.back())
            f << "at 2^14 greedy " << greedy->mean_steps << ", cost-greedy " << cg->mean_steps
              << ", sj " << sj->mean_steps << ", |sj-cg|/cg = " << rel << " (<= 0.10)";
    }
    out.detail = f.str();
    return out;
}

Outcome criterion_decentralized() {
    Outcome out;
    const ExperimentConfig cfg = accept_config("decentralized");
    const auto rows = run_experiment(cfg);
    Fmt f;
    f << "Exp(1), m=20, 20 rounds: ";
    for (const std::uint32_t n : cfg.sizes) {
        const auto* greedy = find_row(rows, n, "greedy", 0);
        const auto* central = find_row(rows, n, "cost-greedy", 10);
        const auto* decent = find_row(rows, n, "decentralized", cfg.rounds);
        if (!greedy || !central || !decent) {
            out.pass = false;
            out.detail = "missing rows";
            return out;
        }
        const bool ok = central->mean_cost < decent->mean_cost &&
                        decent->mean_cost < greedy->mean_cost;
        out.pass = out.pass && ok;
        if (n == cfg.sizes.back())
            f << "at 2^14 centralized " << central->mean_cost << " < decentralized "
              << decent->mean_cost << " < greedy " << greedy->mean_cost;
    }
    out.detail = f.str();
    return out;
}

Outcome criterion_general() {
    Outcome out;
    const ExperimentConfig cfg = accept_config("general");
    const auto rows = run_experiment(cfg);
    Fmt f;
    f << "pareto(2) degrees + Exp(1): ";
    for (const std::uint32_t n : cfg.sizes) {
        const auto* greedy = find_row(rows, n, "greedy", 0);
        const auto* decent = find_row(rows, n, "decentralized", cfg.rounds);
        if (!greedy || !decent) {
            out.pass = false;
            out.detail = "missing rows";
            return out;
        }
        const double gap = greedy->mean_cost - decent->mean_cost;
        const double ci = 3.0 * std::max(greedy->ci95_cost, decent->ci95_cost);
        out.pass = out.pass && gap >= ci;
        if (n == cfg.sizes.back())
            f << "at n=" << n << " cost gap " << gap << " (>= 3 CI widths = " << ci << ")";
    }
    out.detail = f.str();
    return out;
}

Outcome criterion_scaling(const std::vector<ExperimentRow>& by_size_rows,
                          const std::vector<std::uint32_t>& sizes) {
    Outcome out;
    std::vector<double> ratios;
    for (const std::uint32_t n : sizes) {
        const ExperimentRow* cg = nullptr;
        for (const auto& r : by_size_rows)
            if (r.size == n && r.algorithm == "cost-greedy") cg = &r;
        if (!cg) {
            out.pass = false;
            out.detail = "missing rows";
            return out;
        }
        ratios.push_back(cg->mean_cost /
                         (std::log(static_cast<double>(n)) * cg->mean_log_dist));
    }
    const std::size_t k = ratios.size();
    const double hi = std::max({ratios[k - 1], ratios[k - 2], ratios[k - 3]});
    const double lo = std::min({ratios[k - 1], ratios[k - 2], ratios[k - 3]});
    const double spread = hi / lo - 1.0;
    out.pass = spread < 0.25;
    out.detail = (Fmt() << "cost-greedy mean cost / (ln n * mean ln d) over top three sizes: "
                        << "spread " << spread << " (< 0.25); ratios " << ratios[k - 3] << ", "
                        << ratios[k - 2] << ", " << ratios[k - 1])
                     .str();
    return out;
}

Outcome criterion_properties() {
    Outcome out;
    SplitMix64 rng(derive_seed(kSeed, stream::kProperty));
    std::size_t cases = 0, failures = 0;
    const auto expect = [&](bool ok) {
        if (!ok) ++failures;
    };

    for (int g_idx = 0; g_idx < 60 && failures == 0; ++g_idx) {
        GraphSpec spec;
        spec.n = static_cast<std::uint32_t>(2 + rng.below(199));
        const double alphas[] = {0.0, 0.5, 1.0, 2.0};
        spec.alpha = alphas[rng.below(4)];
        spec.degrees = g_idx % 3 == 0
                           ? DegreeSpec::pareto(2.0)
                           : DegreeSpec::constant(static_cast<std::uint32_t>(rng.below(6)));
        spec.seed = rng.next();
        const CostGraph g = generate_graph(spec);
        const CostModel model =
            g_idx % 2 ? CostModel::exponential(1.0) : CostModel::two_point();

        ZonedWeights zw = ZonedWeights::zeros(spec.n, 1);
        for (double& v : zw.values) v = 4.0 * rng.u01();
        const DistanceWeighting w{std::move(zw)};
        expect(w.weight(g, 1 % spec.n, 1 % spec.n) == 0.0);

        SearchResult result;
        SearchScratch scratch;
        for (int p = 0; p < 9; ++p) {
            const auto x = static_cast<VertexId>(rng.below(spec.n));
            const auto zr = static_cast<VertexId>(rng.below(spec.n - 1));
            const VertexId z = zr + (zr >= x ? 1 : 0);
            for (int s = 0; s < 2; ++s) {
                const Weighting* weighting = s ? &w : nullptr;
                const Stepper stepper =
                    s ? Stepper{ForwardWeightedStepper{}} : Stepper{GreedyStepper{}};
                run_search(g, CostAssignment(model, rng.next()), weighting, stepper, x, z,
                           result, scratch);
                ++cases;
                expect(result.succeeded);
                expect(result.steps <= g.distance(x, z));
                expect(result.cost >= result.min_tally - 1e-9);
                for (std::size_t i = 0; i + 1 < result.path.size(); ++i)
                    expect(g.distance(result.path[i + 1], z) <
                           g.distance(result.path[i], z));
            }
        }

        if (g_idx % 10 == 0 && spec.n >= 8) {
            DecentralizedNetwork net(g, model, 20);
            run_decentralized_experiment(net, 2, 50, rng.next());
            for (VertexId v = 0; v < spec.n; ++v)
                for (std::uint32_t cat = 0; cat < net.categories(); ++cat)
                    expect(net.buffer_len(v, cat) <= 20);
            expect(net.weighting().weight(g, 3 % spec.n, 3 % spec.n) == 0.0);
        }
    }

    // byte-identical CSV on rerun
    ExperimentConfig cfg = accept_config("by-size");
    cfg.sizes = {256};
    cfg.rounds = 3;
    cfg.queries_mult = 4;
    cfg.eval_mult = 4;
    const std::string a = rows_to_csv(run_experiment(cfg));
    const std::string b = rows_to_csv(run_experiment(cfg));
    expect(a == b);

    out.pass = failures == 0 && cases >= 1000;
    out.detail = (Fmt() << cases
                        << " randomized searches: forward progress, steps <= d(x,z), "
                           "cost >= min tally, buffer caps, w(z)=0, byte-identical rerun; "
                        << failures << " violations")
                     .str();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    std::vector<ExperimentRow> by_size_rows;
    std::vector<std::uint32_t> by_size_sizes;

    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };

    const std::vector<Entry> entries = {
        {1, "optimality oracle (exhaustive forward policies)",
         [] { return criterion_optimality(); }},
        {2, "fixed-point convergence and rank freezing", [] { return criterion_fixpoint(); }},
        {3, "approximation bound (regret <= 2 n eps)", [] { return criterion_approx(); }},
        {4, "Wald identity for the min-edge tally", [] { return criterion_wald(); }},
        {5, "baseline step parity on unit costs",
         [&] {
             const ExperimentConfig cfg = accept_config("baseline");
             return criterion_baseline(run_experiment(cfg), cfg.sizes);
         }},
        {6, "cost/steps trade-off under Exp(1)",
         [&] {
             const ExperimentConfig cfg = accept_config("by-size");
             by_size_rows = run_experiment(cfg);
             by_size_sizes = cfg.sizes;
             return criterion_by_size(by_size_rows, by_size_sizes);
         }},
        {7, "round convergence at n=2^14", [] { return criterion_by_round(); }},
        {8, "two-degree routing with the SJ baseline", [] { return criterion_two_degree(); }},
        {9, "decentralized between centralized and greedy",
         [] { return criterion_decentralized(); }},
        {10, "power-law degrees + costs, decentralized", [] { return criterion_general(); }},
        {11, "scaling consistency log n * log d",
         [&] {
             if (by_size_rows.empty()) {
                 const ExperimentConfig cfg = accept_config("by-size");
                 by_size_rows = run_experiment(cfg);
                 by_size_sizes = cfg.sizes;
             }
             return criterion_scaling(by_size_rows, by_size_sizes);
         }},
        {12, "randomized property suite", [] { return criterion_properties(); }},
    };

    int failures = 0;
    for (const auto& entry : entries) {
        if (!only.empty() && !only.count(entry.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = entry.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s — %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL",
                    entry.id, entry.name, outcome.detail.c_str(), secs);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures;
}
