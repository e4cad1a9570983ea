// Command-line front end: graph generation, weight estimation, the figure
// experiments, and the verification checks.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "costgreedy/decentralized.hpp"
#include "costgreedy/harness.hpp"
#include "costgreedy/oracle.hpp"
#include "costgreedy/weights.hpp"

namespace {

using namespace costgreedy;

struct CommonOpts {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

ExperimentConfig build_config(const std::string& experiment, const CommonOpts& opts) {
    ExperimentConfig cfg = ExperimentConfig::defaults(experiment);
    if (!opts.config.empty()) cfg.load_file(opts.config);
    if (opts.seed_set) {
        cfg.seed = opts.seed;
        cfg.has_seed = true;
    }
    if (!opts.out.empty()) cfg.out_dir = opts.out;
    return cfg;
}

int cmd_generate(const CommonOpts& opts, std::uint32_t n, double alpha,
                 const std::string& degrees) {
    if (!opts.seed_set) throw CLI::ValidationError("--seed is required");
    GraphSpec spec;
    spec.n = n;
    spec.alpha = alpha;
    spec.degrees = DegreeSpec::parse(degrees);
    spec.seed = opts.seed;
    const CostGraph g = generate_graph(spec);
    if (opts.out.empty()) {
        save_graph(g, std::cout);
    } else {
        save_graph_file(g, opts.out);
        std::cerr << "wrote " << opts.out << " (" << g.edge_count() << " edges)\n";
    }
    return 0;
}

int cmd_weights(const CommonOpts& opts, std::uint32_t n, double alpha,
                const std::string& degrees, const std::string& cost, std::uint32_t rounds,
                std::uint32_t queries_mult, std::uint32_t kz, bool degree_conditioned,
                const std::string& diagnostics_path) {
    if (!opts.seed_set) throw CLI::ValidationError("--seed is required");
    GraphSpec spec;
    spec.n = n;
    spec.alpha = alpha;
    spec.degrees = DegreeSpec::parse(degrees);
    spec.seed = derive_seed(opts.seed, stream::kGraph);
    const CostGraph g = generate_graph(spec);
    const CostModel model = CostModel::parse(cost);

    EstimationConfig cfg;
    cfg.rounds = rounds;
    cfg.queries_per_round = static_cast<std::uint64_t>(queries_mult) * n;
    cfg.kz = kz;
    cfg.degree_conditioned = degree_conditioned;
    const EstimationResult result = iterate_to_fixpoint(g, model, cfg, opts.seed);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opts.out.empty()) {
        file.open(opts.out);
        if (!file) throw std::runtime_error("cannot open for write: " + opts.out);
        out = &file;
    }
    if (degree_conditioned) {
        // one block per degree class, prefixed by a comment line
        for (std::uint32_t c = 0; c < result.weighting.class_count(); ++c) {
            *out << "# degree_class " << c << "\n";
            save_weights_csv(result.weighting.vector_for_class(c), *out);
        }
    } else {
        save_weights_csv(result.weighting.vector_for_class(0), *out);
    }
    if (!diagnostics_path.empty()) {
        std::ofstream diag(diagnostics_path);
        if (!diag) throw std::runtime_error("cannot open for write: " + diagnostics_path);
        save_diagnostics_csv(result.rounds, diag);
    }
    return 0;
}

int cmd_experiment(const std::string& name, const CommonOpts& opts) {
    const ExperimentConfig cfg = build_config(name, opts);
    const std::vector<ExperimentRow> rows = run_experiment(cfg);
    write_experiment_outputs(cfg, rows);
    std::cerr << "wrote " << rows.size() << " rows under "
              << (cfg.out_dir.empty() ? "." : cfg.out_dir) << "\n";
    return 0;
}

int cmd_verify(const std::string& check, const CommonOpts& opts, std::uint32_t workers) {
    if (!opts.seed_set) throw CLI::ValidationError("--seed is required");
    const std::uint64_t seed = opts.seed;
    Report report;

    const auto run_tiny = [&](auto&& fn) {
        const auto instances = make_tiny_instances(20, seed);
        for (const auto& inst : instances) fn(inst);
    };

    if (check == "optimality" || check == "all") {
        run_tiny([&](const TinyInstance& t) {
            const Report r = verify_optimality(t.graph, t.model, t.dest, t.label);
            report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
            report.pass = report.pass && r.pass;
        });
    }
    if (check == "fixpoint" || check == "all") {
        run_tiny([&](const TinyInstance& t) {
            const Report r = verify_fixpoint_convergence(t.graph, t.model, t.dest, t.label);
            report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
            report.pass = report.pass && r.pass;
        });
    }
    if (check == "approx" || check == "all") {
        run_tiny([&](const TinyInstance& t) {
            for (const double eps : {0.05, 0.1, 0.5}) {
                const Report r =
                    verify_approximation_bound(t.graph, t.model, t.dest, eps, 10, seed, t.label);
                report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
                report.pass = report.pass && r.pass;
            }
        });
    }
    if (check == "wald" || check == "all") {
        GraphSpec spec;
        spec.n = 1u << 12;
        spec.alpha = 1.0;
        spec.degrees = DegreeSpec::constant(7);  // out-degree 8 with the ring edge
        spec.seed = derive_seed(seed, stream::kGraph);
        const CostGraph g = generate_graph(spec);
        const CostModel model = CostModel::exponential(1.0);
        EstimationConfig cfg;
        cfg.workers = workers;
        const EstimationResult trained =
            iterate_to_fixpoint(g, model, cfg, derive_seed(seed, stream::kTrainPairs));
        const std::vector<WaldEntry> entries = {
            {"greedy", StepperKind::Greedy, nullptr},
            {"cost-greedy", StepperKind::CostGreedy, &trained.weighting},
        };
        const Report r = verify_wald(g, model, entries, 100000, seed);
        report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
        report.pass = report.pass && r.pass;
    }
    if (check == "scaling" || check == "all") {
        std::vector<std::uint32_t> sizes;
        for (std::uint32_t e = 10; e <= 16; ++e) sizes.push_back(1u << e);
        const Report r = verify_scaling(sizes, CostModel::exponential(1.0), seed, workers);
        report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
        report.pass = report.pass && r.pass;
    }
    if (report.rows.empty()) throw CLI::ValidationError("unknown check: " + check);

    if (opts.out.empty()) {
        write_report_csv(report, std::cout);
    } else {
        std::ofstream out(opts.out);
        if (!out) throw std::runtime_error("cannot open for write: " + opts.out);
        write_report_csv(report, out);
    }
    std::cerr << (report.pass ? "all checks passed\n" : "CHECK FAILURES\n");
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cost-greedy decentralized search simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config, "key = value config file");
        cmd->add_option("--out", opts.out, "output file or directory");
        cmd->add_option("--seed", opts.seed, "root RNG seed")
            ->each([&](const std::string&) { opts.seed_set = true; });
    };

    // generate
    std::uint32_t n = 1024;
    double alpha = 1.0;
    std::string degrees = "log2";
    auto* generate = app.add_subcommand("generate", "generate and serialize a graph");
    add_common(generate);
    generate->add_option("--n", n, "graph size");
    generate->add_option("--alpha", alpha, "shortcut exponent");
    generate->add_option("--degrees", degrees, "constant:q | log2 | twotype:p,a,b | pareto:tau");

    // weights
    std::string cost = "exp:1";
    std::uint32_t rounds = 10, queries_mult = 20, kz = 1;
    bool degree_conditioned = false;
    std::string diagnostics_path;
    auto* weights = app.add_subcommand("weights", "estimate a compressed weight vector");
    add_common(weights);
    weights->add_option("--n", n, "graph size");
    weights->add_option("--alpha", alpha, "shortcut exponent");
    weights->add_option("--degrees", degrees, "degree law");
    weights->add_option("--cost", cost, "cost model");
    weights->add_option("--rounds", rounds, "estimation rounds");
    weights->add_option("--queries-mult", queries_mult, "queries per round = mult * n");
    weights->add_option("--k-z", kz, "recorded positions per zone");
    weights->add_flag("--degree-conditioned", degree_conditioned,
                      "condition the vector on the neighbor degree class");
    weights->add_option("--diagnostics", diagnostics_path, "per-round diagnostics CSV");

    // experiment
    std::string experiment_name;
    auto* experiment = app.add_subcommand("experiment", "run a figure-analog experiment");
    add_common(experiment);
    experiment
        ->add_option("name", experiment_name,
                     "baseline | by-size | by-round | two-degree | decentralized | general")
        ->required();

    // verify
    std::string check_name;
    std::uint32_t workers = 1;
    auto* verify = app.add_subcommand("verify", "run a verification check");
    add_common(verify);
    verify->add_option("name", check_name, "optimality | fixpoint | approx | wald | scaling | all")
        ->required();
    verify->add_option("--workers", workers, "worker threads for batch evaluation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(opts, n, alpha, degrees);
        if (weights->parsed())
            return cmd_weights(opts, n, alpha, degrees, cost, rounds, queries_mult, kz,
                               degree_conditioned, diagnostics_path);
        if (experiment->parsed()) return cmd_experiment(experiment_name, opts);
        if (verify->parsed()) return cmd_verify(check_name, opts, workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
