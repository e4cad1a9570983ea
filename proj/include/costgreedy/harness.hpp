#pragma once
// Experiment runner: builds graphs, trains weightings per the named
// protocol, evaluates every algorithm on a held-out batch of queries with
// the weights frozen (training and evaluation draw from disjoint seed
// streams), and emits CSV rows plus plot files.

#include <cstdint>
#include <string>
#include <vector>

#include "costgreedy/costs.hpp"
#include "costgreedy/topology.hpp"

namespace costgreedy {

struct ExperimentConfig {
    std::string experiment;  // baseline|by-size|by-round|two-degree|decentralized|general
    std::vector<std::uint32_t> sizes;
    CostModel cost = CostModel::constant(1.0);
    DegreeSpec degrees = DegreeSpec::log2_of_n();
    double alpha = 1.0;
    std::uint32_t rounds = 10;        // estimation rounds (decentralized: total rounds)
    std::uint32_t queries_mult = 20;  // training queries per round = queries_mult * n
    std::uint32_t eval_mult = 10;     // evaluation queries = eval_mult * n
    std::uint32_t fifo_m = 20;        // decentralized buffer capacity
    std::uint32_t kz = 1;             // recorded positions per zone
    std::uint32_t graph_seeds = 1;    // graphs averaged per size
    std::uint32_t workers = 1;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string out_dir;

    // Figure-analog defaults for a named experiment (sizes, cost model,
    // degree law, rounds). Seed is never defaulted.
    static ExperimentConfig defaults(const std::string& experiment);
    // Plain-text key=value file mirroring the field names.
    void load_file(const std::string& path);
    void set_key(const std::string& key, const std::string& value);
    void validate() const;
};

struct ExperimentRow {
    std::uint32_t size = 0;
    std::string algorithm;
    std::uint32_t round = 0;
    double mean_steps = 0.0;
    double mean_cost = 0.0;
    double ci95_steps = 0.0;
    double ci95_cost = 0.0;
    std::uint64_t queries = 0;
    double mean_log_dist = 0.0;  // not part of the CSV; used by scaling checks
};

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);

// CSV + per-metric SVG plots + a gnuplot script with one .dat file per
// series, all under cfg.out_dir.
void write_experiment_outputs(const ExperimentConfig& cfg,
                              const std::vector<ExperimentRow>& rows);

// One polyline per series with 95% CI whiskers; log2-spaced x ticks for
// by-size figures. Empty input yields an empty-axes file.
struct PlotPoint {
    double x = 0.0;
    double y = 0.0;
    double ci = 0.0;
};
struct PlotSeries {
    std::string name;
    std::vector<PlotPoint> points;
};
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series, bool log2_x);

}  // namespace costgreedy
