#include "costgreedy/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "costgreedy/decentralized.hpp"
#include "costgreedy/search.hpp"
#include "costgreedy/weights.hpp"

namespace costgreedy {

namespace {

// Harness-level stream salts (fed through derive_seed with size and rep).
constexpr std::uint64_t kCellGraph = 101;
constexpr std::uint64_t kCellTrain = 102;
constexpr std::uint64_t kCellEval = 103;
constexpr std::uint64_t kCellDecent = 104;

std::vector<std::uint32_t> power_sizes(std::uint32_t lo_exp, std::uint32_t hi_exp) {
    std::vector<std::uint32_t> sizes;
    for (std::uint32_t e = lo_exp; e <= hi_exp; ++e) sizes.push_back(1u << e);
    return sizes;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    if (experiment == "baseline") {
        cfg.sizes = power_sizes(10, 16);
        cfg.cost = CostModel::constant(1.0);
    } else if (experiment == "by-size") {
        cfg.sizes = power_sizes(10, 16);
        cfg.cost = CostModel::exponential(1.0);
    } else if (experiment == "by-round") {
        cfg.sizes = {1u << 14};
        cfg.cost = CostModel::exponential(1.0);
    } else if (experiment == "two-degree") {
        cfg.sizes = {1u << 12, 1u << 13, 1u << 14};
        cfg.cost = CostModel::constant(1.0);
        cfg.degrees = DegreeSpec::two_type(0.1, 55, 5);
        cfg.graph_seeds = 4;
    } else if (experiment == "decentralized") {
        cfg.sizes = power_sizes(10, 14);
        cfg.cost = CostModel::exponential(1.0);
        cfg.rounds = 20;
    } else if (experiment == "general") {
        cfg.sizes = {1u << 11, 1u << 12, 1u << 13};
        cfg.cost = CostModel::exponential(1.0);
        cfg.degrees = DegreeSpec::pareto(2.0);
        cfg.rounds = 20;
    } else {
        throw std::invalid_argument("unknown experiment: " + experiment);
    }
    return cfg;
}

void ExperimentConfig::set_key(const std::string& key, const std::string& value) {
    if (key == "experiment") experiment = value;
    else if (key == "sizes") {
        sizes.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ','))
            sizes.push_back(static_cast<std::uint32_t>(std::stoul(trim(item))));
    } else if (key == "cost") cost = CostModel::parse(value);
    else if (key == "degrees") degrees = DegreeSpec::parse(value);
    else if (key == "alpha") alpha = std::stod(value);
    else if (key == "rounds") rounds = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "queries_mult") queries_mult = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "eval_mult") eval_mult = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "m") fifo_m = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "k_z") kz = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "graph_seeds") graph_seeds = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "workers") workers = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "seed") {
        seed = std::stoull(value);
        has_seed = true;
    } else if (key == "out") out_dir = value;
    else throw std::invalid_argument("unknown config key: " + key);
}

void ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line needs key = value: " + line);
        set_key(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> known = {"baseline",   "by-size",       "by-round",
                                                "two-degree", "decentralized", "general"};
    if (!known.count(experiment)) throw std::invalid_argument("unknown experiment: " + experiment);
    if (sizes.empty()) throw std::invalid_argument("config needs at least one size");
    for (std::uint32_t n : sizes)
        if (n < 2) throw std::invalid_argument("sizes must be >= 2");
    if (!has_seed) throw std::invalid_argument("config needs an explicit seed");
    if (rounds < 1 || queries_mult < 1 || eval_mult < 1 || graph_seeds < 1 || workers < 1 ||
        kz < 1 || fifo_m < 1)
        throw std::invalid_argument("config counts must be >= 1");
}

namespace {

struct Cell {
    CostGraph graph;
    std::uint64_t eval_seed = 0;
    std::uint64_t train_seed = 0;
};

Cell make_cell(const ExperimentConfig& cfg, std::uint32_t n, std::uint32_t rep) {
    GraphSpec spec;
    spec.n = n;
    spec.alpha = cfg.alpha;
    spec.degrees = cfg.degrees;
    spec.seed = derive_seed(cfg.seed, kCellGraph, n, rep);
    Cell cell{generate_graph(spec), derive_seed(cfg.seed, kCellEval, n, rep),
              derive_seed(cfg.seed, kCellTrain, n, rep)};
    return cell;
}

ExperimentRow row_from_stats(std::uint32_t size, std::string algorithm, std::uint32_t round,
                             const BatchStats& stats) {
    ExperimentRow row;
    row.size = size;
    row.algorithm = std::move(algorithm);
    row.round = round;
    row.mean_steps = stats.mean_steps;
    row.mean_cost = stats.mean_cost;
    row.ci95_steps = stats.ci95_steps;
    row.ci95_cost = stats.ci95_cost;
    row.queries = stats.queries;
    row.mean_log_dist = stats.mean_log_dist;
    return row;
}

BatchStats eval_cell(const Cell& cell, const ExperimentConfig& cfg, const Weighting* w,
                     const Stepper& stepper) {
    return evaluate_batch(cell.graph, cfg.cost, w, stepper,
                          cell.eval_seed, static_cast<std::uint64_t>(cfg.eval_mult) * cell.graph.size(),
                          cfg.workers);
}

EstimationConfig estimation_config(const ExperimentConfig& cfg, bool degree_conditioned) {
    EstimationConfig est;
    est.rounds = cfg.rounds;
    est.kz = cfg.kz;
    est.degree_conditioned = degree_conditioned;
    est.workers = cfg.workers;
    return est;
}

void run_size_experiment(const ExperimentConfig& cfg, std::vector<ExperimentRow>& rows) {
    for (std::uint32_t n : cfg.sizes) {
        const Cell cell = make_cell(cfg, n, 0);
        EstimationConfig est = estimation_config(cfg, false);
        est.queries_per_round = static_cast<std::uint64_t>(cfg.queries_mult) * n;
        const EstimationResult trained =
            iterate_to_fixpoint(cell.graph, cfg.cost, est, cell.train_seed);

        rows.push_back(row_from_stats(
            n, "greedy", 0, eval_cell(cell, cfg, nullptr, GreedyStepper{})));
        rows.push_back(row_from_stats(
            n, "cost-greedy", cfg.rounds,
            eval_cell(cell, cfg, &trained.weighting, ForwardWeightedStepper{})));
    }
}

void run_by_round_experiment(const ExperimentConfig& cfg, std::vector<ExperimentRow>& rows) {
    for (std::uint32_t n : cfg.sizes) {
        const Cell cell = make_cell(cfg, n, 0);
        rows.push_back(row_from_stats(
            n, "greedy", 0, eval_cell(cell, cfg, nullptr, GreedyStepper{})));

        EstimationConfig est = estimation_config(cfg, false);
        est.queries_per_round = static_cast<std::uint64_t>(cfg.queries_mult) * n;
        DistanceWeighting w = DistanceWeighting::zeros(n, cfg.kz, false);
        for (std::uint32_t r = 1; r <= cfg.rounds; ++r) {
            w = empirical_round(cell.graph, cfg.cost, w, est, cell.train_seed, r);
            rows.push_back(row_from_stats(
                n, "cost-greedy", r, eval_cell(cell, cfg, &w, ForwardWeightedStepper{})));
        }
    }
}

void run_two_degree_experiment(const ExperimentConfig& cfg, std::vector<ExperimentRow>& rows) {
    validate_stepper(StepperKind::Sj, cfg.cost);
    const std::vector<std::string> algos = {"greedy", "cost-greedy", "sj"};
    for (std::uint32_t n : cfg.sizes) {
        std::map<std::string, std::vector<BatchStats>> reps;
        for (std::uint32_t rep = 0; rep < cfg.graph_seeds; ++rep) {
            const Cell cell = make_cell(cfg, n, rep);
            EstimationConfig est = estimation_config(cfg, true);
            est.queries_per_round = static_cast<std::uint64_t>(cfg.queries_mult) * n;
            const EstimationResult trained =
                iterate_to_fixpoint(cell.graph, cfg.cost, est, cell.train_seed);

            reps["greedy"].push_back(eval_cell(cell, cfg, nullptr, GreedyStepper{}));
            reps["cost-greedy"].push_back(
                eval_cell(cell, cfg, &trained.weighting, ForwardWeightedStepper{}));
            reps["sj"].push_back(
                eval_cell(cell, cfg, nullptr, SjStepper::for_graph(cell.graph)));
        }
        // Pool the independent graph replicates.
        for (const std::string& algo : algos) {
            const auto& stats = reps[algo];
            ExperimentRow row;
            row.size = n;
            row.algorithm = algo;
            row.round = algo == "greedy" ? 0 : cfg.rounds;
            double ci_steps_sq = 0.0, ci_cost_sq = 0.0;
            for (const BatchStats& s : stats) {
                row.mean_steps += s.mean_steps;
                row.mean_cost += s.mean_cost;
                row.mean_log_dist += s.mean_log_dist;
                row.queries += s.queries;
                ci_steps_sq += s.ci95_steps * s.ci95_steps;
                ci_cost_sq += s.ci95_cost * s.ci95_cost;
            }
            const auto r = static_cast<double>(stats.size());
            row.mean_steps /= r;
            row.mean_cost /= r;
            row.mean_log_dist /= r;
            row.ci95_steps = std::sqrt(ci_steps_sq) / r;
            row.ci95_cost = std::sqrt(ci_cost_sq) / r;
            rows.push_back(std::move(row));
        }
    }
}

void run_decentralized_experiment_cells(const ExperimentConfig& cfg,
                                        std::vector<ExperimentRow>& rows,
                                        bool include_centralized) {
    for (std::uint32_t n : cfg.sizes) {
        const Cell cell = make_cell(cfg, n, 0);
        rows.push_back(row_from_stats(
            n, "greedy", 0, eval_cell(cell, cfg, nullptr, GreedyStepper{})));

        if (include_centralized) {
            EstimationConfig est = estimation_config(cfg, false);
            est.rounds = std::min<std::uint32_t>(cfg.rounds, 10);
            est.queries_per_round = static_cast<std::uint64_t>(cfg.queries_mult) * n;
            const EstimationResult trained =
                iterate_to_fixpoint(cell.graph, cfg.cost, est, cell.train_seed);
            rows.push_back(row_from_stats(
                n, "cost-greedy", est.rounds,
                eval_cell(cell, cfg, &trained.weighting, ForwardWeightedStepper{})));
        }

        DecentralizedNetwork net(cell.graph, cfg.cost, cfg.fifo_m);
        const std::uint64_t qpr = static_cast<std::uint64_t>(cfg.queries_mult) * n;
        const std::uint64_t decent_seed = derive_seed(cfg.seed, kCellDecent, n, 0);
        std::uint32_t done = 0;
        for (std::uint32_t checkpoint : {std::min<std::uint32_t>(cfg.rounds, 10), cfg.rounds}) {
            if (checkpoint <= done) continue;
            run_decentralized_experiment(net, done + 1, checkpoint, qpr, decent_seed);
            done = checkpoint;
            rows.push_back(row_from_stats(
                n, "decentralized", checkpoint,
                eval_cell(cell, cfg, &net.weighting(), ForwardWeightedStepper{})));
        }
    }
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ExperimentRow> rows;
    if (cfg.experiment == "baseline" || cfg.experiment == "by-size")
        run_size_experiment(cfg, rows);
    else if (cfg.experiment == "by-round")
        run_by_round_experiment(cfg, rows);
    else if (cfg.experiment == "two-degree")
        run_two_degree_experiment(cfg, rows);
    else if (cfg.experiment == "decentralized")
        run_decentralized_experiment_cells(cfg, rows, true);
    else if (cfg.experiment == "general")
        run_decentralized_experiment_cells(cfg, rows, false);
    return rows;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "size,algorithm,round,mean_steps,mean_cost,ci95_steps,ci95_cost,queries\n";
    for (const auto& r : rows)
        out << r.size << ',' << r.algorithm << ',' << r.round << ',' << r.mean_steps << ','
            << r.mean_cost << ',' << r.ci95_steps << ',' << r.ci95_cost << ',' << r.queries
            << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Plot output.

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct SeriesKey {
    std::string label;
    bool operator<(const SeriesKey& o) const { return label < o.label; }
};

std::vector<PlotSeries> series_for_metric(const std::vector<ExperimentRow>& rows,
                                          bool by_round, bool cost_metric) {
    // When an algorithm appears several times per size (decentralized
    // checkpoints), split its series by round.
    std::map<std::pair<std::string, std::uint32_t>, int> per_size;
    bool need_round_suffix = false;
    for (const auto& r : rows)
        if (++per_size[{r.algorithm, r.size}] > 1) need_round_suffix = true;

    std::map<std::string, PlotSeries> grouped;
    for (const auto& r : rows) {
        std::string name = r.algorithm;
        if (!by_round && need_round_suffix && r.round != 0)
            name += "@" + std::to_string(r.round);
        PlotPoint p;
        p.x = by_round ? static_cast<double>(r.round) : static_cast<double>(r.size);
        p.y = cost_metric ? r.mean_cost : r.mean_steps;
        p.ci = cost_metric ? r.ci95_cost : r.ci95_steps;
        auto& s = grouped[name];
        s.name = name;
        s.points.push_back(p);
    }
    std::vector<PlotSeries> series;
    for (auto& [name, s] : grouped) {
        std::sort(s.points.begin(), s.points.end(),
                  [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
        series.push_back(std::move(s));
    }
    return series;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series, bool log2_x) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 50;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            const double px = log2_x ? std::log2(p.x) : p.x;
            if (!any) {
                xmin = xmax = px;
                ymin = p.y - p.ci;
                ymax = p.y + p.ci;
                any = true;
            } else {
                xmin = std::min(xmin, px);
                xmax = std::max(xmax, px);
                ymin = std::min(ymin, p.y - p.ci);
                ymax = std::max(ymax, p.y + p.ci);
            }
        }
    }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 1.0; ymax += 1.0; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const auto sx = [&](double x) {
        const double v = log2_x ? std::log2(x) : x;
        return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr);
    };
    const auto sy = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << ' ' << height << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    // axes
    out << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='"
        << height - mb << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb
        << "' stroke='black'/>\n";
    out << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
        << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
    out << "<text x='16' y='" << (mt + height - mb) / 2
        << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
        << (mt + height - mb) / 2 << ")'>" << y_label << "</text>\n";

    // y ticks
    for (int t = 0; t <= 4; ++t) {
        const double y = ymin + (ymax - ymin) * t / 4.0;
        out << "<line x1='" << ml - 4 << "' y1='" << sy(y) << "' x2='" << ml << "' y2='" << sy(y)
            << "' stroke='black'/>\n";
        out << "<text x='" << ml - 8 << "' y='" << sy(y) + 4
            << "' text-anchor='end' font-size='11'>" << fmt(y) << "</text>\n";
    }
    // x ticks at data positions
    if (any) {
        std::set<double> xs;
        for (const auto& s : series)
            for (const auto& p : s.points) xs.insert(p.x);
        for (double x : xs) {
            out << "<line x1='" << sx(x) << "' y1='" << height - mb << "' x2='" << sx(x)
                << "' y2='" << height - mb + 4 << "' stroke='black'/>\n";
            std::string label;
            if (log2_x) {
                label = "2^" + std::to_string(static_cast<int>(std::lround(std::log2(x))));
            } else {
                label = fmt(x);
            }
            out << "<text x='" << sx(x) << "' y='" << height - mb + 18
                << "' text-anchor='middle' font-size='11'>" << label << "</text>\n";
        }
    }

    std::size_t color = 0;
    for (const auto& s : series) {
        const char* stroke = kPalette[color % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (s.points.size() > 1) {
            out << "<polyline fill='none' stroke='" << stroke << "' stroke-width='1.5' points='";
            for (const auto& p : s.points) out << sx(p.x) << ',' << sy(p.y) << ' ';
            out << "'/>\n";
        }
        for (const auto& p : s.points) {
            out << "<circle cx='" << sx(p.x) << "' cy='" << sy(p.y) << "' r='2.5' fill='"
                << stroke << "'/>\n";
            if (p.ci > 0) {
                const double x = sx(p.x);
                out << "<line x1='" << x << "' y1='" << sy(p.y - p.ci) << "' x2='" << x
                    << "' y2='" << sy(p.y + p.ci) << "' stroke='" << stroke << "'/>\n";
                out << "<line x1='" << x - 3 << "' y1='" << sy(p.y - p.ci) << "' x2='" << x + 3
                    << "' y2='" << sy(p.y - p.ci) << "' stroke='" << stroke << "'/>\n";
                out << "<line x1='" << x - 3 << "' y1='" << sy(p.y + p.ci) << "' x2='" << x + 3
                    << "' y2='" << sy(p.y + p.ci) << "' stroke='" << stroke << "'/>\n";
            }
        }
        // legend
        const double ly = mt + 16.0 * static_cast<double>(color);
        out << "<line x1='" << ml + 10 << "' y1='" << ly << "' x2='" << ml + 30 << "' y2='" << ly
            << "' stroke='" << stroke << "' stroke-width='2'/>\n";
        out << "<text x='" << ml + 36 << "' y='" << ly + 4 << "' font-size='12'>" << s.name
            << "</text>\n";
        ++color;
    }
    out << "</svg>\n";
}

void write_experiment_outputs(const ExperimentConfig& cfg,
                              const std::vector<ExperimentRow>& rows) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    fs::create_directories(dir);

    {
        std::ofstream csv(dir / (cfg.experiment + ".csv"));
        if (!csv) throw std::runtime_error("cannot write experiment csv");
        csv << rows_to_csv(rows);
    }

    const bool by_round = cfg.experiment == "by-round";
    const std::string x_label = by_round ? "round" : "network size";
    std::ofstream gp(dir / (cfg.experiment + ".gnuplot"));
    gp << "# gnuplot alternative to the generated SVG plots\n";
    gp << "set key left top\nset xlabel '" << x_label << "'\n";
    if (!by_round) gp << "set logscale x 2\n";
    gp << "set terminal svg size 720,480\n";

    for (const bool cost_metric : {true, false}) {
        const std::string metric = cost_metric ? "cost" : "steps";
        const auto series = series_for_metric(rows, by_round, cost_metric);
        write_svg_plot((dir / (cfg.experiment + "_" + metric + ".svg")).string(),
                       cfg.experiment + ": mean " + metric, x_label, "mean " + metric, series,
                       !by_round);

        gp << "set ylabel 'mean " << metric << "'\n";
        gp << "set output '" << cfg.experiment << "_" << metric << ".gp.svg'\n";
        std::string plot_cmd = "plot";
        for (const auto& s : series) {
            std::string safe = s.name;
            for (char& c : safe)
                if (c == '@' || c == ' ' || c == '/') c = '_';
            const std::string dat = cfg.experiment + "_" + safe + "_" + metric + ".dat";
            std::ofstream df(dir / dat);
            df.precision(17);
            for (const auto& p : s.points) df << p.x << ' ' << p.y << ' ' << p.ci << '\n';
            plot_cmd += " '" + dat + "' using 1:2:3 with yerrorlines title '" + s.name + "',";
        }
        if (!series.empty()) {
            plot_cmd.pop_back();
            gp << plot_cmd << "\n";
        }
    }
}

}  // namespace costgreedy
