#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "costgreedy/harness.hpp"

using namespace costgreedy;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const std::string& name) {
    ExperimentConfig cfg = ExperimentConfig::defaults(name);
    cfg.sizes = {256};
    cfg.rounds = 3;
    cfg.queries_mult = 4;
    cfg.eval_mult = 4;
    cfg.graph_seeds = 2;
    cfg.seed = 4242;
    cfg.has_seed = true;
    cfg.workers = 2;
    return cfg;
}

}  // namespace

TEST_CASE("experiment defaults") {
    CHECK(ExperimentConfig::defaults("baseline").sizes.front() == 1024);
    CHECK(ExperimentConfig::defaults("baseline").sizes.back() == 65536);
    CHECK(ExperimentConfig::defaults("by-size").cost.law() == CostLaw::Exponential);
    CHECK(ExperimentConfig::defaults("by-round").sizes == std::vector<std::uint32_t>{16384});
    CHECK(ExperimentConfig::defaults("two-degree").graph_seeds == 4);
    CHECK(ExperimentConfig::defaults("decentralized").rounds == 20);
    CHECK(ExperimentConfig::defaults("general").degrees.law == DegreeLaw::ParetoTail);
    CHECK_THROWS_AS(ExperimentConfig::defaults("nope"), std::invalid_argument);
}

TEST_CASE("config files parse key = value lines") {
    const fs::path path = fs::temp_directory_path() / "costgreedy_test.cfg";
    {
        std::ofstream out(path);
        out << "# comment\n";
        out << "experiment = by-size\n";
        out << "sizes = 128, 256\n";
        out << "cost = twopoint\n";
        out << "degrees = constant:2\n";
        out << "rounds = 4\n";
        out << "seed = 99\n";
        out << "workers = 2\n";
    }
    ExperimentConfig cfg = ExperimentConfig::defaults("baseline");
    cfg.load_file(path.string());
    CHECK(cfg.experiment == "by-size");
    CHECK(cfg.sizes == std::vector<std::uint32_t>{128, 256});
    CHECK(cfg.cost.law() == CostLaw::TwoPoint);
    CHECK(cfg.rounds == 4);
    CHECK(cfg.seed == 99);
    CHECK(cfg.has_seed);
    fs::remove(path);

    ExperimentConfig bad = ExperimentConfig::defaults("baseline");
    CHECK_THROWS_AS(bad.set_key("frobnicate", "1"), std::invalid_argument);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // seed missing
}

TEST_CASE("by-size experiment emits one greedy and one cost-greedy row per size") {
    ExperimentConfig cfg = small_config("by-size");
    cfg.sizes = {128, 256};
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].algorithm == "greedy");
    CHECK(rows[0].round == 0);
    CHECK(rows[1].algorithm == "cost-greedy");
    CHECK(rows[1].round == cfg.rounds);
    CHECK(rows[0].size == 128);
    CHECK(rows[2].size == 256);
    for (const auto& r : rows) {
        CHECK(r.queries == 4ull * r.size);
        CHECK(r.mean_steps > 0.0);
        CHECK(r.mean_cost > 0.0);
    }
}

TEST_CASE("experiments are byte-identical on rerun") {
    const ExperimentConfig cfg = small_config("by-size");
    const std::string a = rows_to_csv(run_experiment(cfg));
    const std::string b = rows_to_csv(run_experiment(cfg));
    CHECK(a == b);
    CHECK(a.rfind("size,algorithm,round,mean_steps,mean_cost,ci95_steps,ci95_cost,queries\n",
                  0) == 0);

    ExperimentConfig other = cfg;
    other.seed = cfg.seed + 1;
    CHECK(rows_to_csv(run_experiment(other)) != a);
}

TEST_CASE("by-round rows carry the round index") {
    const ExperimentConfig cfg = small_config("by-round");
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 1 + cfg.rounds);  // greedy + one row per round
    CHECK(rows[0].algorithm == "greedy");
    for (std::uint32_t r = 1; r <= cfg.rounds; ++r) {
        CHECK(rows[r].algorithm == "cost-greedy");
        CHECK(rows[r].round == r);
    }
}

TEST_CASE("two-degree experiment pools graph replicates and validates sj") {
    ExperimentConfig cfg = small_config("two-degree");
    cfg.degrees = DegreeSpec::two_type(0.1, 12, 2);
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].algorithm == "greedy");
    CHECK(rows[1].algorithm == "cost-greedy");
    CHECK(rows[2].algorithm == "sj");
    for (const auto& r : rows) CHECK(r.queries == 2ull * 4 * 256);  // pooled replicates

    ExperimentConfig bad = cfg;
    bad.cost = CostModel::exponential(1.0);
    CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
}

TEST_CASE("decentralized experiment emits checkpoint rows") {
    ExperimentConfig cfg = small_config("decentralized");
    cfg.rounds = 12;
    const auto rows = run_experiment(cfg);
    // greedy, centralized cost-greedy, decentralized@10, decentralized@12
    REQUIRE(rows.size() == 4);
    CHECK(rows[2].algorithm == "decentralized");
    CHECK(rows[2].round == 10);
    CHECK(rows[3].round == 12);

    ExperimentConfig gen = small_config("general");
    gen.rounds = 4;
    const auto grows = run_experiment(gen);
    REQUIRE(grows.size() == 2);  // greedy + decentralized@4 (no centralized arm)
    CHECK(grows[1].algorithm == "decentralized");
    CHECK(grows[1].round == 4);
}

TEST_CASE("experiment outputs land on disk") {
    ExperimentConfig cfg = small_config("by-size");
    const fs::path dir = fs::temp_directory_path() / "costgreedy_outputs";
    fs::remove_all(dir);
    cfg.out_dir = dir.string();
    write_experiment_outputs(cfg, run_experiment(cfg));
    CHECK(fs::exists(dir / "by-size.csv"));
    CHECK(fs::exists(dir / "by-size_cost.svg"));
    CHECK(fs::exists(dir / "by-size_steps.svg"));
    CHECK(fs::exists(dir / "by-size.gnuplot"));
    bool any_dat = false;
    for (const auto& entry : fs::directory_iterator(dir))
        any_dat |= entry.path().extension() == ".dat";
    CHECK(any_dat);

    // log2-spaced x ticks in the size plot
    std::ifstream svg(dir / "by-size_cost.svg");
    std::stringstream buf;
    buf << svg.rdbuf();
    CHECK(buf.str().find("2^8") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("svg writer copes with degenerate input") {
    const fs::path dir = fs::temp_directory_path() / "costgreedy_svg";
    fs::create_directories(dir);

    SUBCASE("empty series") {
        const fs::path path = dir / "empty.svg";
        write_svg_plot(path.string(), "empty", "x", "y", {}, true);
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        CHECK(buf.str().find("<svg") != std::string::npos);  // axes only, no crash
    }
    SUBCASE("single point with whiskers") {
        PlotSeries s;
        s.name = "only";
        s.points.push_back({64.0, 3.0, 0.5});
        const fs::path path = dir / "single.svg";
        write_svg_plot(path.string(), "single", "x", "y", {s}, false);
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        CHECK(buf.str().find("circle") != std::string::npos);
        CHECK(buf.str().find("only") != std::string::npos);
    }
    fs::remove_all(dir);
}
