#include <doctest.h>

#include <stdexcept>

#include <sstream>

#include "costgreedy/decentralized.hpp"

using namespace costgreedy;

TEST_CASE("empty buffers behave as lowest-cost-forward") {
    GraphSpec spec;
    spec.n = 64;
    spec.alpha = 1.0;
    spec.degrees = DegreeSpec::constant(3);
    spec.seed = 2;
    const CostGraph g = generate_graph(spec);
    const CostModel m = CostModel::exponential(1.0);
    DecentralizedNetwork net(g, m, 20);

    ZeroWeighting zero;
    for (std::uint64_t q = 0; q < 16; ++q) {
        const VertexId x = static_cast<VertexId>((q * 11) % 64);
        const VertexId z = static_cast<VertexId>((q * 17 + 5) % 64);
        if (x == z) continue;
        const SearchResult expect =
            run_search(g, CostAssignment(m, q), &zero, ForwardWeightedStepper{}, x, z);
        DecentralizedNetwork fresh(g, m, 20);  // all weights still zero
        const SearchResult got = fresh.route_query(x, z, q);
        CHECK(got.path == expect.path);
        CHECK(got.cost == doctest::Approx(expect.cost));
    }
}

TEST_CASE("single-hop query feeds the category-0 buffer") {
    const CostGraph ring = build_graph(8, 1.0, 0, std::vector<std::vector<VertexId>>(8));
    const CostModel m = CostModel::exponential(1.0);
    DecentralizedNetwork net(ring, m, 20);

    const SearchResult r = net.route_query(3, 4, 99);
    CHECK(r.steps == 1);
    const double edge_cost = CostAssignment(m, 99)(ring.first_edge(3));
    CHECK(r.cost == doctest::Approx(edge_cost));
    CHECK(net.buffer_len(3, 0) == 1);
    CHECK(net.node_weight(3, 0) == doctest::Approx(edge_cost));
}

TEST_CASE("buffers hold at most the capacity, evicting the oldest") {
    const CostGraph tiny = build_graph(2, 1.0, 0, std::vector<std::vector<VertexId>>(2));
    const CostModel m = CostModel::exponential(1.0);
    const std::uint32_t capacity = 5;
    DecentralizedNetwork net(tiny, m, capacity);

    double last[5] = {0, 0, 0, 0, 0};
    for (std::uint64_t q = 0; q < 12; ++q) {
        const SearchResult r = net.route_query(0, 1, 1000 + q);
        last[q % capacity] = r.cost;
        CHECK(net.buffer_len(0, 0) == std::min<std::uint32_t>(q + 1, capacity));
    }
    double mean = 0.0;
    for (double v : last) mean += v;
    mean /= capacity;
    CHECK(net.node_weight(0, 0) == doctest::Approx(mean));
}

TEST_CASE("starvation reset boundary is a strict quarter") {
    // Vertex 0 initiates 8 queries: 2 at distance 1 (category 0) and 6 at
    // distance 5 (category 2). Category 0 receives exactly a quarter of the
    // self count, so it must NOT be reset; category 1 received nothing.
    const CostGraph ring = build_graph(8, 1.0, 0, std::vector<std::vector<VertexId>>(8));
    const CostModel ones = CostModel::constant(1.0);
    DecentralizedNetwork net(ring, ones, 4);

    for (std::uint64_t q = 0; q < 2; ++q) net.route_query(0, 1, q);
    for (std::uint64_t q = 2; q < 8; ++q) net.route_query(0, 5, q);
    REQUIRE(net.buffer_len(0, 0) == 2);
    REQUIRE(net.node_weight(0, 0) == doctest::Approx(1.0));
    REQUIRE(net.buffer_len(0, 2) == 4);  // capacity reached

    net.reset_check();

    // category 0: received 2, self 8 -> 2 < 2 is false, kept
    CHECK(net.buffer_len(0, 0) == 2);
    CHECK(net.node_weight(0, 0) == doctest::Approx(1.0));
    // category 1: received 0 < 2 -> zeroed to capacity
    CHECK(net.buffer_len(0, 1) == 4);
    CHECK(net.node_weight(0, 1) == 0.0);
    // category 2: received 6 >= 2, kept
    CHECK(net.buffer_len(0, 2) == 4);
    CHECK(net.node_weight(0, 2) == doctest::Approx(5.0));  // remaining cost from d=5

    SUBCASE("counters restart after the interval") {
        net.route_query(0, 1, 50);
        net.reset_check();  // self=1, category 0 received 1: 4 >= 1, kept
        CHECK(net.node_weight(0, 0) > 0.0);
    }
}

TEST_CASE("a zeroed category makes the vertex maximally attractive") {
    const CostGraph ring = build_graph(8, 1.0, 0, std::vector<std::vector<VertexId>>(8));
    const CostModel ones = CostModel::constant(1.0);
    DecentralizedNetwork net(ring, ones, 3);
    net.route_query(0, 4, 1);  // vertex 0 records into category 2 only
    net.reset_check();
    // initiator 0: categories 0 and 1 starved (received 0 of 1 self query)
    CHECK(net.buffer_len(0, 0) == 3);
    CHECK(net.node_weight(0, 0) == 0.0);
    CHECK(net.buffer_len(0, 1) == 3);
    CHECK(net.node_weight(0, 1) == 0.0);
    CHECK(net.node_weight(0, 2) == doctest::Approx(4.0));  // kept
    // transit vertices initiated nothing, so nothing is starved for them
    CHECK(net.node_weight(1, 1) == doctest::Approx(3.0));  // d(1,4)=3
    CHECK(net.node_weight(3, 0) == doctest::Approx(1.0));  // d(3,4)=1
}

TEST_CASE("decentralized runs are deterministic") {
    GraphSpec spec;
    spec.n = 128;
    spec.alpha = 1.0;
    spec.degrees = DegreeSpec::constant(4);
    spec.seed = 31;
    const CostGraph g = generate_graph(spec);
    const CostModel m = CostModel::exponential(1.0);

    std::ostringstream snap_a, snap_b;
    DecentralizedNetwork a(g, m, 20), b(g, m, 20);
    const auto diag_a = run_decentralized_experiment(a, 3, 500, 77);
    const auto diag_b = run_decentralized_experiment(b, 3, 500, 77);
    REQUIRE(diag_a.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(diag_a[r].mean_cost == diag_b[r].mean_cost);
        CHECK(diag_a[r].mean_steps == diag_b[r].mean_steps);
    }
    a.snapshot_csv(snap_a);
    b.snapshot_csv(snap_b);
    CHECK(snap_a.str() == snap_b.str());
    CHECK(snap_a.str().rfind("vertex,category,buffer_mean,buffer_len,received,self_count\n",
                             0) == 0);

    SUBCASE("a split schedule matches a straight run") {
        DecentralizedNetwork c(g, m, 20);
        run_decentralized_experiment(c, 1, 2, 500, 77);
        run_decentralized_experiment(c, 3, 3, 500, 77);
        std::ostringstream snap_c;
        c.snapshot_csv(snap_c);
        CHECK(snap_c.str() == snap_a.str());
    }
}

TEST_CASE("learning lowers the mean cost below the cold start") {
    GraphSpec spec;
    spec.n = 512;
    spec.alpha = 1.0;
    spec.degrees = DegreeSpec::log2_of_n();
    spec.seed = 3;
    const CostGraph g = generate_graph(spec);
    const CostModel m = CostModel::exponential(1.0);
    DecentralizedNetwork net(g, m, 20);
    const auto diag = run_decentralized_experiment(net, 8, 20ull * spec.n, 5);
    CHECK(diag.back().mean_cost < diag.front().mean_cost);

    const BatchStats greedy = evaluate_batch(g, m, nullptr, GreedyStepper{}, 91, 5120);
    const BatchStats frozen =
        evaluate_batch(g, m, &net.weighting(), ForwardWeightedStepper{}, 91, 5120);
    CHECK(frozen.mean_cost < greedy.mean_cost);
}
