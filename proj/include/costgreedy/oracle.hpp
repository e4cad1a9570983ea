#pragma once
// Independent verifiers: exhaustive forward-policy enumeration against the
// exact fixed point, fixed-point convergence and per-rank freezing,
// perturbation (approximation) bounds, the Wald identity for the min-edge
// tally, and the log n * log d scaling consistency check. These deliberately
// avoid the implementation paths they audit: the policy evaluator prices an
// explicit decision table, not the runtime stepper.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "costgreedy/costs.hpp"
#include "costgreedy/search.hpp"
#include "costgreedy/topology.hpp"
#include "costgreedy/weights.hpp"

namespace costgreedy {

// A forward search as a lookup table: for each vertex x != dest, one chosen
// forward edge per joint realized-cost tuple on x's forward edges. Tuples
// are indexed little-endian in the model's support: digit j (for the j-th
// forward edge in ascending edge-id order) contributes support_index * s^j.
struct ForwardPolicy {
    VertexId dest = 0;
    std::vector<std::vector<std::uint8_t>> choices;  // [x][tuple_index] -> forward slot
};

std::uint64_t tuple_count(std::size_t support_size, std::size_t forward_degree);

// The policy induced by weights w: argmin cost + w(y) with the deterministic
// tie-break (distance, vertex id, edge id).
ForwardPolicy policy_from_weights(const CostGraph& g, const CostModel& m,
                                  const FullWeightTable& w, VertexId z);

// Exact per-vertex E[T^z(x; policy)] by rank-order recursion.
std::vector<double> policy_expected_cost(const CostGraph& g, const CostModel& m,
                                         const ForwardPolicy& policy, VertexId z,
                                         std::uint64_t max_terms = 10'000'000);

// Exact step-count distribution: out[x][k] = P(S^z(x; policy) = k).
std::vector<std::vector<double>> policy_step_distribution(const CostGraph& g,
                                                          const CostModel& m,
                                                          const ForwardPolicy& policy,
                                                          VertexId z);

// Monte Carlo of the same decision table (for cross-checking the recursion).
BatchStats simulate_policy(const CostGraph& g, const CostModel& m, const ForwardPolicy& policy,
                           VertexId x, VertexId z, std::uint64_t seed, std::uint64_t queries);

struct CheckRow {
    std::string check;
    std::string instance;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct Report {
    std::vector<CheckRow> rows;
    bool pass = true;

    void add(std::string check, std::string instance, double value, double bound, bool ok);
};

void write_report_csv(const Report& report, std::ostream& out);  // check,instance,value,bound,pass

// Theorem-2 oracle: enumerate every forward policy (guarded by policy_limit)
// and require the per-vertex minimum to match the exact fixed point within
// tol, with no policy ever beating it.
Report verify_optimality(const CostGraph& g, const CostModel& m, VertexId z,
                         const std::string& instance, double tol = 1e-9,
                         double policy_limit = 1e6);

// Theorem-1 oracle: iteration from w0 = 0 and w0 = 100 converges to the same
// vector within n-1 passes, and the value of the rank-r vertex never changes
// after pass r.
Report verify_fixpoint_convergence(const CostGraph& g, const CostModel& m, VertexId z,
                                   const std::string& instance, double tol = 1e-9);

// Proposition-3 oracle: for sign perturbations of size epsilon, the exact
// regret is at most 2 n epsilon, and the per-step form holds for every k.
Report verify_approximation_bound(const CostGraph& g, const CostModel& m, VertexId z,
                                  double epsilon, std::uint32_t draws, std::uint64_t seed,
                                  const std::string& instance, double tol = 1e-9);

// Wald-identity check on a constant out-degree graph:
// |mean(R) - E[C_min(degree)] * mean(S)| <= 3 standard errors of R - c S.
struct WaldEntry {
    std::string label;
    StepperKind kind;
    const Weighting* weighting = nullptr;  // for cost-greedy
};
Report verify_wald(const CostGraph& g, const CostModel& m, const std::vector<WaldEntry>& entries,
                   std::uint64_t queries, std::uint64_t seed);

// Scaling consistency: mean cost / (ln n * mean ln d) for trained cost-greedy
// varies by < 25% across the top three sizes, and cost-greedy never costs
// more than greedy.
Report verify_scaling(const std::vector<std::uint32_t>& sizes, const CostModel& m,
                      std::uint64_t seed, std::uint32_t workers = 1);

// Random tiny instances (n in {4,5,6}, ring plus at most two shortcuts,
// two-point cost support) for the exhaustive checks above.
struct TinyInstance {
    CostGraph graph;
    CostModel model;
    VertexId dest = 0;
    std::string label;
};
std::vector<TinyInstance> make_tiny_instances(std::size_t count, std::uint64_t seed);

}  // namespace costgreedy
