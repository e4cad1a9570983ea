#include "costgreedy/weights.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace costgreedy {

FullWeightTable FullWeightTable::fill(std::uint32_t n, VertexId dest, double value) {
    FullWeightTable t;
    t.dest = dest;
    t.values.assign(n, value);
    t.values[dest] = 0.0;
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

}  // namespace

FullWeightTable exact_iterate(const CostGraph& g, const CostModel& m, const FullWeightTable& w,
                              VertexId z, std::uint64_t max_terms) {
    if (!m.discrete())
        throw std::invalid_argument("exact iteration requires a finite cost support");
    if (w.dest != z || w.values.size() != g.size())
        throw std::invalid_argument("weight table does not match graph/destination");

    const auto support = m.support();
    const auto probs = m.probs();
    const std::size_t s = support.size();

    FullWeightTable next;
    next.dest = z;
    next.values.assign(g.size(), 0.0);

    for (VertexId x : rank_order(g, z)) {
        const auto fwd = forward_neighbors(g, x, z);
        const std::size_t k = fwd.size();
        if (static_cast<double>(k) * std::log(static_cast<double>(s)) >
            std::log(static_cast<double>(max_terms)))
            throw std::runtime_error("exact iteration: cost-tuple enumeration too large");

        std::vector<std::uint32_t> dist(k);
        for (std::size_t j = 0; j < k; ++j) dist[j] = g.distance(fwd[j].second, z);

        // Odometer over the joint cost tuple on x's forward edges.
        std::vector<std::size_t> digit(k, 0);
        double expected = 0.0;
        while (true) {
            double prob = 1.0;
            for (std::size_t j = 0; j < k; ++j) prob *= probs[digit[j]];

            // Decision under the INPUT weighting w; mirrors
            // forward_weighted_step's tie-breaking exactly.
            std::size_t best = 0;
            double best_score = 0.0;
            std::uint32_t best_dist = 0;
            VertexId best_target = 0;
            bool found = false;
            for (std::size_t j = 0; j < k; ++j) {
                const double score = support[digit[j]] + w.values[fwd[j].second];
                const VertexId y = fwd[j].second;
                if (!found || score < best_score ||
                    (score == best_score &&
                     (dist[j] < best_dist || (dist[j] == best_dist && y < best_target)))) {
                    best = j;
                    best_score = score;
                    best_dist = dist[j];
                    best_target = y;
                    found = true;
                }
            }
            // Continuation priced with the already-finalized next-pass value
            // of the (strictly closer) chosen vertex.
            expected += prob * (support[digit[best]] + next.values[fwd[best].second]);

            std::size_t carry = 0;
            while (carry < k && ++digit[carry] == s) digit[carry++] = 0;
            if (carry == k) break;
        }
        next.values[x] = expected;
    }
    return next;
}

ExactFixpointResult exact_fixpoint(const CostGraph& g, const CostModel& m, VertexId z,
                                   const FullWeightTable* w0, bool keep_trace) {
    ExactFixpointResult result;
    FullWeightTable w = w0 ? *w0 : FullWeightTable::fill(g.size(), z, 0.0);
    w.values[z] = 0.0;
    if (keep_trace) result.trace.push_back(w);
    for (std::uint32_t i = 1; i <= g.size(); ++i) {
        FullWeightTable next = exact_iterate(g, m, w, z);
        if (keep_trace) result.trace.push_back(next);
        double delta = 0.0;
        for (std::uint32_t x = 0; x < g.size(); ++x)
            delta = std::max(delta, std::abs(next.values[x] - w.values[x]));
        w = std::move(next);
        if (delta <= 1e-12) {
            result.iterations = i - 1;  // w_{i-1} already equalled w_i
            result.weights = std::move(w);
            return result;
        }
    }
    throw std::runtime_error("exact fixpoint did not converge within n iterations");
}

// ---------------------------------------------------------------------------

ZonedWeights ZonedWeights::zeros(std::uint32_t n, std::uint32_t kz) {
    if (n < 2 || kz < 1) throw std::invalid_argument("zoned weights need n >= 2, kz >= 1");
    ZonedWeights zw;
    zw.n = n;
    zw.kz = kz;
    const std::uint32_t zones = zone_count(n);
    zw.values.assign(static_cast<std::size_t>(zones) * kz, 0.0);
    zw.positions.resize(zw.values.size());
    for (std::uint32_t zone = 0; zone < zones; ++zone) {
        const std::uint32_t width = 1u << zone;
        for (std::uint32_t j = 0; j < kz; ++j) {
            // Smallest d in the zone that maps to slot j (so lookups at the
            // recorded position hit this entry).
            std::uint32_t pos = width + (j * width + kz - 1) / kz;
            pos = std::min({pos, 2 * width - 1, n - 1});
            zw.positions[zone * kz + j] = pos;
        }
    }
    return zw;
}

std::uint32_t ZonedWeights::entry_of(std::uint32_t d) const {
    const std::uint32_t zone = zone_of(d);
    const std::uint32_t width = 1u << zone;
    const std::uint32_t slot = static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(d - width) * kz / width);
    return zone * kz + slot;
}

ZonedWeights compress(const std::vector<double>& full, std::uint32_t kz) {
    const auto n = static_cast<std::uint32_t>(full.size());
    ZonedWeights zw = ZonedWeights::zeros(n, kz);
    const std::uint32_t zones = zone_count(n);
    if (kz == 1) {
        for (std::uint32_t zone = 0; zone < zones; ++zone) {
            const std::uint32_t lo = 1u << zone;
            const std::uint32_t hi = std::min(2 * lo, n);
            double sum = 0.0;
            for (std::uint32_t d = lo; d < hi; ++d) sum += full[d];
            zw.values[zone] = sum / (hi - lo);
        }
    } else {
        for (std::size_t e = 0; e < zw.values.size(); ++e)
            zw.values[e] = full[zw.positions[e]];
    }
    return zw;
}

void save_weights_csv(const ZonedWeights& w, std::ostream& out) {
    out << "zone,position,value\n";
    out.precision(17);
    for (std::size_t e = 0; e < w.values.size(); ++e)
        out << e / w.kz << ',' << w.positions[e] << ',' << w.values[e] << '\n';
}

ZonedWeights load_weights_csv(std::istream& in, std::uint32_t n, std::uint32_t kz) {
    ZonedWeights zw = ZonedWeights::zeros(n, kz);
    std::string line;
    std::getline(in, line);  // header
    std::size_t e = 0;
    while (std::getline(in, line) && e < zw.values.size()) {
        std::istringstream row(line);
        std::string zone, pos, value;
        if (!std::getline(row, zone, ',') || !std::getline(row, pos, ',') ||
            !std::getline(row, value, ','))
            throw std::runtime_error("weights csv row malformed: " + line);
        zw.positions[e] = static_cast<std::uint32_t>(std::stoul(pos));
        zw.values[e] = std::stod(value);
        ++e;
    }
    if (e != zw.values.size()) throw std::runtime_error("weights csv truncated");
    return zw;
}

// ---------------------------------------------------------------------------

DistanceWeighting::DistanceWeighting(ZonedWeights zw) { per_class_.push_back(std::move(zw)); }

DistanceWeighting::DistanceWeighting(std::vector<ZonedWeights> per_class)
    : per_class_(std::move(per_class)) {
    if (per_class_.empty()) throw std::invalid_argument("empty class table");
}

DistanceWeighting DistanceWeighting::zeros(std::uint32_t n, std::uint32_t kz,
                                           bool degree_conditioned) {
    const std::uint32_t classes = degree_conditioned ? std::bit_width(n) : 1;
    std::vector<ZonedWeights> table;
    table.reserve(classes);
    for (std::uint32_t c = 0; c < classes; ++c) table.push_back(ZonedWeights::zeros(n, kz));
    return DistanceWeighting(std::move(table));
}

void EstimationConfig::validate() const {
    if (rounds < 1 || kz < 1 || workers < 1)
        throw std::invalid_argument("estimation config counts must be >= 1");
}

namespace {

struct RoundAccumulator {
    std::vector<double> sums;
    std::vector<std::uint64_t> counts;
    double cost_sum = 0.0, cost_sq = 0.0;
    double steps_sum = 0.0, steps_sq = 0.0;

    explicit RoundAccumulator(std::size_t cells) : sums(cells, 0.0), counts(cells, 0) {}

    void merge(const RoundAccumulator& other) {
        for (std::size_t i = 0; i < sums.size(); ++i) {
            sums[i] += other.sums[i];
            counts[i] += other.counts[i];
        }
        cost_sum += other.cost_sum;
        cost_sq += other.cost_sq;
        steps_sum += other.steps_sum;
        steps_sq += other.steps_sq;
    }
};

void run_block(const CostGraph& g, const CostModel& m, const DistanceWeighting& w,
               std::uint32_t entries, std::uint64_t seed, std::uint32_t round_index,
               std::uint64_t lo, std::uint64_t hi, RoundAccumulator& acc) {
    const std::uint32_t n = g.size();
    const bool by_class = w.degree_conditioned();
    SearchResult result;
    SearchScratch scratch;
    const ZonedWeights& shape = w.vector_for_class(0);
    for (std::uint64_t i = lo; i < hi; ++i) {
        SplitMix64 pair_rng(derive_seed(seed, stream::kTrainPairs, round_index, i));
        const auto x = static_cast<VertexId>(pair_rng.below(n));
        const auto zr = static_cast<VertexId>(pair_rng.below(n - 1));
        const VertexId z = zr + (zr >= x ? 1 : 0);
        CostAssignment costs(m, derive_seed(seed, stream::kTrainCosts, round_index, i));
        run_search(g, costs, &w, ForwardWeightedStepper{}, x, z, result, scratch);

        double remaining = result.cost;
        for (std::uint32_t j = 0; j < result.steps; ++j) {
            const VertexId v = result.path[j];
            const std::uint32_t d = g.distance(v, z);
            std::uint32_t cell = shape.entry_of(d);
            if (by_class) {
                std::uint32_t cls = degree_class(g.out_degree(v));
                if (cls >= w.class_count()) cls = w.class_count() - 1;
                cell += cls * entries;
            }
            acc.sums[cell] += remaining;
            acc.counts[cell] += 1;
            remaining -= result.step_costs[j];
        }
        acc.cost_sum += result.cost;
        acc.cost_sq += result.cost * result.cost;
        acc.steps_sum += result.steps;
        acc.steps_sq += static_cast<double>(result.steps) * result.steps;
    }
}

double ci95(double sum, double sq, std::uint64_t count) {
    if (count < 2) return 0.0;
    const double mean = sum / static_cast<double>(count);
    const double var =
        std::max(0.0, (sq - mean * mean * static_cast<double>(count)) /
                          static_cast<double>(count - 1));
    return 1.96 * std::sqrt(var / static_cast<double>(count));
}

}  // namespace

DistanceWeighting empirical_round(const CostGraph& g, const CostModel& m,
                                  const DistanceWeighting& w, const EstimationConfig& cfg,
                                  std::uint64_t seed, std::uint32_t round_index,
                                  RoundDiagnostics* diag) {
    cfg.validate();
    const std::uint64_t queries = cfg.resolved_queries(g.size());
    const std::uint32_t entries = w.vector_for_class(0).entries();
    const std::size_t cells = static_cast<std::size_t>(entries) * w.class_count();

    RoundAccumulator total(cells);
    const std::uint32_t workers = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(cfg.workers, std::max<std::uint64_t>(queries, 1)));
    if (workers <= 1) {
        run_block(g, m, w, entries, seed, round_index, 0, queries, total);
    } else {
        std::vector<RoundAccumulator> partial(workers, RoundAccumulator(cells));
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::uint32_t t = 0; t < workers; ++t) {
            const std::uint64_t lo = queries * t / workers;
            const std::uint64_t hi = queries * (t + 1) / workers;
            threads.emplace_back([&, t, lo, hi] {
                run_block(g, m, w, entries, seed, round_index, lo, hi, partial[t]);
            });
        }
        for (auto& th : threads) th.join();
        // Deterministic reduction in worker-index order.
        for (std::uint32_t t = 0; t < workers; ++t) total.merge(partial[t]);
    }

    std::vector<ZonedWeights> next;
    next.reserve(w.class_count());
    for (std::uint32_t cls = 0; cls < w.class_count(); ++cls) {
        ZonedWeights zw = w.vector_for_class(cls);
        for (std::uint32_t e = 0; e < entries; ++e) {
            const std::size_t cell = static_cast<std::size_t>(cls) * entries + e;
            if (total.counts[cell] > 0)
                zw.values[e] = total.sums[cell] / static_cast<double>(total.counts[cell]);
            // else: carry the previous round's value forward
        }
        next.push_back(std::move(zw));
    }

    if (diag) {
        diag->round = round_index;
        diag->queries = queries;
        diag->mean_cost = total.cost_sum / static_cast<double>(queries);
        diag->mean_steps = total.steps_sum / static_cast<double>(queries);
        diag->ci95_cost = ci95(total.cost_sum, total.cost_sq, queries);
        diag->ci95_steps = ci95(total.steps_sum, total.steps_sq, queries);
    }
    return DistanceWeighting(std::move(next));
}

EstimationResult iterate_to_fixpoint(const CostGraph& g, const CostModel& m,
                                     const EstimationConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    EstimationResult result;
    result.weighting = DistanceWeighting::zeros(g.size(), cfg.kz, cfg.degree_conditioned);
    result.rounds.reserve(cfg.rounds);
    for (std::uint32_t r = 1; r <= cfg.rounds; ++r) {
        RoundDiagnostics diag;
        result.weighting = empirical_round(g, m, result.weighting, cfg, seed, r, &diag);
        result.rounds.push_back(diag);
    }
    return result;
}

void save_diagnostics_csv(const std::vector<RoundDiagnostics>& rounds, std::ostream& out) {
    out << "round,mean_cost,mean_steps,ci95_cost\n";
    out.precision(17);
    for (const auto& r : rounds)
        out << r.round << ',' << r.mean_cost << ',' << r.mean_steps << ',' << r.ci95_cost
            << '\n';
}

}  // namespace costgreedy
