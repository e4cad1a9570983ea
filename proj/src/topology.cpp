#include "costgreedy/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace costgreedy {

DegreeSpec DegreeSpec::constant(std::uint32_t q) {
    DegreeSpec s;
    s.law = DegreeLaw::Constant;
    s.count = q;
    return s;
}

DegreeSpec DegreeSpec::two_type(double frac_a, std::uint32_t count_a, std::uint32_t count_b) {
    DegreeSpec s;
    s.law = DegreeLaw::TwoType;
    s.frac_a = frac_a;
    s.count_a = count_a;
    s.count_b = count_b;
    return s;
}

DegreeSpec DegreeSpec::pareto(double tail_exponent) {
    DegreeSpec s;
    s.law = DegreeLaw::ParetoTail;
    s.tail_exponent = tail_exponent;
    return s;
}

DegreeSpec DegreeSpec::log2_of_n() {
    DegreeSpec s;
    s.law = DegreeLaw::Log2OfN;
    return s;
}

DegreeSpec DegreeSpec::parse(const std::string& text) {
    if (text == "log2") return log2_of_n();
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "constant") return constant(static_cast<std::uint32_t>(std::stoul(args)));
    if (kind == "pareto") return pareto(std::stod(args));
    if (kind == "twotype") {
        std::stringstream ss(args);
        std::string p, a, b;
        if (!std::getline(ss, p, ',') || !std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw std::invalid_argument("twotype needs frac,count_a,count_b: " + text);
        return two_type(std::stod(p), static_cast<std::uint32_t>(std::stoul(a)),
                        static_cast<std::uint32_t>(std::stoul(b)));
    }
    throw std::invalid_argument("unknown degree spec: " + text);
}

std::string DegreeSpec::to_string() const {
    switch (law) {
        case DegreeLaw::Constant:
            return "constant:" + std::to_string(count);
        case DegreeLaw::Log2OfN:
            return "log2";
        case DegreeLaw::TwoType: {
            std::ostringstream os;
            os << "twotype:" << frac_a << ',' << count_a << ',' << count_b;
            return os.str();
        }
        case DegreeLaw::ParetoTail: {
            std::ostringstream os;
            os << "pareto:" << tail_exponent;
            return os.str();
        }
    }
    return "";
}

void GraphSpec::validate() const {
    if (n < 2) throw std::invalid_argument("graph size must be >= 2");
    if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
    switch (degrees.law) {
        case DegreeLaw::Constant:
        case DegreeLaw::Log2OfN:
            break;
        case DegreeLaw::TwoType:
            if (degrees.frac_a <= 0 || degrees.frac_a >= 1)
                throw std::invalid_argument("two-type fraction must lie in (0,1)");
            break;
        case DegreeLaw::ParetoTail:
            if (degrees.tail_exponent <= 1)
                throw std::invalid_argument("pareto tail exponent must be > 1");
            break;
    }
}

CostGraph::CostGraph(std::uint32_t n, double alpha, std::uint64_t seed,
                     std::vector<std::uint32_t> offsets, std::vector<VertexId> targets)
    : n_(n), alpha_(alpha), seed_(seed), offsets_(std::move(offsets)),
      targets_(std::move(targets)) {}

double CostGraph::harmonic_normalizer() const {
    double h = 0.0;
    for (std::uint32_t d = 1; d < n_; ++d) h += std::pow(static_cast<double>(d), -alpha_);
    return h;
}

std::vector<double> shortcut_distance_probs(std::uint32_t n, double alpha) {
    if (n < 2) throw std::invalid_argument("shortcut distribution needs n >= 2");
    std::vector<double> probs(n - 1);
    double total = 0.0;
    for (std::uint32_t d = 1; d < n; ++d) {
        probs[d - 1] = std::pow(static_cast<double>(d), -alpha);
        total += probs[d - 1];
    }
    for (double& p : probs) p /= total;
    return probs;
}

namespace {

// Per-vertex shortcut counts under the spec's degree law.
std::vector<std::uint32_t> draw_shortcut_counts(const GraphSpec& spec) {
    const std::uint32_t n = spec.n;
    std::vector<std::uint32_t> counts(n);
    SplitMix64 rng(derive_seed(spec.seed, stream::kDegrees));
    switch (spec.degrees.law) {
        case DegreeLaw::Constant:
            std::fill(counts.begin(), counts.end(), spec.degrees.count);
            break;
        case DegreeLaw::Log2OfN: {
            const auto q =
                static_cast<std::uint32_t>(std::lround(std::log2(static_cast<double>(n))));
            std::fill(counts.begin(), counts.end(), q);
            break;
        }
        case DegreeLaw::TwoType: {
            // Exact quota: the first floor(frac_a * n) vertices of a seeded
            // shuffle get count_a, everyone else count_b.
            std::vector<VertexId> order(n);
            std::iota(order.begin(), order.end(), 0u);
            for (std::uint32_t i = n - 1; i > 0; --i) {
                const auto j = static_cast<std::uint32_t>(rng.below(i + 1));
                std::swap(order[i], order[j]);
            }
            const auto quota =
                static_cast<std::uint32_t>(std::floor(spec.degrees.frac_a * n));
            std::fill(counts.begin(), counts.end(), spec.degrees.count_b);
            for (std::uint32_t i = 0; i < quota; ++i) counts[order[i]] = spec.degrees.count_a;
            break;
        }
        case DegreeLaw::ParetoTail: {
            const double inv_tau = 1.0 / spec.degrees.tail_exponent;
            for (std::uint32_t x = 0; x < n; ++x) {
                const double u = 1.0 - rng.u01();  // (0, 1]
                const double draw = std::pow(u, -inv_tau);
                const double capped = std::min(draw, static_cast<double>(n - 1));
                counts[x] = static_cast<std::uint32_t>(capped);
            }
            break;
        }
    }
    return counts;
}

}  // namespace

CostGraph generate_graph(const GraphSpec& spec) {
    spec.validate();
    const std::uint32_t n = spec.n;
    const std::vector<std::uint32_t> counts = draw_shortcut_counts(spec);

    std::vector<std::uint32_t> offsets(n + 1, 0);
    for (std::uint32_t x = 0; x < n; ++x) offsets[x + 1] = offsets[x] + 1 + counts[x];
    std::vector<VertexId> targets(offsets[n]);

    // Cumulative shortcut-distance law, shared by all vertices.
    std::vector<double> cdf(n - 1);
    double acc = 0.0;
    for (std::uint32_t d = 1; d < n; ++d) {
        acc += std::pow(static_cast<double>(d), -spec.alpha);
        cdf[d - 1] = acc;
    }

    const std::uint64_t graph_seed = derive_seed(spec.seed, stream::kGraph);
    for (std::uint32_t x = 0; x < n; ++x) {
        EdgeId e = offsets[x];
        targets[e++] = (x + 1) % n;  // ring successor always present
        SplitMix64 rng(derive_seed(graph_seed, x));  // independent per source vertex
        for (std::uint32_t s = 0; s < counts[x]; ++s) {
            const auto d = static_cast<std::uint32_t>(rng.pick_cdf(cdf)) + 1;
            targets[e++] = (x + d) % n;  // d >= 1, so never a self-loop
        }
    }
    return CostGraph(n, spec.alpha, spec.seed, std::move(offsets), std::move(targets));
}

CostGraph build_graph(std::uint32_t n, double alpha, std::uint64_t seed,
                      const std::vector<std::vector<VertexId>>& shortcuts) {
    if (n < 2) throw std::invalid_argument("graph size must be >= 2");
    if (shortcuts.size() != n) throw std::invalid_argument("need one shortcut list per vertex");
    std::vector<std::uint32_t> offsets(n + 1, 0);
    for (std::uint32_t x = 0; x < n; ++x)
        offsets[x + 1] = offsets[x] + 1 + static_cast<std::uint32_t>(shortcuts[x].size());
    std::vector<VertexId> targets(offsets[n]);
    for (std::uint32_t x = 0; x < n; ++x) {
        EdgeId e = offsets[x];
        targets[e++] = (x + 1) % n;
        for (VertexId y : shortcuts[x]) {
            if (y >= n || y == x) throw std::invalid_argument("bad shortcut target");
            targets[e++] = y;
        }
    }
    return CostGraph(n, alpha, seed, std::move(offsets), std::move(targets));
}

std::vector<std::pair<EdgeId, VertexId>> forward_neighbors(const CostGraph& g, VertexId x,
                                                           VertexId z) {
    if (x == z) throw std::invalid_argument("forward_neighbors: x == z");
    const std::uint32_t dx = g.distance(x, z);
    std::vector<std::pair<EdgeId, VertexId>> out;
    const EdgeId base = g.first_edge(x);
    const auto targets = g.out_targets(x);
    for (std::uint32_t i = 0; i < targets.size(); ++i) {
        if (g.distance(targets[i], z) < dx) out.emplace_back(base + i, targets[i]);
    }
    return out;
}

void save_graph(const CostGraph& g, std::ostream& out) {
    out.precision(17);
    out << g.size() << ' ' << g.alpha() << ' ' << g.seed() << '\n';
    for (VertexId x = 0; x < g.size(); ++x) {
        out << x << ':';
        for (VertexId y : g.out_targets(x)) out << ' ' << y;
        out << '\n';
    }
}

CostGraph load_graph(std::istream& in) {
    std::uint32_t n = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    if (!(in >> n >> alpha >> seed)) throw std::runtime_error("graph header malformed");
    std::vector<std::uint32_t> offsets(n + 1, 0);
    std::vector<VertexId> targets;
    for (std::uint32_t x = 0; x < n; ++x) {
        std::uint32_t id = 0;
        char colon = 0;
        if (!(in >> id >> colon) || id != x || colon != ':')
            throw std::runtime_error("graph vertex line malformed");
        std::string rest;
        std::getline(in, rest);
        std::istringstream line(rest);
        VertexId y = 0;
        while (line >> y) targets.push_back(y);
        offsets[x + 1] = static_cast<std::uint32_t>(targets.size());
    }
    return CostGraph(n, alpha, seed, std::move(offsets), std::move(targets));
}

void save_graph_file(const CostGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    save_graph(g, out);
}

CostGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    return load_graph(in);
}

}  // namespace costgreedy
