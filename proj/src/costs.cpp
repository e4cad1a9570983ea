#include "costgreedy/costs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace costgreedy {

namespace {

void build_cdf(const std::vector<double>& probs, std::vector<double>& cdf) {
    cdf.resize(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
}

}  // namespace

CostModel CostModel::constant(double c) {
    if (c < 0) throw std::invalid_argument("constant cost must be >= 0");
    CostModel m;
    m.law_ = CostLaw::Constant;
    m.param_ = c;
    m.values_ = {c};
    m.probs_ = {1.0};
    build_cdf(m.probs_, m.cdf_);
    return m;
}

CostModel CostModel::exponential(double rate) {
    if (rate <= 0) throw std::invalid_argument("exponential rate must be > 0");
    CostModel m;
    m.law_ = CostLaw::Exponential;
    m.param_ = rate;
    return m;
}

CostModel CostModel::two_point() {
    CostModel m;
    m.law_ = CostLaw::TwoPoint;
    m.values_ = {0.0, 2.0};
    m.probs_ = {0.5, 0.5};
    build_cdf(m.probs_, m.cdf_);
    return m;
}

CostModel CostModel::table(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
        throw std::invalid_argument("cost table needs matching values/probs");
    // keep support sorted ascending
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    CostModel m;
    m.law_ = CostLaw::Table;
    double total = 0.0;
    for (std::size_t i : order) {
        if (values[i] < 0) throw std::invalid_argument("cost values must be >= 0");
        if (probs[i] <= 0) throw std::invalid_argument("cost probs must be > 0");
        m.values_.push_back(values[i]);
        m.probs_.push_back(probs[i]);
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("cost table probs must sum to 1");
    build_cdf(m.probs_, m.cdf_);
    m.cdf_.back() = 1.0;
    return m;
}

CostModel CostModel::parse(const std::string& text) {
    if (text == "twopoint") return two_point();
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "constant") return constant(std::stod(args));
    if (kind == "exp") return exponential(std::stod(args));
    if (kind == "table") {
        std::vector<double> values, probs;
        std::stringstream pairs(args);
        std::string pair;
        while (std::getline(pairs, pair, ';')) {
            const auto comma = pair.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("table entry needs value,prob: " + text);
            values.push_back(std::stod(pair.substr(0, comma)));
            probs.push_back(std::stod(pair.substr(comma + 1)));
        }
        return table(std::move(values), std::move(probs));
    }
    throw std::invalid_argument("unknown cost model: " + text);
}

std::string CostModel::to_string() const {
    std::ostringstream os;
    switch (law_) {
        case CostLaw::Constant:
            os << "constant:" << param_;
            break;
        case CostLaw::Exponential:
            os << "exp:" << param_;
            break;
        case CostLaw::TwoPoint:
            os << "twopoint";
            break;
        case CostLaw::Table:
            os << "table:";
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (i) os << ';';
                os << values_[i] << ',' << probs_[i];
            }
            break;
    }
    return os.str();
}

double CostModel::mean() const {
    if (law_ == CostLaw::Exponential) return 1.0 / param_;
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
    return m;
}

double CostModel::expected_min_of_k(std::uint32_t k) const {
    if (k == 0) throw std::invalid_argument("expected_min_of_k needs k >= 1");
    if (law_ == CostLaw::Exponential) return 1.0 / (param_ * k);
    // E[min] = sum_j v_j (P(X >= v_j)^k - P(X >= v_{j+1})^k), support ascending.
    double tail = 1.0;
    double result = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
        const double next_tail = tail - probs_[j];
        const double clipped = next_tail > 0 ? next_tail : 0.0;
        result += values_[j] * (std::pow(tail, k) - std::pow(clipped, k));
        tail = clipped;
    }
    return result;
}

double CostModel::sample(SplitMix64& rng) const {
    switch (law_) {
        case CostLaw::Constant:
            return param_;
        case CostLaw::Exponential:
            return rng.exponential(param_);
        case CostLaw::TwoPoint:
            return rng.u01() < 0.5 ? 0.0 : 2.0;
        case CostLaw::Table:
            return values_[rng.pick_cdf(cdf_)];
    }
    return 0.0;
}

std::vector<double> CostAssignment::materialize(std::size_t edge_count) const {
    std::vector<double> costs(edge_count);
    for (std::size_t e = 0; e < edge_count; ++e)
        costs[e] = (*this)(static_cast<EdgeId>(e));
    return costs;
}

}  // namespace costgreedy
