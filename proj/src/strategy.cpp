// SPDX-License-Identifier: Apache-2.0
#include "liqgame/strategy.hpp"

#include "liqgame/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liqgame {

double evaluate_terms(std::span<const ExpTerm> terms, double t) {
    double sum = 0.0;
    for (const auto& term : terms) {
        double v = term.coefficient * std::exp(term.rate * (t - term.anchor));
        if (term.power == 1) v *= t;
        sum += v;
    }
    return sum;
}

std::vector<ExpTerm> differentiate_terms(std::span<const ExpTerm> terms) {
    std::vector<ExpTerm> out;
    out.reserve(terms.size() * 2);
    for (const auto& term : terms) {
        if (term.power == 1) {
            out.push_back({term.coefficient, term.rate, term.anchor, 0});
        }
        if (term.rate != 0.0) {
            out.push_back({term.coefficient * term.rate, term.rate, term.anchor, term.power});
        }
    }
    return out;
}

ExpSumStrategy::ExpSumStrategy(std::vector<ExpTerm> terms, Horizon horizon) : horizon_(horizon) {
    for (const auto& term : terms) {
        if (term.power < 0 || term.power > 1) {
            throw Error(ErrorCode::InvalidParam, "terms", "only powers 0 and 1 are supported");
        }
        if (!std::isfinite(term.coefficient) || !std::isfinite(term.rate) || !std::isfinite(term.anchor)) {
            throw Error(ErrorCode::InvalidParam, "terms", "non-finite term");
        }
        if (term.coefficient != 0.0) terms_.push_back(term);
    }
    if (horizon_.is_finite()) {
        const double T = horizon_.length();
        double magnitude = 0.0;
        for (const auto& term : terms_) {
            magnitude += std::abs(evaluate_terms(std::span<const ExpTerm>(&term, 1), T));
        }
        const double scale = std::max({1.0, std::abs(initial_position()), magnitude});
        if (std::abs(evaluate_terms(terms_, T)) > 1e-12 * scale) {
            throw Error(ErrorCode::InvalidParam, "terms", "finite-horizon strategy does not vanish at T");
        }
    } else {
        for (const auto& term : terms_) {
            if (!(term.rate < 0.0)) {
                throw Error(ErrorCode::InvalidParam, "terms", "infinite-horizon rates must be negative");
            }
        }
    }
    rate_terms_ = differentiate_terms(terms_);
    acceleration_terms_ = differentiate_terms(rate_terms_);
}

void ExpSumStrategy::check_domain(double t) const {
    if (!(t >= 0.0)) throw Error(ErrorCode::OutOfDomain, "time must be >= 0");
    if (horizon_.is_finite()) {
        const double T = horizon_.length();
        if (t > T * (1.0 + 1e-12) + 1e-300) throw Error(ErrorCode::OutOfDomain, "time beyond horizon");
    } else if (!std::isfinite(t)) {
        throw Error(ErrorCode::OutOfDomain, "time must be finite");
    }
}

double ExpSumStrategy::position(double t) const {
    check_domain(t);
    return evaluate_terms(terms_, t);
}

double ExpSumStrategy::rate(double t) const {
    check_domain(t);
    return evaluate_terms(rate_terms_, t);
}

double ExpSumStrategy::acceleration(double t) const {
    check_domain(t);
    return evaluate_terms(acceleration_terms_, t);
}

double ExpSumStrategy::slowest_rate() const {
    double r = -std::numeric_limits<double>::infinity();
    for (const auto& term : terms_) r = std::max(r, term.rate);
    return r;
}

GridStrategy::GridStrategy(double t_end, std::vector<double> positions, std::vector<double> rates, bool liquidates)
    : t_end_(t_end), positions_(std::move(positions)), rates_(std::move(rates)), liquidates_(liquidates) {
    if (!(t_end_ > 0.0) || !std::isfinite(t_end_)) {
        throw Error(ErrorCode::InvalidParam, "grid", "grid end time must be positive");
    }
    if (positions_.size() < kMinGridIntervals + 1) {
        throw Error(ErrorCode::InvalidParam, "grid", "grid needs at least 8 intervals");
    }
    if (!rates_.empty() && rates_.size() != positions_.size()) {
        throw Error(ErrorCode::InvalidParam, "grid", "rates and positions must have equal length");
    }
    if (liquidates_) positions_.back() = 0.0;
}

GridStrategy GridStrategy::liquidating(double T, std::vector<double> positions, std::vector<double> rates) {
    return GridStrategy(T, std::move(positions), std::move(rates), true);
}

GridStrategy GridStrategy::truncated(double t_end, std::vector<double> positions, std::vector<double> rates) {
    return GridStrategy(t_end, std::move(positions), std::move(rates), false);
}

double GridStrategy::time(std::size_t k) const {
    if (k == intervals()) return t_end_;
    return t_end_ * static_cast<double>(k) / static_cast<double>(intervals());
}

double GridStrategy::node_rate(std::size_t k) const {
    if (!rates_.empty()) return rates_[k];
    const double h = step();
    const std::size_t N = intervals();
    const auto& x = positions_;
    if (k == 0) return (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
    if (k == N) return (3.0 * x[N] - 4.0 * x[N - 1] + x[N - 2]) / (2.0 * h);
    return (x[k + 1] - x[k - 1]) / (2.0 * h);
}

std::vector<double> GridStrategy::node_rates() const {
    if (!rates_.empty()) return rates_;
    std::vector<double> out(positions_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = node_rate(k);
    return out;
}

std::size_t GridStrategy::locate(double t, double& weight) const {
    if (!(t >= 0.0) || t > t_end_ * (1.0 + 1e-12)) {
        throw Error(ErrorCode::OutOfDomain, "time outside the grid");
    }
    const double u = std::min(t, t_end_) / step();
    auto k = static_cast<std::size_t>(std::floor(u));
    if (k >= intervals()) k = intervals() - 1;
    weight = u - static_cast<double>(k);
    return k;
}

double GridStrategy::position(double t) const {
    double w = 0.0;
    const std::size_t k = locate(t, w);
    return (1.0 - w) * positions_[k] + w * positions_[k + 1];
}

double GridStrategy::rate(double t) const {
    double w = 0.0;
    const std::size_t k = locate(t, w);
    return (1.0 - w) * node_rate(k) + w * node_rate(k + 1);
}

bool GridStrategy::same_grid(const GridStrategy& other) const {
    return intervals() == other.intervals() && std::abs(t_end_ - other.t_end_) <= 1e-12 * t_end_;
}

StrategyPoint eval_strategy(const ExpSumStrategy& s, double t) { return {s.position(t), s.rate(t)}; }

StrategyPoint eval_strategy(const GridStrategy& s, double t) { return {s.position(t), s.rate(t)}; }

StrategyPoint eval_strategy(const Strategy& s, double t) {
    return std::visit([t](const auto& v) { return eval_strategy(v, t); }, s);
}

GridStrategy sample_on_grid(const ExpSumStrategy& s, double t_end, std::size_t intervals) {
    std::vector<double> x(intervals + 1), r(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
        const double t = k == intervals ? t_end : t_end * static_cast<double>(k) / static_cast<double>(intervals);
        x[k] = s.position(t);
        r[k] = s.rate(t);
    }
    if (s.horizon().is_finite() && t_end == s.horizon().length()) {
        return GridStrategy::liquidating(t_end, std::move(x), std::move(r));
    }
    return GridStrategy::truncated(t_end, std::move(x), std::move(r));
}

}  // namespace liqgame
