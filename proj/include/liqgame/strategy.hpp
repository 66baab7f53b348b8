// SPDX-License-Identifier: Apache-2.0
//
// Strategy representations: exact exponential sums (closed-form and
// stable-subspace solutions) and uniform-grid samples (BVP and oracle output).
#pragma once

#include "liqgame/model.hpp"

#include <span>
#include <variant>
#include <vector>

namespace liqgame {

/// One term c * t^power * exp(rate * (t - anchor)).
///
/// Positive-rate terms of finite-horizon strategies are anchored at T so that
/// the exponent stays non-positive on [0, T].
struct ExpTerm {
    double coefficient = 0.0;
    double rate = 0.0;
    double anchor = 0.0;
    int power = 0;
};

[[nodiscard]] double evaluate_terms(std::span<const ExpTerm> terms, double t);
[[nodiscard]] std::vector<ExpTerm> differentiate_terms(std::span<const ExpTerm> terms);

class ExpSumStrategy {
public:
    /// Drops zero-coefficient terms. Throws InvalidParam when a finite-horizon
    /// sum does not vanish at T or an infinite-horizon sum has a rate >= 0.
    ExpSumStrategy(std::vector<ExpTerm> terms, Horizon horizon);

    static ExpSumStrategy zero(Horizon horizon) { return ExpSumStrategy({}, horizon); }

    [[nodiscard]] double position(double t) const;
    [[nodiscard]] double rate(double t) const;
    [[nodiscard]] double acceleration(double t) const;
    [[nodiscard]] double initial_position() const { return evaluate_terms(terms_, 0.0); }

    [[nodiscard]] const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] const std::vector<ExpTerm>& rate_terms() const noexcept { return rate_terms_; }
    [[nodiscard]] const Horizon& horizon() const noexcept { return horizon_; }

    /// Slowest decay rate, i.e. the largest rate (infinite horizon only).
    [[nodiscard]] double slowest_rate() const;

private:
    void check_domain(double t) const;

    std::vector<ExpTerm> terms_;
    std::vector<ExpTerm> rate_terms_;
    std::vector<ExpTerm> acceleration_terms_;
    Horizon horizon_;
};

/// Positions on the uniform grid t_k = k * T / N.
///
/// Rates come from an explicit vector when the producer knows them exactly;
/// otherwise they are reconstructed by centered differences in the interior
/// and second-order one-sided differences at the ends.
class GridStrategy {
public:
    /// Finite-horizon strategy; the last position is forced to exactly 0.
    static GridStrategy liquidating(double T, std::vector<double> positions,
                                    std::vector<double> rates = {});
    /// Truncated sample of an infinite-horizon strategy (no terminal snap).
    static GridStrategy truncated(double t_end, std::vector<double> positions,
                                  std::vector<double> rates = {});

    [[nodiscard]] std::size_t intervals() const noexcept { return positions_.size() - 1; }
    [[nodiscard]] double t_end() const noexcept { return t_end_; }
    [[nodiscard]] double step() const noexcept { return t_end_ / static_cast<double>(intervals()); }
    [[nodiscard]] double time(std::size_t k) const;
    [[nodiscard]] bool liquidates() const noexcept { return liquidates_; }
    [[nodiscard]] bool has_explicit_rates() const noexcept { return !rates_.empty(); }

    [[nodiscard]] const std::vector<double>& positions() const noexcept { return positions_; }
    /// Node rates, explicit or reconstructed.
    [[nodiscard]] std::vector<double> node_rates() const;

    [[nodiscard]] double position(double t) const;
    [[nodiscard]] double rate(double t) const;

    /// Same grid (interval count and end time) as another strategy.
    [[nodiscard]] bool same_grid(const GridStrategy& other) const;

private:
    GridStrategy(double t_end, std::vector<double> positions, std::vector<double> rates, bool liquidates);
    [[nodiscard]] double node_rate(std::size_t k) const;
    [[nodiscard]] std::size_t locate(double t, double& weight) const;

    double t_end_ = 0.0;
    std::vector<double> positions_;
    std::vector<double> rates_;
    bool liquidates_ = true;
};

inline constexpr std::size_t kMinGridIntervals = 8;

using Strategy = std::variant<ExpSumStrategy, GridStrategy>;

struct StrategyPoint {
    double position = 0.0;
    double rate = 0.0;
};

/// Throws OutOfDomain outside [0, T] (finite) or [0, inf).
StrategyPoint eval_strategy(const Strategy& s, double t);
StrategyPoint eval_strategy(const ExpSumStrategy& s, double t);
StrategyPoint eval_strategy(const GridStrategy& s, double t);

/// Samples an exponential sum on the uniform grid with exact rates.
GridStrategy sample_on_grid(const ExpSumStrategy& s, double t_end, std::size_t intervals);

}  // namespace liqgame
