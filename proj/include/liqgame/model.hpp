// SPDX-License-Identifier: Apache-2.0
//
// Market, agents and horizon of the liquidation game, plus the validated
// problem record every solver consumes.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace liqgame {

struct ZeroDrift {};

struct ConstantDrift {
    double value = 0.0;
};

/// Drift sampled on a strictly increasing time grid, linearly interpolated.
struct SampledDrift {
    std::vector<double> grid;
    std::vector<double> values;
};

/// Deterministic drift b(t) of the unaffected price.
class DriftSpec {
public:
    using Variant = std::variant<ZeroDrift, ConstantDrift, SampledDrift>;

    DriftSpec() = default;
    explicit DriftSpec(Variant v) : value_(std::move(v)) {}

    static DriftSpec zero() { return DriftSpec{}; }
    static DriftSpec constant(double value) { return DriftSpec{ConstantDrift{value}}; }
    static DriftSpec sampled(std::vector<double> grid, std::vector<double> values) {
        return DriftSpec{SampledDrift{std::move(grid), std::move(values)}};
    }

    [[nodiscard]] double operator()(double t) const;

    /// True for Zero and for Constant(0).
    [[nodiscard]] bool is_identically_zero() const;

    /// Interior kinks of the interpolant (empty unless sampled).
    [[nodiscard]] std::vector<double> breakpoints() const;

    [[nodiscard]] const Variant& variant() const noexcept { return value_; }

private:
    Variant value_;
};

struct MarketParams {
    double lambda = 1.0;  ///< temporary impact
    double gamma = 0.0;   ///< permanent impact
    double sigma = 0.0;   ///< volatility
    double s0 = 0.0;      ///< initial unaffected price
    DriftSpec drift;
};

struct AgentSpec {
    double x0 = 0.0;     ///< initial position (shares)
    double alpha = 0.0;  ///< absolute risk aversion
};

class Horizon {
public:
    static Horizon finite(double T);
    static Horizon infinite() { return Horizon{}; }

    [[nodiscard]] bool is_finite() const noexcept { return length_.has_value(); }
    /// Length T of a finite horizon. Throws InvalidParam for an infinite one.
    [[nodiscard]] double length() const;

    bool operator==(const Horizon&) const = default;

private:
    std::optional<double> length_;
};

/// A problem that passed validate_problem.
struct ValidatedProblem {
    MarketParams market;
    std::vector<AgentSpec> agents;
    Horizon horizon;

    [[nodiscard]] std::size_t n() const noexcept { return agents.size(); }
    [[nodiscard]] bool equal_alpha() const;
    /// Common risk aversion; throws UnsupportedCase when agents differ.
    [[nodiscard]] double common_alpha() const;
    [[nodiscard]] Eigen::VectorXd initial_positions() const;
    [[nodiscard]] std::vector<double> alphas() const;
};

/// Rejects malformed or unsupported inputs with InvalidParam / UnsupportedCase.
ValidatedProblem validate_problem(MarketParams market, std::vector<AgentSpec> agents, Horizon horizon);

/// Rate constants of the equal-risk-aversion game together with the
/// first-order system matrix.
struct SpectralData {
    double theta_hat = 0.0;
    double rho_hat = 0.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    double rho_plus = 0.0;
    double rho_minus = 0.0;
    double kappa = 0.0;
    std::optional<double> xi;  // undefined when gamma == 0
    std::optional<std::array<double, 2>> quartic_roots;
    Eigen::MatrixXd system_matrix;
};

}  // namespace liqgame
