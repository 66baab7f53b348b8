// SPDX-License-Identifier: Apache-2.0
//
// Objective evaluation, no-profitable-deviation checks and the qualitative
// analyses of the equilibria (roles, liquidation times, parameter scans).
#pragma once

#include "liqgame/equilibrium.hpp"
#include "liqgame/model.hpp"
#include "liqgame/strategy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liqgame {

struct EvaluationResult {
    double expected_revenue = 0.0;
    double variance = 0.0;
    double mean_variance_value = 0.0;
    /// (1 / alpha)(1 - e^{-alpha E + alpha^2 Var / 2}); equals E when alpha = 0.
    std::optional<double> cara_value;
    /// y S0 - gamma y^2 / 2
    double constant_part = 0.0;
};

/// Mean-variance evaluation of agent `agent` playing `own` against `others`
/// (all remaining agents, in index order). Exponential sums are integrated in
/// closed form; grids by Simpson's rule, with exponential sums sampled onto
/// the grid when inputs are mixed.
/// Errors: HorizonMismatch, GridMismatch.
EvaluationResult mean_variance(const Strategy& own, const std::vector<Strategy>& others,
                               const ValidatedProblem& problem, std::size_t agent);

/// Same, for a full profile.
EvaluationResult mean_variance(const std::vector<Strategy>& profile, const ValidatedProblem& problem,
                               std::size_t agent);

[[nodiscard]] double cara_from_moments(double alpha, double mean, double variance);

struct DeviationOptions {
    std::size_t sine_directions = 20;
    std::size_t random_directions = 180;
    std::vector<double> epsilons{1e-2, -1e-2, 1e-3, -1e-3};
    std::uint64_t seed = 7;
    /// Support of the bumps on an infinite horizon.
    double infinite_support = 10.0;
};

struct DeviationReport {
    std::size_t directions = 0;
    /// Directions for which some epsilon failed to lower the value.
    std::size_t improving = 0;
    /// max |D1| / max(1, |D2|), D1 and D2 the centered first and second differences.
    double max_first_order = 0.0;
    /// Largest (least negative) second-order coefficient.
    double max_second_order = -std::numeric_limits<double>::infinity();

    [[nodiscard]] bool passed(double first_order_tol = 1e-6) const {
        return improving == 0 && max_first_order <= first_order_tol && max_second_order < 0.0;
    }
};

/// Perturbs agent `agent` of an exponential-sum equilibrium along bumps that
/// vanish at 0 and T and records the change of its mean-variance value.
DeviationReport deviation_test(const std::vector<ExpSumStrategy>& profile, const ValidatedProblem& problem,
                               std::size_t agent, const DeviationOptions& options = {});

enum class Role { LiquidityProvision, Predatory, Inactive };
[[nodiscard]] std::string to_string(Role role);

struct RoleClassification {
    Role role = Role::Inactive;
    /// alpha sigma^2 lambda - 2 gamma^2
    double margin = 0.0;
};

/// Role of a zero-inventory agent when the others hold a positive total.
[[nodiscard]] RoleClassification classify_role(const MarketParams& market, double alpha);
[[nodiscard]] RoleClassification classify_role(double alpha_sigma2, double lambda, double gamma);

/// First time after which |X| stays within (1 - fraction)|X(0)|.
/// Errors: InvalidParam (X(0) = 0 or fraction outside (0, 1)), NeverReached.
[[nodiscard]] double effective_liquidation_time(const ExpSumStrategy& s, double fraction);
[[nodiscard]] double effective_liquidation_time(const GridStrategy& s, double fraction);
[[nodiscard]] double effective_liquidation_time(const Strategy& s, double fraction);

enum class ScanParameter { AlphaSigma2, Lambda, Gamma, N, T };
[[nodiscard]] ScanParameter parse_scan_parameter(const std::string& name);
[[nodiscard]] std::string to_string(ScanParameter p);

struct Probe {
    std::size_t agent = 0;
    double t = 1.0;
    /// When set, the probe is the effective liquidation time for this fraction
    /// instead of the position at t.
    std::optional<double> liquidation_fraction;
};

struct ScanPoint {
    double value = 0.0;
    std::optional<double> probe;
    /// "ok" or the error code of the failed solve.
    std::string status;
};

/// Problem with one parameter replaced. For n, agent 1 keeps its position and
/// the rest of the total is split equally among the other agents.
[[nodiscard]] ValidatedProblem with_parameter(const ValidatedProblem& base, ScanParameter p, double value);

std::vector<ScanPoint> parameter_scan(const ValidatedProblem& base, ScanParameter p, const std::vector<double>& grid,
                                      const Probe& probe, const EquilibriumOptions& options = {});

/// `points` evenly spaced values from `from` to `to` inclusive.
[[nodiscard]] std::vector<double> linspace(double from, double to, std::size_t points);

/// Both an increase and a decrease larger than 1e-9 max|v|.
[[nodiscard]] bool is_non_monotone(const std::vector<double>& v);
/// Steps that go the wrong way by more than 1e-9 max|v|.
[[nodiscard]] std::size_t monotonicity_violations(const std::vector<double>& v, bool decreasing);

}  // namespace liqgame
