// SPDX-License-Identifier: Apache-2.0
#include "liqgame/residual.hpp"

#include "liqgame/error.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace liqgame {

namespace {

double d1_6(const std::vector<double>& f, std::size_t k, double h) {
    return (-f[k - 3] + 9.0 * f[k - 2] - 45.0 * f[k - 1] + 45.0 * f[k + 1] - 9.0 * f[k + 2] + f[k + 3]) / (60.0 * h);
}

double d2_6(const std::vector<double>& f, std::size_t k, double h) {
    return (2.0 * f[k - 3] - 27.0 * f[k - 2] + 270.0 * f[k - 1] - 490.0 * f[k] + 270.0 * f[k + 1] - 27.0 * f[k + 2] +
            2.0 * f[k + 3]) /
           (180.0 * h * h);
}

struct PointState {
    std::vector<double> x, dx, ddx;
};

void accumulate(ResidualReport& report, const ResidualModel& model, double t, const PointState& s) {
    const std::size_t n = s.x.size();
    double sum_dx = 0.0;
    double sum_ddx = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sum_dx += s.dx[j];
        sum_ddx += s.ddx[j];
    }
    const double b = model.drift ? model.drift(t) : 0.0;
    const double s2 = model.sigma * model.sigma;
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = model.alphas[i] * s2 * s.x[i];
        const double t2 = 2.0 * model.lambda * s.ddx[i];
        const double t3 = model.gamma * (sum_dx - s.dx[i]);
        const double t4 = model.lambda * (sum_ddx - s.ddx[i]);
        const double r = t1 - t2 - b - t3 - t4;
        report.max_residual = std::max(report.max_residual, std::abs(r));
        report.scale = std::max({report.scale, std::abs(t1), std::abs(t2), std::abs(b), std::abs(t3), std::abs(t4)});
    }
    ++report.probes;
}

template <class S>
void boundary_errors(ResidualReport& report, const std::vector<S>& strategies, const std::vector<double>& x0,
                     std::optional<double> T) {
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        const double w = std::max(1.0, std::abs(x0[i]));
        report.max_initial_error =
            std::max(report.max_initial_error, std::abs(strategies[i].position(0.0) - x0[i]) / w);
        if (T) report.max_terminal_error = std::max(report.max_terminal_error, std::abs(strategies[i].position(*T)) / w);
    }
}

void check_sizes(std::size_t strategies, const ResidualModel& model, const std::vector<double>& x0) {
    if (strategies == 0 || model.alphas.size() != strategies || x0.size() != strategies) {
        throw Error(ErrorCode::InvalidParam, "strategies", "strategy, alpha and x0 counts must match");
    }
}

}  // namespace

double ResidualReport::relative() const { return max_residual / std::max(1.0, scale); }

ResidualModel ResidualModel::from_problem(const ValidatedProblem& problem) {
    ResidualModel m;
    m.lambda = problem.market.lambda;
    m.gamma = problem.market.gamma;
    m.sigma = problem.market.sigma;
    m.alphas = problem.alphas();
    const DriftSpec drift = problem.market.drift;
    m.drift = [drift](double t) { return drift(t); };
    m.breakpoints = drift.breakpoints();
    return m;
}

ResidualReport residual_report(const std::vector<ExpSumStrategy>& strategies, const ResidualModel& model,
                               const std::vector<double>& x0) {
    check_sizes(strategies.size(), model, x0);
    const Horizon& h = strategies.front().horizon();
    double t_end = 0.0;
    if (h.is_finite()) {
        t_end = h.length();
    } else {
        double slowest = -std::numeric_limits<double>::infinity();
        for (const auto& s : strategies) slowest = std::max(slowest, s.slowest_rate());
        t_end = std::isfinite(slowest) ? 10.0 / std::abs(slowest) : 1.0;
    }
    ResidualReport report;
    const std::size_t n = strategies.size();
    PointState s{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    constexpr int kProbes = 100;
    for (int p = 0; p < kProbes; ++p) {
        const double t = t_end * (p + 0.5) / kProbes;
        for (std::size_t i = 0; i < n; ++i) {
            s.x[i] = strategies[i].position(t);
            s.dx[i] = strategies[i].rate(t);
            s.ddx[i] = strategies[i].acceleration(t);
        }
        accumulate(report, model, t, s);
    }
    boundary_errors(report, strategies, x0, h.is_finite() ? std::optional<double>(h.length()) : std::nullopt);
    return report;
}

ResidualReport residual_report(const std::vector<GridStrategy>& strategies, const ResidualModel& model,
                               const std::vector<double>& x0) {
    check_sizes(strategies.size(), model, x0);
    const GridStrategy& first = strategies.front();
    for (const auto& s : strategies) {
        if (!s.same_grid(first)) throw Error(ErrorCode::GridMismatch, "strategies on different grids");
    }
    const std::size_t n = strategies.size();
    const std::size_t N = first.intervals();
    const double h = first.step();
    std::vector<std::vector<double>> rates(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (strategies[i].has_explicit_rates()) rates[i] = strategies[i].node_rates();
    }
    ResidualReport report;
    PointState s{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t k = 3; k + 3 <= N; ++k) {
        const double lo = first.time(k - 3);
        const double hi = first.time(k + 3);
        const bool kinked = std::any_of(model.breakpoints.begin(), model.breakpoints.end(),
                                        [&](double p) { return p > lo && p < hi; });
        if (kinked) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& pos = strategies[i].positions();
            s.x[i] = pos[k];
            if (!rates[i].empty()) {
                s.dx[i] = rates[i][k];
                s.ddx[i] = d1_6(rates[i], k, h);
            } else {
                s.dx[i] = d1_6(pos, k, h);
                s.ddx[i] = d2_6(pos, k, h);
            }
        }
        accumulate(report, model, first.time(k), s);
    }
    boundary_errors(report, strategies, x0,
                    first.liquidates() ? std::optional<double>(first.t_end()) : std::nullopt);
    return report;
}

ResidualReport residual_report(const std::vector<Strategy>& strategies, const ValidatedProblem& problem) {
    const ResidualModel model = ResidualModel::from_problem(problem);
    std::vector<double> x0;
    for (const auto& a : problem.agents) x0.push_back(a.x0);
    const GridStrategy* grid = nullptr;
    for (const auto& s : strategies) {
        if (const auto* g = std::get_if<GridStrategy>(&s)) {
            grid = g;
            break;
        }
    }
    if (grid == nullptr) {
        std::vector<ExpSumStrategy> exp;
        for (const auto& s : strategies) exp.push_back(std::get<ExpSumStrategy>(s));
        return residual_report(exp, model, x0);
    }
    std::vector<GridStrategy> grids;
    for (const auto& s : strategies) {
        if (const auto* g = std::get_if<GridStrategy>(&s)) {
            grids.push_back(*g);
        } else {
            grids.push_back(sample_on_grid(std::get<ExpSumStrategy>(s), grid->t_end(), grid->intervals()));
        }
    }
    return residual_report(grids, model, x0);
}

}  // namespace liqgame
