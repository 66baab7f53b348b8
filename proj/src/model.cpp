// SPDX-License-Identifier: Apache-2.0
#include "liqgame/model.hpp"

#include "liqgame/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace liqgame {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidParam, field, "must be finite");
    }
}

void validate_drift(const DriftSpec& drift, const Horizon& horizon) {
    if (const auto* c = std::get_if<ConstantDrift>(&drift.variant())) {
        require_finite(c->value, "drift");
    }
    if (const auto* s = std::get_if<SampledDrift>(&drift.variant())) {
        if (s->grid.size() < 2 || s->grid.size() != s->values.size()) {
            throw Error(ErrorCode::InvalidParam, "drift",
                        "sampled drift needs >= 2 points and matching grid/values lengths");
        }
        for (std::size_t k = 0; k < s->grid.size(); ++k) {
            require_finite(s->grid[k], "drift");
            require_finite(s->values[k], "drift");
            if (k > 0 && !(s->grid[k] > s->grid[k - 1])) {
                throw Error(ErrorCode::InvalidParam, "drift", "sampled grid must be strictly increasing");
            }
        }
        if (horizon.is_finite() && (s->grid.front() > 0.0 || s->grid.back() < horizon.length())) {
            throw Error(ErrorCode::InvalidParam, "drift", "sampled grid must cover [0, T]");
        }
    }
    if (!horizon.is_finite() && !drift.is_identically_zero()) {
        throw Error(ErrorCode::UnsupportedCase, "infinite horizon requires zero drift");
    }
}

}  // namespace

double DriftSpec::operator()(double t) const {
    return std::visit(Overloaded{
                          [](const ZeroDrift&) { return 0.0; },
                          [](const ConstantDrift& c) { return c.value; },
                          [t](const SampledDrift& s) {
                              if (t <= s.grid.front()) return s.values.front();
                              if (t >= s.grid.back()) return s.values.back();
                              auto it = std::upper_bound(s.grid.begin(), s.grid.end(), t);
                              const auto hi = static_cast<std::size_t>(it - s.grid.begin());
                              const std::size_t lo = hi - 1;
                              const double w = (t - s.grid[lo]) / (s.grid[hi] - s.grid[lo]);
                              return (1.0 - w) * s.values[lo] + w * s.values[hi];
                          },
                      },
                      value_);
}

bool DriftSpec::is_identically_zero() const {
    if (std::holds_alternative<ZeroDrift>(value_)) return true;
    if (const auto* c = std::get_if<ConstantDrift>(&value_)) return c->value == 0.0;
    const auto& s = std::get<SampledDrift>(value_);
    return std::all_of(s.values.begin(), s.values.end(), [](double v) { return v == 0.0; });
}

std::vector<double> DriftSpec::breakpoints() const {
    if (const auto* s = std::get_if<SampledDrift>(&value_)) return s->grid;
    return {};
}

Horizon Horizon::finite(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw Error(ErrorCode::InvalidParam, "T", "finite horizon must be positive");
    }
    Horizon h;
    h.length_ = T;
    return h;
}

double Horizon::length() const {
    if (!length_) throw Error(ErrorCode::InvalidParam, "T", "infinite horizon has no length");
    return *length_;
}

bool ValidatedProblem::equal_alpha() const {
    return std::all_of(agents.begin(), agents.end(),
                       [&](const AgentSpec& a) { return a.alpha == agents.front().alpha; });
}

double ValidatedProblem::common_alpha() const {
    if (!equal_alpha()) throw Error(ErrorCode::UnsupportedCase, "agents have different risk aversions");
    return agents.front().alpha;
}

Eigen::VectorXd ValidatedProblem::initial_positions() const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(n()));
    for (std::size_t i = 0; i < n(); ++i) x(static_cast<Eigen::Index>(i)) = agents[i].x0;
    return x;
}

std::vector<double> ValidatedProblem::alphas() const {
    std::vector<double> out;
    out.reserve(n());
    for (const auto& a : agents) out.push_back(a.alpha);
    return out;
}

ValidatedProblem validate_problem(MarketParams market, std::vector<AgentSpec> agents, Horizon horizon) {
    if (!(market.lambda > 0.0) || !std::isfinite(market.lambda)) {
        throw Error(ErrorCode::InvalidParam, "lambda", "temporary impact must be positive");
    }
    if (!(market.gamma >= 0.0) || !std::isfinite(market.gamma)) {
        throw Error(ErrorCode::InvalidParam, "gamma", "permanent impact must be nonnegative");
    }
    if (!(market.sigma >= 0.0) || !std::isfinite(market.sigma)) {
        throw Error(ErrorCode::InvalidParam, "sigma", "volatility must be nonnegative");
    }
    require_finite(market.s0, "s0");
    if (agents.empty()) {
        throw Error(ErrorCode::InvalidParam, "agents", "at least one agent is required");
    }
    for (const auto& a : agents) {
        require_finite(a.x0, "x0");
        if (!(a.alpha >= 0.0) || !std::isfinite(a.alpha)) {
            throw Error(ErrorCode::InvalidParam, "alpha", "risk aversion must be nonnegative");
        }
    }
    validate_drift(market.drift, horizon);

    ValidatedProblem problem{std::move(market), std::move(agents), horizon};
    if (!horizon.is_finite()) {
        if (problem.market.sigma == 0.0) {
            throw Error(ErrorCode::InvalidParam, "sigma", "infinite horizon requires sigma > 0");
        }
        for (const auto& a : problem.agents) {
            if (a.alpha == 0.0) {
                throw Error(ErrorCode::InvalidParam, "alpha", "infinite horizon requires alpha > 0");
            }
        }
        if (problem.n() > 2 && !problem.equal_alpha()) {
            throw Error(ErrorCode::UnsupportedCase,
                        "infinite horizon with n > 2 requires equal risk aversions");
        }
    }
    return problem;
}

}  // namespace liqgame
