// SPDX-License-Identifier: Apache-2.0
#include "liqgame/analysis.hpp"

#include "liqgame/error.hpp"
#include "liqgame/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace liqgame {

namespace {

bool same_length(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

void check_horizon(const Strategy& s, const Horizon& h) {
    if (const auto* e = std::get_if<ExpSumStrategy>(&s)) {
        const Horizon& sh = e->horizon();
        const bool ok = sh.is_finite() == h.is_finite() && (!h.is_finite() || same_length(sh.length(), h.length()));
        if (!ok) throw Error(ErrorCode::HorizonMismatch, "strategy horizon differs from the problem horizon");
        return;
    }
    const auto& g = std::get<GridStrategy>(s);
    if (h.is_finite() && (!g.liquidates() || !same_length(g.t_end(), h.length()))) {
        throw Error(ErrorCode::HorizonMismatch, "grid strategy does not cover [0, T]");
    }
    if (!h.is_finite() && g.liquidates()) {
        throw Error(ErrorCode::HorizonMismatch, "liquidating grid used on an infinite horizon");
    }
}

EvaluationResult finish(double c, double expected, double variance, double alpha) {
    EvaluationResult r;
    r.constant_part = c;
    r.expected_revenue = expected;
    r.variance = std::max(0.0, variance);
    r.mean_variance_value = expected - 0.5 * alpha * r.variance;
    r.cara_value = cara_from_moments(alpha, expected, r.variance);
    return r;
}

EvaluationResult evaluate_exp(const ExpSumStrategy& own, const std::vector<const ExpSumStrategy*>& others,
                              const ValidatedProblem& problem, double alpha) {
    const auto& m = problem.market;
    const double L = problem.horizon.is_finite() ? problem.horizon.length() : std::numeric_limits<double>::infinity();
    const double y = own.initial_position();
    const double c = y * m.s0 - 0.5 * m.gamma * y * y;
    std::vector<ExpTerm> dS;
    for (const auto* o : others) dS.insert(dS.end(), o->rate_terms().begin(), o->rate_terms().end());

    double drift_part = 0.0;
    if (!m.drift.is_identically_zero()) {
        if (const auto* cd = std::get_if<ConstantDrift>(&m.drift.variant())) {
            drift_part = cd->value * integrate_terms(own.terms(), L);
        } else {
            const auto bps = m.drift.breakpoints();
            drift_part = gauss_legendre([&](double t) { return own.position(t) * m.drift(t); }, 0.0, L, bps);
        }
    }
    const double expected = c + drift_part + m.gamma * integrate_product(own.terms(), dS, L) -
                            m.lambda * integrate_product(own.rate_terms(), dS, L) -
                            m.lambda * integrate_product(own.rate_terms(), own.rate_terms(), L);
    const double variance = m.sigma * m.sigma * integrate_product(own.terms(), own.terms(), L);
    return finish(c, expected, variance, alpha);
}

EvaluationResult evaluate_grid(const GridStrategy& own, const std::vector<GridStrategy>& others,
                               const ValidatedProblem& problem, double alpha) {
    const auto& m = problem.market;
    const std::size_t N = own.intervals();
    const double h = own.step();
    const auto& Y = own.positions();
    const auto dY = own.node_rates();
    std::vector<double> dS(N + 1, 0.0);
    for (const auto& o : others) {
        const auto r = o.node_rates();
        for (std::size_t k = 0; k <= N; ++k) dS[k] += r[k];
    }
    std::vector<double> e(N + 1), v(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        const double b = m.drift(own.time(k));
        e[k] = Y[k] * (b + m.gamma * dS[k]) - m.lambda * dY[k] * (dS[k] + dY[k]);
        v[k] = Y[k] * Y[k];
    }
    const double y = Y.front();
    const double c = y * m.s0 - 0.5 * m.gamma * y * y;
    return finish(c, c + simpson(e, h), m.sigma * m.sigma * simpson(v, h), alpha);
}

// Bump eta with eta(0) = eta(L) = 0.
struct Bump {
    int k = 0;  // sine mode when > 0
    std::vector<double> nodes;
    std::vector<double> heights;
    double L = 1.0;

    [[nodiscard]] double value(double t) const {
        if (k > 0) return std::sin(k * std::numbers::pi * t / L);
        if (t <= 0.0 || t >= L) return 0.0;
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
        const auto hi = static_cast<std::size_t>(it - nodes.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - nodes[lo]) / (nodes[hi] - nodes[lo]);
        return (1.0 - w) * heights[lo] + w * heights[hi];
    }

    [[nodiscard]] double slope(double t) const {
        if (k > 0) return k * std::numbers::pi / L * std::cos(k * std::numbers::pi * t / L);
        if (t < 0.0 || t >= L) return 0.0;
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
        const auto hi = static_cast<std::size_t>(it - nodes.begin());
        const std::size_t lo = hi - 1;
        return (heights[hi] - heights[lo]) / (nodes[hi] - nodes[lo]);
    }
};

std::vector<Bump> make_bumps(double L, const DeviationOptions& opt) {
    std::vector<Bump> out;
    for (std::size_t k = 1; k <= opt.sine_directions; ++k) out.push_back({static_cast<int>(k), {}, {}, L});
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(2, 6);
    for (std::size_t r = 0; r < opt.random_directions; ++r) {
        Bump b;
        b.L = L;
        const int K = count(rng);
        b.nodes.push_back(0.0);
        for (int j = 0; j < K; ++j) b.nodes.push_back(L * (0.02 + 0.96 * unit(rng)));
        b.nodes.push_back(L);
        std::sort(b.nodes.begin(), b.nodes.end());
        b.heights.push_back(0.0);
        for (int j = 0; j < K; ++j) b.heights.push_back(2.0 * unit(rng) - 1.0);
        b.heights.push_back(0.0);
        out.push_back(std::move(b));
    }
    return out;
}

// Last node index of `f(t_k) > thr` on a uniform sample of [0, t_end], then bisection.
double last_crossing(const std::function<double(double)>& absx, double thr, double t_end) {
    constexpr int kSamples = 20000;
    int last = -1;
    for (int k = 0; k <= kSamples; ++k) {
        if (absx(t_end * k / kSamples) > thr) last = k;
    }
    if (last < 0) return 0.0;
    if (last == kSamples) throw Error(ErrorCode::NeverReached, "criterion not met on the sampled horizon");
    double lo = t_end * last / kSamples;
    double hi = t_end * (last + 1) / kSamples;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (absx(mid) > thr ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double check_fraction(double fraction, double x0) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorCode::InvalidParam, "fraction", "must lie in (0, 1)");
    if (x0 == 0.0) throw Error(ErrorCode::InvalidParam, "x0", "initial position must be nonzero");
    return (1.0 - fraction) * std::abs(x0);
}

}  // namespace

double cara_from_moments(double alpha, double mean, double variance) {
    if (alpha == 0.0) return mean;
    return -std::expm1(-alpha * mean + 0.5 * alpha * alpha * variance) / alpha;
}

EvaluationResult mean_variance(const Strategy& own, const std::vector<Strategy>& others,
                               const ValidatedProblem& problem, std::size_t agent) {
    if (agent >= problem.n()) throw Error(ErrorCode::InvalidParam, "agent", "agent index out of range");
    if (others.size() + 1 != problem.n()) {
        throw Error(ErrorCode::InvalidParam, "others", "expected one strategy per other agent");
    }
    check_horizon(own, problem.horizon);
    for (const auto& o : others) check_horizon(o, problem.horizon);
    const double alpha = problem.agents[agent].alpha;

    const GridStrategy* grid = std::get_if<GridStrategy>(&own);
    for (const auto& o : others) {
        if (grid == nullptr) grid = std::get_if<GridStrategy>(&o);
    }
    if (grid == nullptr) {
        std::vector<const ExpSumStrategy*> exp;
        for (const auto& o : others) exp.push_back(&std::get<ExpSumStrategy>(o));
        return evaluate_exp(std::get<ExpSumStrategy>(own), exp, problem, alpha);
    }
    const GridStrategy ref = *grid;
    auto to_grid = [&](const Strategy& s) {
        if (const auto* g = std::get_if<GridStrategy>(&s)) {
            if (!g->same_grid(ref)) throw Error(ErrorCode::GridMismatch, "grid strategies on different grids");
            return *g;
        }
        return sample_on_grid(std::get<ExpSumStrategy>(s), ref.t_end(), ref.intervals());
    };
    std::vector<GridStrategy> og;
    for (const auto& o : others) og.push_back(to_grid(o));
    return evaluate_grid(to_grid(own), og, problem, alpha);
}

EvaluationResult mean_variance(const std::vector<Strategy>& profile, const ValidatedProblem& problem,
                               std::size_t agent) {
    if (profile.size() != problem.n()) throw Error(ErrorCode::InvalidParam, "profile", "one strategy per agent");
    std::vector<Strategy> others;
    for (std::size_t j = 0; j < profile.size(); ++j) {
        if (j != agent) others.push_back(profile[j]);
    }
    return mean_variance(profile.at(agent), others, problem, agent);
}

DeviationReport deviation_test(const std::vector<ExpSumStrategy>& profile, const ValidatedProblem& problem,
                               std::size_t agent, const DeviationOptions& options) {
    if (profile.size() != problem.n() || agent >= problem.n()) {
        throw Error(ErrorCode::InvalidParam, "profile", "one strategy per agent");
    }
    const auto& m = problem.market;
    const double L = problem.horizon.is_finite() ? problem.horizon.length() : options.infinite_support;
    const double a = problem.agents[agent].alpha * m.sigma * m.sigma;
    const auto& own = profile[agent];
    auto dS = [&](double t) {
        double s = 0.0;
        for (std::size_t j = 0; j < profile.size(); ++j) {
            if (j != agent) s += profile[j].rate(t);
        }
        return s;
    };
    auto lagrangian = [&](double t, double q, double p) {
        const double others = dS(t);
        return q * (m.drift(t) + m.gamma * others) - 0.5 * a * q * q - m.lambda * p * (others + p);
    };

    DeviationReport report;
    const auto drift_bps = m.drift.breakpoints();
    for (const auto& bump : make_bumps(L, options)) {
        std::vector<double> bps = drift_bps;
        bps.insert(bps.end(), bump.nodes.begin(), bump.nodes.end());
        // V(eps) - V(0); the constant part is unchanged because eta(0) = 0.
        auto delta = [&](double eps) {
            return gauss_legendre(
                [&](double t) {
                    const double q = own.position(t);
                    const double p = own.rate(t);
                    return lagrangian(t, q + eps * bump.value(t), p + eps * bump.slope(t)) - lagrangian(t, q, p);
                },
                0.0, L, bps);
        };
        bool improved = false;
        for (double eps : options.epsilons) {
            if (eps <= 0.0) continue;
            const double up = delta(eps);
            const double down = delta(-eps);
            if (!(up < 0.0) || !(down < 0.0)) improved = true;
            const double d1 = (up - down) / (2.0 * eps);
            const double d2 = (up + down) / (2.0 * eps * eps);
            report.max_first_order = std::max(report.max_first_order, std::abs(d1) / std::max(1.0, std::abs(d2)));
            report.max_second_order = std::max(report.max_second_order, d2);
        }
        for (double eps : options.epsilons) {
            if (eps < 0.0 && std::find(options.epsilons.begin(), options.epsilons.end(), -eps) == options.epsilons.end()) {
                if (!(delta(eps) < 0.0)) improved = true;
            }
        }
        if (improved) ++report.improving;
        ++report.directions;
    }
    return report;
}

std::string to_string(Role role) {
    switch (role) {
    case Role::LiquidityProvision: return "LiquidityProvision";
    case Role::Predatory: return "Predatory";
    case Role::Inactive: return "Inactive";
    }
    return "Unknown";
}

RoleClassification classify_role(double alpha_sigma2, double lambda, double gamma) {
    const double provision = alpha_sigma2 * lambda;
    const double predation = 2.0 * gamma * gamma;
    RoleClassification out;
    out.margin = provision - predation;
    const double tol = 1e-12 * std::max(provision, predation);
    if (std::abs(out.margin) <= tol) {
        out.role = Role::Inactive;
    } else {
        out.role = out.margin > 0.0 ? Role::LiquidityProvision : Role::Predatory;
    }
    return out;
}

RoleClassification classify_role(const MarketParams& market, double alpha) {
    return classify_role(alpha * market.sigma * market.sigma, market.lambda, market.gamma);
}

double effective_liquidation_time(const ExpSumStrategy& s, double fraction) {
    const double thr = check_fraction(fraction, s.initial_position());
    const auto& terms = s.terms();
    if (terms.size() == 1 && terms[0].power == 0 && terms[0].rate < 0.0) {
        const auto& t = terms[0];
        return std::max(0.0, t.anchor + std::log(thr / std::abs(t.coefficient)) / t.rate);
    }
    double t_end = 0.0;
    if (s.horizon().is_finite()) {
        t_end = s.horizon().length();
    } else {
        const double m = static_cast<double>(terms.size());
        for (const auto& t : terms) {
            t_end = std::max(t_end, t.anchor + std::log(m * std::abs(t.coefficient) / thr) / -t.rate);
        }
    }
    return last_crossing([&](double t) { return std::abs(s.position(t)); }, thr, t_end);
}

double effective_liquidation_time(const GridStrategy& s, double fraction) {
    const auto& x = s.positions();
    const double thr = check_fraction(fraction, x.front());
    std::size_t last = 0;
    bool any = false;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (std::abs(x[k]) > thr) {
            last = k;
            any = true;
        }
    }
    if (!any) return 0.0;
    if (last == s.intervals()) throw Error(ErrorCode::NeverReached, "grid ends above the threshold");
    // Linear interpolation between nodes: solve |x(t)| = thr on the last interval.
    const double a = x[last];
    const double b = x[last + 1];
    const double target = a > 0.0 ? thr : -thr;
    const double w = (target - a) / (b - a);
    return s.time(last) + w * s.step();
}

double effective_liquidation_time(const Strategy& s, double fraction) {
    return std::visit([fraction](const auto& v) { return effective_liquidation_time(v, fraction); }, s);
}

ScanParameter parse_scan_parameter(const std::string& name) {
    if (name == "alpha_sigma2") return ScanParameter::AlphaSigma2;
    if (name == "lambda") return ScanParameter::Lambda;
    if (name == "gamma") return ScanParameter::Gamma;
    if (name == "n") return ScanParameter::N;
    if (name == "T") return ScanParameter::T;
    throw Error(ErrorCode::InvalidParam, "param", "unknown scan parameter '" + name + "'");
}

std::string to_string(ScanParameter p) {
    switch (p) {
    case ScanParameter::AlphaSigma2: return "alpha_sigma2";
    case ScanParameter::Lambda: return "lambda";
    case ScanParameter::Gamma: return "gamma";
    case ScanParameter::N: return "n";
    case ScanParameter::T: return "T";
    }
    return "unknown";
}

ValidatedProblem with_parameter(const ValidatedProblem& base, ScanParameter p, double value) {
    MarketParams market = base.market;
    std::vector<AgentSpec> agents = base.agents;
    Horizon horizon = base.horizon;
    switch (p) {
    case ScanParameter::AlphaSigma2:
        if (market.sigma == 0.0) market.sigma = 1.0;
        for (auto& a : agents) a.alpha = value / (market.sigma * market.sigma);
        break;
    case ScanParameter::Lambda: market.lambda = value; break;
    case ScanParameter::Gamma: market.gamma = value; break;
    case ScanParameter::N: {
        const long m = std::lround(value);
        if (m < 1 || std::abs(value - static_cast<double>(m)) > 1e-9) {
            throw Error(ErrorCode::InvalidParam, "n", "agent count must be a positive integer");
        }
        double total = 0.0;
        for (const auto& a : base.agents) total += a.x0;
        const AgentSpec first = base.agents.front();
        agents.assign(1, first);
        for (long j = 1; j < m; ++j) {
            agents.push_back({(total - first.x0) / static_cast<double>(m - 1), first.alpha});
        }
        break;
    }
    case ScanParameter::T: horizon = Horizon::finite(value); break;
    }
    return validate_problem(std::move(market), std::move(agents), horizon);
}

std::vector<ScanPoint> parameter_scan(const ValidatedProblem& base, ScanParameter p, const std::vector<double>& grid,
                                      const Probe& probe, const EquilibriumOptions& options) {
    std::vector<ScanPoint> out(grid.size());
    auto run = [&](std::size_t k) {
        ScanPoint& pt = out[k];
        pt.value = grid[k];
        try {
            const ValidatedProblem problem = with_parameter(base, p, grid[k]);
            if (probe.agent >= problem.n()) throw Error(ErrorCode::InvalidParam, "agent", "probe agent out of range");
            const Equilibrium eq = solve_equilibrium(problem, options);
            const Strategy& s = eq.strategies[probe.agent];
            pt.probe = probe.liquidation_fraction ? effective_liquidation_time(s, *probe.liquidation_fraction)
                                                  : eval_strategy(s, probe.t).position;
            pt.status = "ok";
        } catch (const Error& e) {
            pt.status = std::string(to_string(e.code()));
        } catch (const std::exception&) {
            pt.status = "InternalError";
        }
    };
    const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), grid.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < grid.size(); k += workers) run(k);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

std::vector<double> linspace(double from, double to, std::size_t points) {
    if (points == 0) throw Error(ErrorCode::InvalidParam, "points", "need at least one point");
    if (points == 1) return {from};
    std::vector<double> v(points);
    for (std::size_t k = 0; k < points; ++k) {
        v[k] = k + 1 == points ? to : from + (to - from) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
    return v;
}

bool is_non_monotone(const std::vector<double>& v) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    const double thr = 1e-9 * scale;
    bool up = false;
    bool down = false;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double d = v[k + 1] - v[k];
        up = up || d > thr;
        down = down || d < -thr;
    }
    return up && down;
}

std::size_t monotonicity_violations(const std::vector<double>& v, bool decreasing) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    const double thr = 1e-9 * scale;
    std::size_t count = 0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double d = v[k + 1] - v[k];
        if (decreasing ? d > thr : d < -thr) ++count;
    }
    return count;
}

}  // namespace liqgame
