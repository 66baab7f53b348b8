// SPDX-License-Identifier: Apache-2.0
#include "liqgame/cli.hpp"

#include "liqgame/analysis.hpp"
#include "liqgame/closed_form.hpp"
#include "liqgame/equilibrium.hpp"
#include "liqgame/error.hpp"
#include "liqgame/monte_carlo.hpp"
#include "liqgame/oracle.hpp"
#include "liqgame/problem_io.hpp"
#include "liqgame/residual.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace liqgame::cli {

namespace {

using nlohmann::json;

std::optional<ValidatedProblem> load_or_report(const std::string& path, std::ostream& err) {
    try {
        return load_problem(path);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return std::nullopt;
    }
}

void report_solver_error(const std::exception& e, std::ostream& err) {
    if (const auto* le = dynamic_cast<const Error*>(&e)) {
        err << "solver error [" << to_string(le->code()) << "]: " << le->what() << '\n';
    } else {
        err << "solver error: " << e.what() << '\n';
    }
}

json residual_to_json(const ResidualReport& r) {
    return {{"max_residual", r.max_residual},
            {"scale", r.scale},
            {"relative", r.relative()},
            {"max_initial_error", r.max_initial_error},
            {"max_terminal_error", r.max_terminal_error},
            {"probes", r.probes}};
}

json evaluation_to_json(const EvaluationResult& e) {
    json j = {{"expected_revenue", e.expected_revenue},
              {"variance", e.variance},
              {"mean_variance_value", e.mean_variance_value},
              {"constant_part", e.constant_part}};
    j["cara_value"] = e.cara_value ? json(*e.cara_value) : json(nullptr);
    return j;
}

json spectral_to_json(const ValidatedProblem& problem) {
    json j = nullptr;
    if (problem.equal_alpha()) {
        const auto s = closed_form::spectral(problem.market, problem.common_alpha(), problem.n());
        j = {{"theta_hat", s.theta_hat},   {"rho_hat", s.rho_hat},       {"theta_plus", s.theta_plus},
             {"theta_minus", s.theta_minus}, {"rho_plus", s.rho_plus}, {"rho_minus", s.rho_minus},
             {"kappa", s.kappa}};
        j["xi"] = s.xi ? json(*s.xi) : json(nullptr);
    } else if (problem.n() == 2) {
        j = json::object();
        try {
            const auto r =
                closed_form::two_player_quartic_roots(problem.market, problem.agents[0].alpha, problem.agents[1].alpha);
            j["quartic_roots"] = {r[0], r[1]};
        } catch (const Error& e) {
            j["quartic_roots"] = std::string(to_string(e.code()));
        }
    }
    return j;
}

json terms_to_json(const Strategy& s) {
    const auto* e = std::get_if<ExpSumStrategy>(&s);
    if (e == nullptr) return nullptr;
    json out = json::array();
    for (const auto& t : e->terms()) {
        out.push_back({{"coefficient", t.coefficient}, {"rate", t.rate}, {"anchor", t.anchor}, {"power", t.power}});
    }
    return out;
}

std::vector<GridStrategy> sample_profile(const std::vector<Strategy>& profile, const ValidatedProblem& problem,
                                         std::size_t N, double t_end) {
    std::vector<GridStrategy> out;
    for (const auto& s : profile) {
        if (const auto* g = std::get_if<GridStrategy>(&s)) {
            out.push_back(*g);
        } else {
            const auto& e = std::get<ExpSumStrategy>(s);
            out.push_back(sample_on_grid(e, problem.horizon.is_finite() ? problem.horizon.length() : t_end, N));
        }
    }
    return out;
}

double default_plot_end(const std::vector<Strategy>& profile) {
    double slowest = -std::numeric_limits<double>::infinity();
    for (const auto& s : profile) {
        if (const auto* e = std::get_if<ExpSumStrategy>(&s); e != nullptr && !e->terms().empty()) {
            slowest = std::max(slowest, e->slowest_rate());
        }
    }
    return std::isfinite(slowest) ? 10.0 / std::abs(slowest) : 10.0;
}

void write_csv(std::ostream& os, const std::vector<GridStrategy>& grids) {
    os << 't';
    for (std::size_t i = 0; i < grids.size(); ++i) os << ",X_" << i + 1;
    for (std::size_t i = 0; i < grids.size(); ++i) os << ",rate_" << i + 1;
    os << '\n';
    std::vector<std::vector<double>> rates;
    for (const auto& g : grids) rates.push_back(g.node_rates());
    const auto& ref = grids.front();
    for (std::size_t k = 0; k <= ref.intervals(); ++k) {
        os << format_double(ref.time(k));
        for (const auto& g : grids) os << ',' << format_double(g.positions()[k]);
        for (const auto& r : rates) os << ',' << format_double(r[k]);
        os << '\n';
    }
}

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        err << "cannot write " << path << '\n';
        return false;
    }
    f << content;
    return static_cast<bool>(f);
}

struct EquilibriumArgs {
    std::string config;
    std::string out;
    std::size_t grid = 400;
    double t_end = 0.0;
};

int cmd_equilibrium(const EquilibriumArgs& a, std::ostream& out, std::ostream& err) {
    auto problem = load_or_report(a.config, err);
    if (!problem) return kConfigError;
    json sidecar;
    std::ostringstream csv;
    try {
        EquilibriumOptions opts;
        opts.grid = a.grid;
        const auto eq = solve_equilibrium(*problem, opts);
        const double t_end = problem->horizon.is_finite() ? problem->horizon.length()
                             : a.t_end > 0.0             ? a.t_end
                                                         : default_plot_end(eq.strategies);
        const auto grids = sample_profile(eq.strategies, *problem, a.grid, t_end);
        write_csv(csv, grids);

        sidecar["method"] = eq.method;
        sidecar["problem"] = problem_to_json(*problem);
        sidecar["grid"] = {{"intervals", a.grid}, {"t_end", t_end}};
        sidecar["spectral"] = spectral_to_json(*problem);
        sidecar["residual"] = residual_to_json(residual_report(eq.strategies, *problem));
        std::vector<Strategy> sampled(grids.begin(), grids.end());
        json evals = json::array();
        json grid_evals = json::array();
        json terms = json::array();
        for (std::size_t i = 0; i < problem->n(); ++i) {
            evals.push_back(evaluation_to_json(mean_variance(eq.strategies, *problem, i)));
            grid_evals.push_back(evaluation_to_json(mean_variance(sampled, *problem, i)));
            terms.push_back(terms_to_json(eq.strategies[i]));
        }
        sidecar["evaluation"] = evals;
        sidecar["grid_evaluation"] = grid_evals;
        sidecar["terms"] = terms;
        if (eq.bvp_solution) {
            sidecar["bvp"] = {{"terminal_error_before_snap", eq.bvp_solution->terminal_error_before_snap},
                              {"quadrature_error_estimate", eq.bvp_solution->quadrature_error_estimate}};
        }
    } catch (const std::exception& e) {
        report_solver_error(e, err);
        return kSolverError;
    }
    const auto side_path = std::filesystem::path(a.out).replace_extension(".json").string();
    if (!write_file(a.out, csv.str(), err) || !write_file(side_path, sidecar.dump(2) + "\n", err)) {
        return kConfigError;
    }
    out << sidecar["method"].get<std::string>() << " -> " << a.out << '\n';
    return kOk;
}

struct ScanArgs {
    std::string config;
    std::string param;
    std::string out;
    double from = 0.0;
    double to = 1.0;
    std::size_t points = 11;
    double probe = 1.0;
    std::size_t agent = 1;
    double fraction = 0.0;
    std::size_t grid = 400;
};

int cmd_scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
    auto problem = load_or_report(a.config, err);
    if (!problem) return kConfigError;
    ScanParameter param{};
    try {
        param = parse_scan_parameter(a.param);
        if (a.points == 0) throw Error(ErrorCode::InvalidParam, "points", "need at least one point");
        if (a.agent == 0 || a.agent > problem->n()) throw Error(ErrorCode::InvalidParam, "agent", "out of range");
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    std::ostringstream csv;
    try {
        Probe probe;
        probe.agent = a.agent - 1;
        probe.t = a.probe;
        if (a.fraction > 0.0) probe.liquidation_fraction = a.fraction;
        EquilibriumOptions opts;
        opts.grid = a.grid;
        const auto grid = a.points == 1 ? std::vector<double>{a.from} : linspace(a.from, a.to, a.points);
        const auto points = parameter_scan(*problem, param, grid, probe, opts);
        csv << "param,probe_value,status\n";
        for (const auto& p : points) {
            csv << format_double(p.value) << ',' << (p.probe ? format_double(*p.probe) : std::string()) << ','
                << p.status << '\n';
        }
    } catch (const std::exception& e) {
        report_solver_error(e, err);
        return kSolverError;
    }
    if (a.out.empty()) {
        out << csv.str();
    } else if (!write_file(a.out, csv.str(), err)) {
        return kConfigError;
    }
    return kOk;
}

struct OracleArgs {
    std::string config;
    std::size_t grid = 200;
    double tol = 1e-2;
    double damping = 0.5;
    std::size_t max_iter = 10000;
};

int cmd_oracle_check(const OracleArgs& a, std::ostream& out, std::ostream& err) {
    auto problem = load_or_report(a.config, err);
    if (!problem) return kConfigError;
    try {
        const double T = problem->horizon.length();
        EquilibriumOptions opts;
        opts.grid = a.grid;
        const auto reference = solve_equilibrium(*problem, opts);
        const oracle::DiscreteGame game(*problem, a.grid);
        oracle::IterationOptions it;
        it.damping = a.damping;
        it.max_iter = a.max_iter;
        const auto nash = oracle::iterate_nash(game, it);
        const auto report = oracle::compare(nash.strategies(T), reference.strategies);

        out << "reference: " << reference.method << '\n';
        out << "iterations: " << nash.report.iterations << '\n';
        out << "converged: " << (nash.report.converged ? "yes" : "no") << '\n';
        out << "final_change: " << format_double(nash.report.final_change) << '\n';
        for (std::size_t i = 0; i < report.sup_gap.size(); ++i) {
            out << "agent " << i + 1 << ": sup_gap=" << format_double(report.sup_gap[i])
                << " relative_gap=" << format_double(report.relative_gap[i]) << '\n';
        }
        out << "max_relative: " << format_double(report.max_relative()) << " tol: " << format_double(a.tol) << '\n';
        if (!nash.report.converged) {
            err << "best-response iteration did not converge\n";
            return kNotConverged;
        }
        if (!(report.max_relative() <= a.tol)) {
            err << "oracle gap exceeds tolerance\n";
            return kToleranceBreach;
        }
    } catch (const std::exception& e) {
        report_solver_error(e, err);
        return kSolverError;
    }
    return kOk;
}

struct ClassifyArgs {
    double alpha_sigma2 = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
};

int cmd_classify(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
    if (!(a.lambda > 0.0) || !(a.gamma >= 0.0) || !(a.alpha_sigma2 >= 0.0) || !std::isfinite(a.lambda) ||
        !std::isfinite(a.gamma) || !std::isfinite(a.alpha_sigma2)) {
        err << "config error: need lambda > 0, gamma >= 0, alpha_sigma2 >= 0\n";
        return kConfigError;
    }
    const auto c = classify_role(a.alpha_sigma2, a.lambda, a.gamma);
    out << "role: " << to_string(c.role) << '\n' << "margin: " << format_double(c.margin) << '\n';
    return kOk;
}

struct MonteCarloArgs {
    std::string config;
    std::string out;
    std::size_t agent = 1;
    std::size_t grid = 400;
    MonteCarloConfig mc;
};

int cmd_montecarlo(const MonteCarloArgs& a, std::ostream& out, std::ostream& err) {
    auto problem = load_or_report(a.config, err);
    if (!problem) return kConfigError;
    if (a.agent == 0 || a.agent > problem->n()) {
        err << "config error: agent out of range\n";
        return kConfigError;
    }
    json j;
    try {
        EquilibriumOptions opts;
        opts.grid = a.grid;
        const auto eq = solve_equilibrium(*problem, opts);
        const auto r = monte_carlo_revenues(eq.strategies, *problem, a.agent - 1, a.mc);
        j = {{"method", eq.method},
             {"agent", a.agent},
             {"paths", a.mc.paths},
             {"time_steps", a.mc.time_steps},
             {"seed", a.mc.seed},
             {"mean", r.mean},
             {"mean_se", r.mean_se},
             {"variance", r.variance},
             {"variance_se", r.variance_se},
             {"cara_mean", r.cara_mean},
             {"cara_se", r.cara_se},
             {"horizon", r.horizon},
             {"tail_bound", r.tail_bound},
             {"analytic", evaluation_to_json(r.analytic)}};
    } catch (const std::exception& e) {
        report_solver_error(e, err);
        return kSolverError;
    }
    const auto text = j.dump(2) + "\n";
    if (a.out.empty()) {
        out << text;
    } else if (!write_file(a.out, text, err)) {
        return kConfigError;
    }
    return kOk;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<GridStrategy> read_strategy_csv(const std::string& path, bool liquidating) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    std::string line;
    std::getline(f, line);
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 3 || (columns - 1) % 2 != 0) throw Error(ErrorCode::ConfigError, "unexpected CSV header");
    const std::size_t n = (columns - 1) / 2;
    std::vector<std::vector<double>> x(n), r(n);
    double t_end = 0.0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p <= end) {
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc()) throw Error(ErrorCode::ConfigError, "bad number in CSV");
            row.push_back(v);
            p = res.ptr + 1;
        }
        if (row.size() != columns) throw Error(ErrorCode::ConfigError, "ragged CSV row");
        t_end = row[0];
        for (std::size_t i = 0; i < n; ++i) {
            x[i].push_back(row[1 + i]);
            r[i].push_back(row[1 + n + i]);
        }
    }
    std::vector<GridStrategy> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(liquidating ? GridStrategy::liquidating(t_end, std::move(x[i]), std::move(r[i]))
                                  : GridStrategy::truncated(t_end, std::move(x[i]), std::move(r[i])));
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Equilibria of the linear-impact liquidation game"};
    app.require_subcommand(1);

    EquilibriumArgs eq;
    auto* c_eq = app.add_subcommand("equilibrium", "Solve for the equilibrium and write CSV plus a JSON sidecar");
    c_eq->add_option("--config", eq.config, "problem JSON")->required();
    c_eq->add_option("--out", eq.out, "CSV output; the sidecar replaces the extension by .json")->required();
    c_eq->add_option("--grid", eq.grid, "grid intervals")->check(CLI::Range(8, 1 << 22));
    c_eq->add_option("--t-end", eq.t_end, "plot end for infinite horizons (default 10 / slowest rate)");

    ScanArgs sc;
    auto* c_sc = app.add_subcommand("scan", "Recompute the equilibrium along a parameter grid");
    c_sc->add_option("--config", sc.config, "problem JSON")->required();
    c_sc->add_option("--param", sc.param, "alpha_sigma2, lambda, gamma, n or T")->required();
    c_sc->add_option("--from", sc.from)->required();
    c_sc->add_option("--to", sc.to);
    c_sc->add_option("--points", sc.points);
    c_sc->add_option("--probe", sc.probe, "probe time");
    c_sc->add_option("--agent", sc.agent, "probed agent, 1-based");
    c_sc->add_option("--fraction", sc.fraction, "probe the effective liquidation time for this fraction instead");
    c_sc->add_option("--grid", sc.grid)->check(CLI::Range(8, 1 << 22));
    c_sc->add_option("--out", sc.out, "CSV output (standard output if omitted)");

    OracleArgs oc;
    auto* c_oc = app.add_subcommand("oracle-check", "Compare against the discrete best-response oracle");
    c_oc->add_option("--config", oc.config, "problem JSON")->required();
    c_oc->add_option("--grid", oc.grid)->check(CLI::Range(8, 1 << 20));
    c_oc->add_option("--tol", oc.tol);
    c_oc->add_option("--damping", oc.damping);
    c_oc->add_option("--max-iter", oc.max_iter);

    ClassifyArgs cl;
    auto* c_cl = app.add_subcommand("classify", "Role of a zero-inventory agent");
    c_cl->add_option("--alpha-sigma2", cl.alpha_sigma2)->required();
    c_cl->add_option("--lambda", cl.lambda)->required();
    c_cl->add_option("--gamma", cl.gamma)->required();

    MonteCarloArgs mc;
    auto* c_mc = app.add_subcommand("montecarlo", "Simulate revenues of one agent in the equilibrium");
    c_mc->add_option("--config", mc.config, "problem JSON")->required();
    c_mc->add_option("--agent", mc.agent, "1-based");
    c_mc->add_option("--paths", mc.mc.paths);
    c_mc->add_option("--steps", mc.mc.time_steps);
    c_mc->add_option("--seed", mc.mc.seed);
    c_mc->add_option("--threads", mc.mc.threads);
    c_mc->add_option("--grid", mc.grid)->check(CLI::Range(8, 1 << 22));
    c_mc->add_option("--out", mc.out, "JSON output (standard output if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    if (c_eq->parsed()) return cmd_equilibrium(eq, out, err);
    if (c_sc->parsed()) return cmd_scan(sc, out, err);
    if (c_oc->parsed()) return cmd_oracle_check(oc, out, err);
    if (c_cl->parsed()) return cmd_classify(cl, out, err);
    if (c_mc->parsed()) return cmd_montecarlo(mc, out, err);
    return kConfigError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("liqgame");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace liqgame::cli
