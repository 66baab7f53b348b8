// SPDX-License-Identifier: Apache-2.0
#include "liqgame/bvp.hpp"

#include "liqgame/closed_form.hpp"
#include "liqgame/error.hpp"
#include "liqgame/system.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <Eigen/SparseQR>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>

namespace liqgame::bvp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// e^{l M} and the weights W_m = int_0^l e^{(l - s) M} g s^m ds, m = 0, 1, 2,
// read off the exponential of an augmented matrix.
struct StepKernel {
    MatrixXd E;
    MatrixXd W;  // d x 3

    StepKernel(const MatrixXd& M, const VectorXd& g, double l) {
        const Index d = M.rows();
        MatrixXd aug = MatrixXd::Zero(d + 3, d + 3);
        aug.topLeftCorner(d, d) = l * M;
        aug.block(0, d, d, 1) = l * g;
        aug(d, d + 1) = l;
        aug(d + 1, d + 2) = l;
        const MatrixXd ex = aug.exp();
        E = ex.topLeftCorner(d, d);
        W.resize(d, 3);
        W.col(0) = ex.block(0, d, d, 1);
        W.col(1) = ex.block(0, d + 1, d, 1);
        W.col(2) = 2.0 * ex.block(0, d + 2, d, 1);
    }

    // Particular increment for b interpolated through (b0, bm, b1) on [0, len].
    [[nodiscard]] VectorXd apply(double b0, double bm, double b1, double len) const {
        const double c1 = (-3.0 * b0 + 4.0 * bm - b1) / len;
        const double c2 = 2.0 * (b0 - 2.0 * bm + b1) / (len * len);
        return b0 * W.col(0) + c1 * W.col(1) + c2 * W.col(2);
    }
};

struct Forcing {
    std::vector<double> half;  // b(j h / 2), j = 0..2N
    const std::function<double(double)>* fn = nullptr;
    std::vector<double> breakpoints;
    bool zero = false;
};

struct CoreResult {
    MatrixXd Z;     // d x (N + 1)
    MatrixXd Zmid;  // d x N
    std::string method;
    double quadrature_error = 0.0;
};

bool breakpoint_inside(const std::vector<double>& bps, double a, double b) {
    const double eps = 1e-12 * std::max(1.0, std::abs(b));
    return std::any_of(bps.begin(), bps.end(), [&](double p) { return p > a + eps && p < b - eps; });
}

double node_time(double T, std::size_t k, std::size_t N) {
    return k == N ? T : T * static_cast<double>(k) / static_cast<double>(N);
}

struct StepForcing {
    std::vector<VectorXd> q;
    std::vector<VectorXd> q_half;
    double relative_error = 0.0;
};

StepForcing step_forcing(const MatrixXd& M, const VectorXd& g, const Forcing& forcing, double T, std::size_t N,
                         const StepKernel& full, const StepKernel& half, double tolerance) {
    const Index d = M.rows();
    const double h = T / static_cast<double>(N);
    StepForcing out;
    out.q.assign(N, VectorXd::Zero(d));
    out.q_half.assign(N, VectorXd::Zero(d));
    if (forcing.zero) return out;

    std::vector<bool> split(N, false);
    std::map<double, StepKernel> piece_kernels;
    for (std::size_t k = 0; k < N; ++k) {
        const double a = node_time(T, k, N);
        const double b = node_time(T, k + 1, N);
        if (forcing.fn != nullptr && breakpoint_inside(forcing.breakpoints, a, b)) {
            // Integrate piece by piece so a kinked drift is handled exactly.
            split[k] = true;
            const double mid = a + 0.5 * h;
            std::vector<double> cuts{a, mid, b};
            for (double p : forcing.breakpoints) {
                if (p > a && p < b) cuts.push_back(p);
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end(),
                                   [&](double x, double y) { return std::abs(x - y) <= 1e-14 * std::max(1.0, T); }),
                       cuts.end());
            VectorXd acc = VectorXd::Zero(d);
            const auto& fn = *forcing.fn;
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                const double lo = cuts[c];
                const double hi = cuts[c + 1];
                const double len = hi - lo;
                auto it = piece_kernels.find(len);
                if (it == piece_kernels.end()) it = piece_kernels.emplace(len, StepKernel(M, g, len)).first;
                acc = it->second.E * acc + it->second.apply(fn(lo), fn(0.5 * (lo + hi)), fn(hi), len);
                if (std::abs(hi - mid) <= 1e-14 * std::max(1.0, T)) out.q_half[k] = acc;
            }
            out.q[k] = acc;
            continue;
        }
        const double b0 = forcing.half[2 * k];
        const double bm = forcing.half[2 * k + 1];
        const double b1 = forcing.half[2 * k + 2];
        out.q[k] = full.apply(b0, bm, b1, h);
        const double c1 = (-3.0 * b0 + 4.0 * bm - b1) / h;
        const double c2 = 2.0 * (b0 - 2.0 * bm + b1) / (h * h);
        out.q_half[k] = b0 * half.W.col(0) + c1 * half.W.col(1) + c2 * half.W.col(2);
    }

    // Richardson: two fine steps against one step of twice the length.
    if (N >= 2) {
        const StepKernel coarse(M, g, 2.0 * h);
        double err = 0.0;
        double norm = 0.0;
        for (std::size_t j = 0; 2 * j + 1 < N; ++j) {
            const std::size_t k = 2 * j;
            if (split[k] || split[k + 1]) continue;
            if (forcing.fn != nullptr &&
                breakpoint_inside(forcing.breakpoints, node_time(T, k, N), node_time(T, k + 2, N))) {
                continue;
            }
            const VectorXd fine = full.E * out.q[k] + out.q[k + 1];
            const VectorXd rough =
                coarse.apply(forcing.half[2 * k], forcing.half[2 * k + 2], forcing.half[2 * k + 4], 2.0 * h);
            err += (fine - rough).norm();
            norm += fine.norm();
        }
        out.relative_error = norm > 0.0 ? err / 15.0 / norm : 0.0;
        if (out.relative_error > tolerance) {
            throw Error(ErrorCode::QuadratureUnderResolved,
                        "drift quadrature error estimate " + std::to_string(out.relative_error) +
                            " exceeds tolerance; refine the grid");
        }
    }
    return out;
}

VectorXd shooting_initial_rate(const MatrixXd& Phi, const VectorXd& x0, const VectorXd& pT, Index n,
                               LinearSolve solve) {
    const MatrixXd Pxy = Phi.topRightCorner(n, n);
    const VectorXd rhs = -Phi.topLeftCorner(n, n) * x0 - pT.head(n);
    if (solve == LinearSolve::Direct) {
        Eigen::PartialPivLU<MatrixXd> lu(Pxy);
        if (!(lu.rcond() > 1e-14)) {
            throw Error(ErrorCode::SingularShootingMatrix,
                        "shooting matrix is numerically singular; use the balanced method");
        }
        return lu.solve(rhs);
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Pxy);
    if (cod.rank() < n) {
        throw Error(ErrorCode::SingularShootingMatrix,
                    "shooting matrix is rank deficient; use the balanced method");
    }
    return cod.solve(rhs);
}

MatrixXd balanced_solve(const StepKernel& full, const StepForcing& sf, const VectorXd& x0, std::size_t N, Index n,
                        LinearSolve solve) {
    const Index d = 2 * n;
    const Index size = d * static_cast<Index>(N + 1);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(2 * n + static_cast<Index>(N) * d * (d + 1)));
    VectorXd rhs = VectorXd::Zero(size);
    for (Index i = 0; i < n; ++i) {
        entries.emplace_back(i, i, 1.0);
        rhs(i) = x0(i);
    }
    for (std::size_t k = 0; k < N; ++k) {
        const Index row = n + static_cast<Index>(k) * d;
        const Index col = static_cast<Index>(k) * d;
        for (Index r = 0; r < d; ++r) {
            entries.emplace_back(row + r, col + d + r, 1.0);
            for (Index c = 0; c < d; ++c) {
                const double v = full.E(r, c);
                if (v != 0.0) entries.emplace_back(row + r, col + c, -v);
            }
            rhs(row + r) = sf.q[k](r);
        }
    }
    const Index last_row = n + static_cast<Index>(N) * d;
    const Index last_col = static_cast<Index>(N) * d;
    for (Index i = 0; i < n; ++i) entries.emplace_back(last_row + i, last_col + i, 1.0);

    Eigen::SparseMatrix<double> A(size, size);
    A.setFromTriplets(entries.begin(), entries.end());
    A.makeCompressed();
    VectorXd z;
    if (solve == LinearSolve::Direct) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
            throw Error(ErrorCode::SingularShootingMatrix, "balanced system factorization failed");
        }
        z = lu.solve(rhs);
    } else {
        Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
        qr.compute(A);
        if (qr.info() != Eigen::Success || qr.rank() < size) {
            throw Error(ErrorCode::SingularShootingMatrix, "balanced system is rank deficient");
        }
        z = qr.solve(rhs);
    }
    return Eigen::Map<const MatrixXd>(z.data(), d, static_cast<Index>(N + 1));
}

CoreResult solve_core(const MatrixXd& M, const VectorXd& g, const Forcing& forcing, const VectorXd& x0, double T,
                      std::size_t N, const BvpOptions& options) {
    if (N < kMinGridIntervals) throw Error(ErrorCode::InvalidParam, "grid", "N must be at least 8");
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidParam, "T", "T must be positive");
    const Index d = M.rows();
    const Index n = d / 2;
    const double h = T / static_cast<double>(N);
    const StepKernel full(M, g, h);
    const StepKernel half(M, g, 0.5 * h);
    const StepForcing sf = step_forcing(M, g, forcing, T, N, full, half, options.quadrature_tolerance);

    ShootingMethod method = options.method;
    if (method == ShootingMethod::Automatic) {
        const Eigen::VectorXcd ev = M.eigenvalues();
        double abscissa = 0.0;
        for (Index i = 0; i < ev.size(); ++i) abscissa = std::max(abscissa, std::abs(ev(i).real()));
        method = abscissa * T > options.balance_threshold ? ShootingMethod::Balanced : ShootingMethod::Single;
    }

    CoreResult out;
    out.quadrature_error = sf.relative_error;
    if (method == ShootingMethod::Single) {
        const MatrixXd Phi = (T * M).exp();
        VectorXd p = VectorXd::Zero(d);
        for (std::size_t k = 0; k < N; ++k) p = full.E * p + sf.q[k];
        VectorXd z(d);
        z.head(n) = x0;
        z.tail(n) = shooting_initial_rate(Phi, x0, p, n, options.linear_solve);
        out.Z.resize(d, static_cast<Index>(N + 1));
        out.Z.col(0) = z;
        for (std::size_t k = 0; k < N; ++k) {
            out.Z.col(static_cast<Index>(k + 1)) = full.E * out.Z.col(static_cast<Index>(k)) + sf.q[k];
        }
        out.method = "single_shooting";
    } else {
        out.Z = balanced_solve(full, sf, x0, N, n, options.linear_solve);
        out.Z.block(0, 0, n, 1) = x0;
        out.method = "balanced";
    }
    out.Zmid.resize(d, static_cast<Index>(N));
    for (std::size_t k = 0; k < N; ++k) {
        out.Zmid.col(static_cast<Index>(k)) = half.E * out.Z.col(static_cast<Index>(k)) + sf.q_half[k];
    }
    return out;
}

Forcing sample_forcing(const std::function<double(double)>& fn, std::vector<double> breakpoints, bool zero, double T,
                       std::size_t N) {
    Forcing f;
    f.zero = zero;
    f.fn = &fn;
    f.breakpoints = std::move(breakpoints);
    if (!zero) {
        f.half.resize(2 * N + 1);
        for (std::size_t j = 0; j <= 2 * N; ++j) f.half[j] = fn(node_time(T, j, 2 * N));
    }
    return f;
}

MatrixXd scalar_matrix(const ScalarEquation& eq) {
    if (eq.k2 == 0.0) throw Error(ErrorCode::InvalidParam, "k2", "second-order coefficient must be nonzero");
    MatrixXd M(2, 2);
    M << 0.0, 1.0, -eq.k0 / eq.k2, -eq.k1 / eq.k2;
    return M;
}

ScalarSolution scalar_from_core(const CoreResult& core, double T) {
    const auto N = static_cast<std::size_t>(core.Zmid.cols());
    std::vector<double> u(N + 1), du(N + 1), um(N), dum(N);
    for (std::size_t k = 0; k <= N; ++k) {
        u[k] = core.Z(0, static_cast<Index>(k));
        du[k] = core.Z(1, static_cast<Index>(k));
    }
    for (std::size_t k = 0; k < N; ++k) {
        um[k] = core.Zmid(0, static_cast<Index>(k));
        dum[k] = core.Zmid(1, static_cast<Index>(k));
    }
    return {GridStrategy::liquidating(T, u, du), du, um, dum};
}

}  // namespace

Eigen::VectorXd FirstOrderSystem::f(double t) const {
    if (drift_is_zero) return Eigen::VectorXd::Zero(forcing.size());
    return forcing * drift(t);
}

FirstOrderSystem assemble(const ValidatedProblem& problem) {
    const std::size_t n = problem.n();
    const auto alphas = problem.alphas();
    FirstOrderSystem sys;
    sys.n = n;
    sys.M = system_matrix(problem.market, alphas);
    const MatrixXd B = system_B(problem.market, n);
    const MatrixXd Bi = system_B_inverse(problem.market, n);
    const auto I = MatrixXd::Identity(static_cast<Index>(2 * n), static_cast<Index>(2 * n));
    if ((B * Bi - I).lpNorm<Eigen::Infinity>() > 1e-12 * std::max(1.0, problem.market.lambda * (n + 1))) {
        throw std::logic_error("B B^{-1} != I in system assembly");
    }
    const MatrixXd C = system_C(problem.market, alphas);
    if ((Bi * C - sys.M).lpNorm<Eigen::Infinity>() > 1e-12 * std::max(1.0, sys.M.lpNorm<Eigen::Infinity>())) {
        throw std::logic_error("M != B^{-1} C in system assembly");
    }
    sys.forcing = forcing_direction(problem.market, n);
    const DriftSpec drift = problem.market.drift;
    sys.drift = [drift](double t) { return drift(t); };
    sys.breakpoints = drift.breakpoints();
    sys.drift_is_zero = drift.is_identically_zero();
    sys.residual_model = ResidualModel::from_problem(problem);
    return sys;
}

FirstOrderSystem with_drift(FirstOrderSystem system, std::function<double(double)> drift,
                            std::vector<double> breakpoints) {
    system.drift = drift;
    system.breakpoints = breakpoints;
    system.drift_is_zero = false;
    system.residual_model.drift = std::move(drift);
    system.residual_model.breakpoints = std::move(breakpoints);
    return system;
}

BvpSolution solve_finite(const FirstOrderSystem& system, const Eigen::VectorXd& x0, double T, std::size_t N,
                         const BvpOptions& options) {
    const auto n = static_cast<Index>(system.n);
    if (x0.size() != n) throw Error(ErrorCode::InvalidParam, "x0", "initial positions do not match the system");
    const Forcing forcing = sample_forcing(system.drift, system.breakpoints, system.drift_is_zero, T, N);
    const CoreResult core = solve_core(system.M, system.forcing, forcing, x0, T, N, options);

    BvpSolution out;
    out.method = core.method;
    out.quadrature_error_estimate = core.quadrature_error;
    out.derivative = core.Z.bottomRows(n).transpose();
    std::vector<double> x0v(x0.data(), x0.data() + n);
    for (Index i = 0; i < n; ++i) {
        std::vector<double> pos(N + 1), rate(N + 1);
        for (std::size_t k = 0; k <= N; ++k) {
            pos[k] = core.Z(i, static_cast<Index>(k));
            rate[k] = core.Z(n + i, static_cast<Index>(k));
        }
        out.terminal_error_before_snap =
            std::max(out.terminal_error_before_snap, std::abs(pos[N]) / std::max(1.0, std::abs(x0(i))));
        out.strategies.push_back(GridStrategy::liquidating(T, std::move(pos), std::move(rate)));
    }
    out.residual = residual_report(out.strategies, system.residual_model, x0v);
    return out;
}

ScalarSolution solve_scalar(const ScalarEquation& equation, const std::vector<double>& rhs_half_nodes, double left,
                            double T, std::size_t N, const BvpOptions& options) {
    if (rhs_half_nodes.size() != 2 * N + 1) {
        throw Error(ErrorCode::InvalidParam, "rhs", "expected 2N + 1 half-node samples");
    }
    Forcing f;
    f.half = rhs_half_nodes;
    f.zero = std::all_of(f.half.begin(), f.half.end(), [](double v) { return v == 0.0; });
    const MatrixXd M = scalar_matrix(equation);
    VectorXd g(2);
    g << 0.0, 1.0 / equation.k2;
    VectorXd x0(1);
    x0 << left;
    return scalar_from_core(solve_core(M, g, f, x0, T, N, options), T);
}

ScalarSolution solve_scalar(const ScalarEquation& equation, const std::function<double(double)>& rhs, double left,
                            double T, std::size_t N, const BvpOptions& options) {
    std::vector<double> half(2 * N + 1);
    for (std::size_t j = 0; j <= 2 * N; ++j) half[j] = rhs(node_time(T, j, 2 * N));
    return solve_scalar(equation, half, left, T, N, options);
}

ScalarSolution solve_aggregate(const ValidatedProblem& problem, std::size_t N, const BvpOptions& options) {
    const double T = problem.horizon.length();
    const double a = problem.common_alpha() * problem.market.sigma * problem.market.sigma;
    const auto n = static_cast<double>(problem.n());
    const ScalarEquation eq{a, -(n - 1.0) * problem.market.gamma, -(n + 1.0) * problem.market.lambda};
    const DriftSpec& b = problem.market.drift;
    std::vector<double> rhs(2 * N + 1);
    for (std::size_t j = 0; j <= 2 * N; ++j) rhs[j] = n * b(node_time(T, j, 2 * N));
    return solve_scalar(eq, rhs, problem.initial_positions().sum(), T, N, options);
}

ScalarSolution solve_individual(const ValidatedProblem& problem, std::size_t agent, const ScalarSolution& aggregate,
                                std::size_t N, const BvpOptions& options) {
    if (agent >= problem.n()) throw Error(ErrorCode::InvalidParam, "agent", "agent index out of range");
    if (aggregate.solution.intervals() != N) throw Error(ErrorCode::GridMismatch, "aggregate grid differs");
    const double T = problem.horizon.length();
    const double a = problem.common_alpha() * problem.market.sigma * problem.market.sigma;
    const double g = problem.market.gamma;
    const double np1 = static_cast<double>(problem.n()) + 1.0;
    const DriftSpec& b = problem.market.drift;
    // lambda S'' is eliminated with the aggregate equation.
    std::vector<double> rhs(2 * N + 1);
    const auto& S = aggregate.solution.positions();
    for (std::size_t j = 0; j <= 2 * N; ++j) {
        const std::size_t k = j / 2;
        const bool node = j % 2 == 0;
        const double s = node ? S[k] : aggregate.midpoint_value[k];
        const double ds = node ? aggregate.derivative[k] : aggregate.midpoint_derivative[k];
        rhs[j] = (b(node_time(T, j, 2 * N)) + 2.0 * g * ds + a * s) / np1;
    }
    const ScalarEquation eq{a, g, -problem.market.lambda};
    return solve_scalar(eq, rhs, problem.agents[agent].x0, T, N, options);
}

std::vector<GridStrategy> solve_equal_alpha_composed(const ValidatedProblem& problem, std::size_t N,
                                                     const BvpOptions& options) {
    const ScalarSolution aggregate = solve_aggregate(problem, N, options);
    std::vector<GridStrategy> out;
    for (std::size_t i = 0; i < problem.n(); ++i) {
        out.push_back(solve_individual(problem, i, aggregate, N, options).solution);
    }
    return out;
}

std::vector<ExpSumStrategy> solve_infinite(const FirstOrderSystem& system, const Eigen::VectorXd& x0,
                                           const ValidatedProblem& problem) {
    const auto n = static_cast<Index>(system.n);
    if (problem.horizon.is_finite()) throw Error(ErrorCode::InvalidParam, "horizon", "expected infinite horizon");
    if (!system.drift_is_zero) throw Error(ErrorCode::UnsupportedCase, "infinite horizon requires zero drift");

    std::vector<double> candidates;
    if (problem.equal_alpha()) {
        const SpectralData s = closed_form::spectral(problem.market, problem.common_alpha(), problem.n());
        candidates = {s.theta_minus, s.rho_minus};
    } else if (problem.n() == 2) {
        const auto r = closed_form::two_player_quartic_roots(problem.market, problem.agents[0].alpha,
                                                             problem.agents[1].alpha);
        candidates = {r[0], r[1]};
    } else {
        throw Error(ErrorCode::UnsupportedCase, "infinite horizon with n > 2 requires equal risk aversions");
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<double> rates;
    for (double tau : candidates) {
        if (!rates.empty() && std::abs(tau - rates.back()) <= 1e-9 * std::max(1.0, std::abs(tau))) continue;
        rates.push_back(tau);
    }

    // Null spaces of M - tau I give the stable eigenvectors (v, tau v).
    const double tol = 1e-9 * std::max(1.0, system.M.lpNorm<Eigen::Infinity>());
    std::vector<double> basis_rates;
    std::vector<VectorXd> basis;
    for (double tau : rates) {
        const MatrixXd shifted = system.M - tau * MatrixXd::Identity(2 * n, 2 * n);
        Eigen::JacobiSVD<MatrixXd> svd(shifted, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        for (Index k = 0; k < sv.size(); ++k) {
            if (sv(k) <= tol) {
                basis.push_back(svd.matrixV().col(k).head(n));
                basis_rates.push_back(tau);
            }
        }
    }
    if (static_cast<Index>(basis.size()) < n) {
        throw Error(ErrorCode::StableSubspaceDeficient, "found " + std::to_string(basis.size()) +
                                                            " stable directions for " + std::to_string(n) +
                                                            " agents");
    }
    MatrixXd V(n, static_cast<Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) V.col(static_cast<Index>(k)) = basis[k];
    Eigen::ColPivHouseholderQR<MatrixXd> qr(V);
    qr.setThreshold(1e-10);
    if (qr.rank() < n || V.cols() != n) {
        throw Error(ErrorCode::StableSubspaceDeficient, "stable directions do not form a basis");
    }
    const VectorXd c = qr.solve(x0);

    std::vector<ExpSumStrategy> out;
    for (Index i = 0; i < n; ++i) {
        std::vector<ExpTerm> terms;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const double coeff = c(static_cast<Index>(k)) * V(i, static_cast<Index>(k));
            auto it = std::find_if(terms.begin(), terms.end(),
                                   [&](const ExpTerm& t) { return t.rate == basis_rates[k]; });
            if (it != terms.end()) {
                it->coefficient += coeff;
            } else {
                terms.push_back({coeff, basis_rates[k], 0.0, 0});
            }
        }
        out.emplace_back(std::move(terms), Horizon::infinite());
    }
    return out;
}

}  // namespace liqgame::bvp
