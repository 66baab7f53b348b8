// SPDX-License-Identifier: Apache-2.0
#include "liqgame/integrals.hpp"

#include "liqgame/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace liqgame {

namespace {

// int_0^1 u^m e^{z u} du by series, |z| < 1.
double series_moment(int m, double z) {
    double term = 1.0;
    double sum = 0.0;
    for (int k = 0; k < 40; ++k) {
        const double add = term / (m + k + 1);
        sum += add;
        if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
        term *= z / (k + 1);
    }
    return sum;
}

constexpr std::array<double, 5> kNodes{0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                       0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> kWeights{0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                         0.1494513491505806, 0.0666713443086881};

}  // namespace

double exp_moment(int m, double s, double o, double L) {
    if (m < 0 || m > 2) throw Error(ErrorCode::InvalidParam, "m", "moments up to order 2 only");
    if (std::isinf(L)) {
        if (!(s < 0.0)) throw Error(ErrorCode::InvalidParam, "rate", "divergent integral on an infinite horizon");
        const double fact = m == 2 ? 2.0 : 1.0;
        return std::exp(o) * fact / std::pow(-s, m + 1);
    }
    if (L == 0.0) return 0.0;
    const double z = s * L;
    const double Lp = std::pow(L, m + 1);
    if (std::abs(z) < 1.0) return std::exp(o) * Lp * series_moment(m, z);
    if (z < 0.0) {
        // K_m = (e^z - m K_{m-1}) / z
        double k = std::expm1(z) / z;
        const double ez = std::exp(z);
        for (int j = 1; j <= m; ++j) k = (ez - j * k) / z;
        return std::exp(o) * Lp * k;
    }
    // G_m = e^{-z} K_m = (1 - m G_{m-1}) / z
    double g = -std::expm1(-z) / z;
    for (int j = 1; j <= m; ++j) g = (1.0 - j * g) / z;
    return std::exp(o + z) * Lp * g;
}

double integrate_product(std::span<const ExpTerm> f, std::span<const ExpTerm> g, double L) {
    double sum = 0.0;
    for (const auto& a : f) {
        for (const auto& b : g) {
            const double s = a.rate + b.rate;
            const double o = -a.rate * a.anchor - b.rate * b.anchor;
            sum += a.coefficient * b.coefficient * exp_moment(a.power + b.power, s, o, L);
        }
    }
    return sum;
}

double integrate_terms(std::span<const ExpTerm> f, double L) {
    double sum = 0.0;
    for (const auto& a : f) sum += a.coefficient * exp_moment(a.power, a.rate, -a.rate * a.anchor, L);
    return sum;
}

double simpson(std::span<const double> v, double h) {
    if (v.size() < 3) throw Error(ErrorCode::InvalidParam, "grid", "Simpson needs at least two intervals");
    const std::size_t N = v.size() - 1;
    std::size_t even = N % 2 == 0 ? N : N - 3;
    double sum = 0.0;
    if (even >= 2) {
        double s = v[0] + v[even];
        for (std::size_t k = 1; k < even; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * v[k];
        sum += s * h / 3.0;
    } else {
        even = 0;
    }
    if (N % 2 == 1) {
        const std::size_t k = N - 3;
        sum += 3.0 * h / 8.0 * (v[k] + 3.0 * v[k + 1] + 3.0 * v[k + 2] + v[k + 3]);
    }
    return sum;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, std::span<const double> breakpoints,
                      int panels) {
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) cuts.push_back(p);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double w = (cuts[c + 1] - cuts[c]) / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = cuts[c] + p * w;
            const double mid = lo + 0.5 * w;
            const double half = 0.5 * w;
            double s = 0.0;
            for (std::size_t k = 0; k < kNodes.size(); ++k) {
                s += kWeights[k] * (f(mid - half * kNodes[k]) + f(mid + half * kNodes[k]));
            }
            sum += s * half;
        }
    }
    return sum;
}

}  // namespace liqgame
