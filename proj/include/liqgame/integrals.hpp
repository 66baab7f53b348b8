// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "liqgame/strategy.hpp"

#include <functional>
#include <span>
#include <vector>

namespace liqgame {

/// int_0^L t^m e^{s t + o} dt for m in {0, 1, 2}; L may be +infinity when s < 0.
/// Evaluated without forming e^{s L} separately from e^{o}.
[[nodiscard]] double exp_moment(int m, double s, double o, double L);

/// int_0^L f(t) g(t) dt for two exponential sums.
[[nodiscard]] double integrate_product(std::span<const ExpTerm> f, std::span<const ExpTerm> g, double L);
/// int_0^L f(t) dt.
[[nodiscard]] double integrate_terms(std::span<const ExpTerm> f, double L);

/// Composite Simpson on uniform samples (3/8 rule on the last three
/// intervals when the interval count is odd). Needs at least 2 intervals.
[[nodiscard]] double simpson(std::span<const double> values, double h);

/// Composite 10-point Gauss-Legendre on [a, b]: the interval is cut at every
/// breakpoint and each piece split into `panels` equal panels.
[[nodiscard]] double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                    std::span<const double> breakpoints = {}, int panels = 16);

}  // namespace liqgame
