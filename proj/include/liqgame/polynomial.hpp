// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace liqgame {

/// Coefficients are in ascending order: a[0] + a[1] z + ... + a[d] z^d.
[[nodiscard]] std::complex<double> evaluate_polynomial(std::span<const double> a, std::complex<double> z);
[[nodiscard]] double evaluate_polynomial(std::span<const double> a, double x);

/// All d roots, from the eigenvalues of the companion matrix, each refined by
/// at most two Newton steps that are kept only when they reduce |p|.
/// Throws InvalidParam for a zero leading coefficient.
[[nodiscard]] std::vector<std::complex<double>> polynomial_roots(std::span<const double> a);

/// Real roots strictly below zero, ascending, with near-duplicates merged.
/// A root counts as real when |Im z| <= 1e-7 max(1, |z|) and as negative when
/// Re z < -1e-12 max(1, |z|).
[[nodiscard]] std::vector<double> negative_real_roots(std::span<const double> a);

}  // namespace liqgame
