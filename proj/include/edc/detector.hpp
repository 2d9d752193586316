// SPDX-License-Identifier: Apache-2.0
//
// MAP detection on the averaged receive energy: Q-function, conditional
// densities, optimal decision boundaries and the exact average symbol error
// probability.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "edc/model.hpp"
#include "edc/types.hpp"

namespace edc {

/// Upper tail probability of the standard normal, Q(x) = P[Z > x].
/// Realized through erfc; results below the double underflow threshold
/// flush to zero, which is the intended behaviour for deep-tail SEPs.
template <typename Scalar>
Scalar q_function(Scalar x) {
    if (std::isnan(x)) throw std::domain_error("q_function: NaN input");
    constexpr Scalar inv_sqrt2 = Scalar(0.70710678118654752440084436210485L);
    return Scalar(0.5) * std::erfc(x * inv_sqrt2);
}

/// Gaussian density of the averaged energy given the transmitted symbol.
template <typename Scalar>
Scalar conditional_pdf(Scalar y_tilde, const EnergyStats<Scalar>& stats) {
    if (!(stats.variance > Scalar(0)))
        throw std::domain_error("conditional_pdf: variance must be > 0");
    const Scalar d = y_tilde - stats.mean;
    return std::exp(-d * d / (Scalar(2) * stats.variance)) /
           std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar> * stats.variance);
}

/// Log of conditional_pdf; usable where the density itself underflows.
template <typename Scalar>
Scalar log_conditional_pdf(Scalar y_tilde, const EnergyStats<Scalar>& stats) {
    if (!(stats.variance > Scalar(0)))
        throw std::domain_error("log_conditional_pdf: variance must be > 0");
    const Scalar d = y_tilde - stats.mean;
    return -d * d / (Scalar(2) * stats.variance) -
           Scalar(0.5) * std::log(Scalar(2) * std::numbers::pi_v<Scalar> * stats.variance);
}

namespace detail {

// Relative variance gap below which the closed-form boundary (a ratio with
// denominator sigma_{m+1}^2 - sigma_m^2) loses all significance. Strictly
// ordered powers keep the gap far above this; hitting it means bad input.
inline constexpr double kDegenerateVarianceGap = 1e-12;

template <typename Scalar>
void check_pair_index(int pair, int m) {
    if (pair < 0 || pair >= m - 1)
        throw std::out_of_range("boundary pair index " + std::to_string(pair) +
                                " out of range for M = " + std::to_string(m));
}

}  // namespace detail

/// Error contribution of the boundary between symbols `pair` and `pair`+1 as
/// a function of the threshold position: Q((l-mu_m)/s_m) + Q((mu_{m+1}-l)/s_{m+1}).
/// Convex on [mu_m, mu_{m+1}]; lambda outside that interval is a domain error.
template <typename Scalar>
Scalar pair_error_h(Scalar lambda, int pair, const Constellation<Scalar>& constellation,
                    const SystemParams<Scalar>& params) {
    detail::check_pair_index<Scalar>(pair, constellation.size());
    const auto lo = energy_stats(params, constellation.powers[pair]);
    const auto hi = energy_stats(params, constellation.powers[pair + 1]);
    if (!(lambda >= lo.mean && lambda <= hi.mean))
        throw std::domain_error("pair_error_h: lambda outside [mu_m, mu_{m+1}]");
    return q_function((lambda - lo.mean) / lo.stddev()) +
           q_function((hi.mean - lambda) / hi.stddev());
}

/// Optimal threshold between symbols `pair` and `pair`+1 (0-based); the
/// closed-form minimizer of pair_error_h, equivalently the crossing point of
/// the two conditional densities inside [mu_m, mu_{m+1}].
template <typename Scalar>
Scalar optimal_boundary(int pair, const Constellation<Scalar>& constellation,
                        const SystemParams<Scalar>& params) {
    detail::check_pair_index<Scalar>(pair, constellation.size());
    const Scalar p_lo = constellation.powers[pair];
    const Scalar p_hi = constellation.powers[pair + 1];
    const Scalar v_lo = energy_stats(params, p_lo).variance;
    const Scalar v_hi = energy_stats(params, p_hi).variance;
    const Scalar gap = v_hi - v_lo;
    if (!(gap / v_hi > Scalar(detail::kDegenerateVarianceGap)))
        throw DegenerateSpacingError("optimal_boundary: variance gap between symbols " +
                                     std::to_string(pair) + " and " + std::to_string(pair + 1) +
                                     " is degenerate");
    const Scalar dp = p_hi - p_lo;
    const Scalar root = std::sqrt(v_lo * v_hi * (dp * dp + gap * std::log(v_hi / v_lo)));
    return params.noise_var + (p_lo * v_hi - p_hi * v_lo + root) / gap;
}

/// All M-1 interior thresholds for a constellation. The thresholds must come
/// out strictly increasing or the decision regions are ill-formed.
template <typename Scalar>
Boundaries<Scalar> optimal_boundaries(const Constellation<Scalar>& constellation,
                                      const SystemParams<Scalar>& params) {
    const int m = constellation.size();
    Boundaries<Scalar> b;
    b.lambdas.resize(m - 1);
    for (int i = 0; i < m - 1; ++i) {
        b.lambdas[i] = optimal_boundary(i, constellation, params);
        if (i > 0 && !(b.lambdas[i] > b.lambdas[i - 1]))
            throw ValidationError("optimal_boundaries: thresholds " + std::to_string(i - 1) +
                                  " and " + std::to_string(i) + " are not increasing");
    }
    return b;
}

namespace detail {

template <typename Scalar>
void check_shapes(const Constellation<Scalar>& c, const Boundaries<Scalar>& b,
                  const SystemParams<Scalar>& params) {
    if (c.size() != params.constellation_size)
        throw ValidationError("constellation size " + std::to_string(c.size()) +
                              " does not match params M = " +
                              std::to_string(params.constellation_size));
    if (b.size() != c.size() - 1)
        throw ValidationError("boundaries size " + std::to_string(b.size()) +
                              " does not match M - 1 = " + std::to_string(c.size() - 1));
}

}  // namespace detail

/// Error probability of symbol `index` (0-based) under the given thresholds.
/// Edge symbols lose mass through one boundary, interior symbols through two.
template <typename Scalar>
Scalar per_symbol_error(int index, const Constellation<Scalar>& constellation,
                        const Boundaries<Scalar>& boundaries, const SystemParams<Scalar>& params) {
    detail::check_shapes(constellation, boundaries, params);
    const int m = constellation.size();
    if (index < 0 || index >= m)
        throw std::out_of_range("per_symbol_error: symbol index " + std::to_string(index) +
                                " out of range for M = " + std::to_string(m));
    const auto stats = energy_stats(params, constellation.powers[index]);
    Scalar p = Scalar(0);
    if (index > 0)  // mass escaping below lambda_{m-1}
        p += q_function((stats.mean - boundaries.lambdas[index - 1]) / stats.stddev());
    if (index < m - 1)  // mass escaping above lambda_m
        p += q_function((boundaries.lambdas[index] - stats.mean) / stats.stddev());
    return p;
}

/// Average symbol error probability over equiprobable symbols.
template <typename Scalar>
Scalar average_sep(const Constellation<Scalar>& constellation, const Boundaries<Scalar>& boundaries,
                   const SystemParams<Scalar>& params) {
    detail::check_shapes(constellation, boundaries, params);
    Scalar sum = Scalar(0);
    for (int i = 0; i < constellation.size(); ++i)
        sum += per_symbol_error(i, constellation, boundaries, params);
    return sum / Scalar(constellation.size());
}

/// Maps an observed averaged energy to the 0-based symbol index whose decision
/// region contains it. Regions are half-open: [lambda_{m-1}, lambda_m).
template <typename Scalar>
int decide(Scalar y_tilde, const Boundaries<Scalar>& boundaries) {
    if (std::isnan(y_tilde)) throw std::domain_error("decide: NaN input");
    const Scalar* begin = boundaries.lambdas.data();
    const Scalar* end = begin + boundaries.lambdas.size();
    return static_cast<int>(std::upper_bound(begin, end, y_tilde) - begin);
}

}  // namespace edc
