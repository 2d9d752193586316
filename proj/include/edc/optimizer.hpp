// SPDX-License-Identifier: Apache-2.0
//
// Power allocation minimizing the average symbol error probability under the
// average power budget: the alternating boundary/power algorithm, an
// exhaustive grid search used as its oracle, and a numerical probe of the
// objective's convexity.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "edc/detector.hpp"
#include "edc/model.hpp"
#include "edc/types.hpp"

namespace edc {

template <typename Scalar>
struct IterationRecord {
    Constellation<Scalar> constellation;
    Boundaries<Scalar> boundaries;  // optimal thresholds for this constellation
    Scalar sep;                     // average SEP at those thresholds
    bool clamped;                   // power update hit the minimal-spacing floor
};

template <typename Scalar>
struct OptResult {
    Constellation<Scalar> constellation;
    Boundaries<Scalar> boundaries;
    Scalar sep;
    int iterations;
    std::vector<IterationRecord<Scalar>> trace;
    bool converged;
};

/// Linear-ramp start: p_m = 2*p_bar*(m-1)/(M-1). Mean is exactly p_bar and
/// the first power is 0.
template <typename Scalar>
Constellation<Scalar> init_powers(const SystemParams<Scalar>& params) {
    const int m = params.constellation_size;
    VectorX<Scalar> p(m);
    for (int i = 0; i < m; ++i)
        p[i] = Scalar(2) * params.avg_power * Scalar(i) / Scalar(m - 1);
    return validate_constellation<Scalar>(p, params);
}

/// Geometric-gap start with the same mean and p_1 = 0; used to confirm that
/// the alternating algorithm is insensitive to initialization.
template <typename Scalar>
Constellation<Scalar> init_powers_geometric(const SystemParams<Scalar>& params,
                                            Scalar ratio = Scalar(1.7)) {
    const int m = params.constellation_size;
    VectorX<Scalar> p(m);
    p[0] = Scalar(0);
    for (int i = 1; i < m; ++i) p[i] = p[i - 1] * ratio + Scalar(1);
    p *= params.avg_power / p.mean();
    return validate_constellation<Scalar>(p, params);
}

template <typename Scalar>
struct PowerUpdate {
    Constellation<Scalar> constellation;
    bool clamped;
};

/// One power step for fixed thresholds: p_1 = 0, interior powers at the
/// midpoint rule p_m = (lambda_m + lambda_{m-1})/2 - sigma_z^2, and the top
/// power closed from the budget, p_M = M*p_bar - sum(p_1..p_{M-1}). A top
/// power landing between two interior powers is inserted at its sorted
/// position. Interior values that would break the strict ordering are lifted
/// to a minimal spacing above their predecessor and flagged.
template <typename Scalar>
PowerUpdate<Scalar> update_powers(const Boundaries<Scalar>& boundaries,
                                  const SystemParams<Scalar>& params) {
    const int m = params.constellation_size;
    if (boundaries.size() != m - 1)
        throw ValidationError("update_powers: expected " + std::to_string(m - 1) +
                              " boundaries, got " + std::to_string(boundaries.size()));
    const Scalar spacing = Scalar(1e-9) * params.avg_power;
    bool clamped = false;

    std::vector<Scalar> p;
    p.reserve(m);
    p.push_back(Scalar(0));
    for (int i = 1; i < m - 1; ++i) {
        const Scalar raw =
            (boundaries.lambdas[i] + boundaries.lambdas[i - 1]) / Scalar(2) - params.noise_var;
        const Scalar floor = p.back() + spacing;
        if (raw < floor) {
            p.push_back(floor);
            clamped = true;
        } else {
            p.push_back(raw);
        }
    }
    Scalar partial = Scalar(0);
    for (const Scalar v : p) partial += v;
    const Scalar top = Scalar(m) * params.avg_power - partial;
    if (!(top > Scalar(0)))
        throw InfeasibleBudgetError(
            "update_powers: budget closure yields a non-positive top power");

    // Insert the closed top power at its sorted position (the reordering rule).
    auto pos = std::lower_bound(p.begin(), p.end(), top);
    p.insert(pos, top);

    VectorX<Scalar> powers = Eigen::Map<const VectorX<Scalar>>(p.data(), m);
    return {validate_constellation<Scalar>(powers, params), clamped};
}

/// Alternates optimal thresholds and power updates from the linear-ramp start
/// until ||p - p_prev||^2 < epsilon or max_iter. One iteration is one
/// (threshold step + power step) pair; the trace keeps every iterate with its
/// own optimal thresholds and SEP.
template <typename Scalar>
OptResult<Scalar> optimize(const SystemParams<Scalar>& params, Scalar epsilon = Scalar(1e-6),
                           int max_iter = 1000) {
    if (!(epsilon > Scalar(0))) throw ValidationError("optimize: epsilon must be > 0");
    if (max_iter < 1) throw ValidationError("optimize: max_iter must be >= 1");

    OptResult<Scalar> result;
    auto record = [&](Constellation<Scalar> c, bool clamped) -> const IterationRecord<Scalar>& {
        IterationRecord<Scalar> rec;
        rec.boundaries = optimal_boundaries(c, params);
        rec.sep = average_sep(c, rec.boundaries, params);
        rec.constellation = std::move(c);
        rec.clamped = clamped;
        result.trace.push_back(std::move(rec));
        return result.trace.back();
    };

    record(init_powers(params), false);
    result.converged = false;
    result.iterations = 0;
    for (int iter = 1; iter <= max_iter; ++iter) {
        const auto& prev = result.trace.back();
        PowerUpdate<Scalar> update = update_powers(prev.boundaries, params);
        const Scalar step2 = (update.constellation.powers - prev.constellation.powers).squaredNorm();
        record(std::move(update.constellation), update.clamped);
        result.iterations = iter;
        if (step2 < epsilon) {
            result.converged = true;
            break;
        }
    }
    const auto& last = result.trace.back();
    result.constellation = last.constellation;
    result.boundaries = last.boundaries;
    result.sep = last.sep;
    return result;
}

namespace detail {

// Worst-case number of strictly increasing interior index tuples; used to
// refuse grids that would not finish.
inline double grid_candidate_estimate(int interior, long long kmax) {
    double log_count = 0.0;
    for (int i = 0; i < interior; ++i)
        log_count += std::log(static_cast<double>(kmax - i)) - std::log(static_cast<double>(i + 1));
    return std::exp(log_count);
}

}  // namespace detail

/// Exhaustive minimization over grid constellations: p_1 = 0, the M-2
/// interior powers on a grid of pitch grid_step*p_bar, and the top power
/// closed from the budget (kept only when the ordering survives). Evaluation
/// order is lexicographic, so SEP ties resolve to the lexicographically
/// smallest power vector.
template <typename Scalar>
OptResult<Scalar> brute_force(const SystemParams<Scalar>& params, Scalar grid_step) {
    if (!(grid_step > Scalar(0))) throw ValidationError("brute_force: grid_step must be > 0");
    const int m = params.constellation_size;
    const int interior = m - 2;
    const Scalar pitch = grid_step * params.avg_power;
    const long long kmax = static_cast<long long>(std::floor(Scalar(m) / grid_step));
    if (detail::grid_candidate_estimate(interior, kmax) > 1e8)
        throw ValidationError("brute_force: grid would exceed 1e8 candidates; coarsen grid_step");

    OptResult<Scalar> best;
    best.sep = std::numeric_limits<Scalar>::infinity();
    best.iterations = 0;
    best.converged = true;

    VectorX<Scalar> powers(m);
    powers[0] = Scalar(0);
    std::vector<long long> ks(static_cast<size_t>(std::max(interior, 0)));

    auto evaluate = [&]() {
        const Scalar top = Scalar(m) * params.avg_power - powers.head(m - 1).sum();
        // Ordering or budget failed (a sub-pitch overhang is a grid tie up to
        // rounding); larger interior powers only make it worse.
        if (!(top - powers[m - 2] > pitch * Scalar(1e-6))) return false;
        powers[m - 1] = top;
        Constellation<Scalar> c = validate_constellation<Scalar>(powers, params);
        Boundaries<Scalar> b = optimal_boundaries(c, params);
        const Scalar sep = average_sep(c, b, params);
        ++best.iterations;
        if (sep < best.sep) {
            best.sep = sep;
            best.constellation = std::move(c);
            best.boundaries = std::move(b);
        }
        return true;
    };

    if (interior == 0) {
        evaluate();
        return best;
    }

    // Depth-first over strictly increasing index tuples, cut off as soon as
    // the closed top power can no longer dominate the interior.
    auto recurse = [&](auto&& self, int depth) -> void {
        const long long start = depth == 0 ? 1 : ks[depth - 1] + 1;
        for (long long k = start; k <= kmax; ++k) {
            ks[depth] = k;
            powers[depth + 1] = Scalar(k) * pitch;
            if (depth + 1 < interior) {
                self(self, depth + 1);
            } else if (!evaluate()) {
                break;
            }
        }
    };
    recurse(recurse, 0);

    if (!std::isfinite(best.sep))
        throw ValidationError("brute_force: no feasible grid constellation found");
    return best;
}

template <typename Scalar>
struct ConvexityReport {
    long long trials;
    long long violations;    // convexity excess beyond the tolerance
    Scalar max_excess;       // largest positive excess observed (0 if none)
    Scalar tolerance;
};

namespace detail {

// Strictly ordered power vector with mean exactly p_bar; uniform order
// statistics rescaled, redrawn on near-ties.
template <typename Scalar>
VectorX<Scalar> random_ordered_powers(std::mt19937_64& rng, const SystemParams<Scalar>& params) {
    const int m = params.constellation_size;
    VectorX<Scalar> p(m);
    for (;;) {
        for (int i = 0; i < m; ++i)
            p[i] = Scalar((rng() >> 11) * 0x1.0p-53);
        std::sort(p.data(), p.data() + m);
        bool distinct = true;
        for (int i = 1; i < m; ++i)
            if (p[i] - p[i - 1] < Scalar(1e-6)) distinct = false;
        if (!distinct) continue;
        p *= params.avg_power / p.mean();
        return p;
    }
}

}  // namespace detail

/// Samples the convexity of SEP(p) (always evaluated at the optimal
/// thresholds for p) over random convex combinations of valid power vectors.
template <typename Scalar>
ConvexityReport<Scalar> convexity_probe(const SystemParams<Scalar>& params, long long trials,
                                        std::uint64_t rng_seed) {
    if (trials < 1) throw ValidationError("convexity_probe: trials must be >= 1");
    const Scalar tolerance = Scalar(1e-10);
    std::mt19937_64 rng(rng_seed);
    const auto sep_at = [&](const VectorX<Scalar>& powers) {
        Constellation<Scalar> c = validate_constellation<Scalar>(powers, params);
        return average_sep(c, optimal_boundaries(c, params), params);
    };
    ConvexityReport<Scalar> report{trials, 0, Scalar(0), tolerance};
    for (long long i = 0; i < trials; ++i) {
        const VectorX<Scalar> p = detail::random_ordered_powers(rng, params);
        const VectorX<Scalar> q = detail::random_ordered_powers(rng, params);
        const Scalar t = Scalar((rng() >> 11) * 0x1.0p-53);
        const VectorX<Scalar> mix = t * p + (Scalar(1) - t) * q;
        const Scalar excess = sep_at(mix) - (t * sep_at(p) + (Scalar(1) - t) * sep_at(q));
        if (excess > report.max_excess) report.max_excess = excess;
        if (excess > tolerance) ++report.violations;
    }
    return report;
}

}  // namespace edc
