// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo validation of the Gaussian energy model: exact Rician channel
// and noise draws, empirical SER against the analytic SEP, and a normality
// report for the averaged energy.
//
// Reproducibility contract: every (symbol, block) pair owns an independent
// generator derived from the master seed, blocks have a fixed size, and
// partial results merge in block order. Outputs are therefore identical for
// any thread count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "edc/detector.hpp"
#include "edc/model.hpp"
#include "edc/types.hpp"

namespace edc {

inline constexpr long long kTrialsPerBlock = 1 << 14;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the generator owned by one (symbol, block) pair.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t symbol, std::uint64_t block) {
    return splitmix64(splitmix64(master ^ 0x51e3f1d7c4a2b96dULL * (symbol + 1)) + block);
}

/// Standard-normal stream: mt19937_64 plus the Marsaglia polar method. The
/// C++ engine is fully specified by the standard while
/// std::normal_distribution is not, so this stream is bit-identical across
/// implementations.
template <typename Scalar>
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}

    Scalar operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        for (;;) {
            const Scalar x = uniform11();
            const Scalar y = uniform11();
            const Scalar s = x * x + y * y;
            if (s >= Scalar(1) || s == Scalar(0)) continue;
            const Scalar f = std::sqrt(Scalar(-2) * std::log(s) / s);
            spare_ = y * f;
            have_spare_ = true;
            return x * f;
        }
    }

  private:
    Scalar uniform11() {  // in (-1, 1), never exactly 0
        return Scalar((static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-52 - 1.0);
    }

    std::mt19937_64 gen_;
    Scalar spare_{};
    bool have_spare_ = false;
};

/// One realization of the averaged receive energy ||h*sqrt(p) + z||^2 / N
/// from N fresh channel and noise draws under the complex-channel convention.
template <typename Scalar>
Scalar sample_energy(const SystemParams<Scalar>& params, Scalar p, GaussianRng<Scalar>& rng) {
    if (!(p >= Scalar(0))) throw std::domain_error("sample_energy: symbol power must be >= 0");
    const auto rm = rician_moments(params.rician_k);
    const Scalar mean_h = std::sqrt(rm.los_power);
    const Scalar sd_h = std::sqrt(rm.scatter_var / Scalar(2));  // per real component
    const Scalar sd_z = std::sqrt(params.noise_var / Scalar(2));
    const Scalar amp = std::sqrt(p);
    Scalar acc = Scalar(0);
    for (int n = 0; n < params.n_antennas; ++n) {
        const Scalar h_re = mean_h + sd_h * rng();
        const Scalar h_im = sd_h * rng();
        const Scalar z_re = sd_z * rng();
        const Scalar z_im = sd_z * rng();
        const Scalar y_re = amp * h_re + z_re;
        const Scalar y_im = amp * h_im + z_im;
        acc += y_re * y_re + y_im * y_im;
    }
    return acc / Scalar(params.n_antennas);
}

namespace detail {

// Runs fn(i) for i in [0, tasks) on `threads` workers (0 = hardware count).
// Each task writes only its own slot, so scheduling cannot affect results.
template <typename Fn>
void parallel_for(long long tasks, int threads, Fn&& fn) {
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = static_cast<int>(std::clamp(hw, 1u, 8u));
    }
    threads = static_cast<int>(std::min<long long>(threads, std::max<long long>(tasks, 1)));
    if (threads == 1) {
        for (long long i = 0; i < tasks; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&fn, t, tasks, threads]() {
            for (long long i = t; i < tasks; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Error count and mean-shifted power sums of one block of trials.
template <typename Scalar>
struct BlockAccum {
    long long trials = 0;
    long long errors = 0;
    Scalar s1 = 0, s2 = 0, s3 = 0, s4 = 0;  // sums of (y - mu)^k
};

}  // namespace detail

/// Empirical mean/variance of the averaged energy for one symbol, with the
/// standard errors used by the moment-agreement checks.
template <typename Scalar>
struct SymbolMoments {
    Scalar mean;
    Scalar variance;
    Scalar mean_se;
    Scalar variance_se;
};

template <typename Scalar>
struct SimResult {
    long long trials_per_symbol;
    std::vector<long long> errors_per_symbol;
    Scalar empirical_ser;
    Scalar std_error;  // binomial, from the empirical rate
    std::vector<SymbolMoments<Scalar>> moments;
    std::uint64_t seed;
};

/// Draws trials for every symbol, decodes through the thresholds and counts
/// errors in integers. Deterministic in (inputs, seed) for any thread count.
template <typename Scalar>
SimResult<Scalar> simulate_ser(const Constellation<Scalar>& constellation,
                               const Boundaries<Scalar>& boundaries,
                               const SystemParams<Scalar>& params, long long trials_per_symbol,
                               std::uint64_t seed, int threads = 0) {
    detail::check_shapes(constellation, boundaries, params);
    if (trials_per_symbol < 1)
        throw ValidationError("simulate_ser: trials_per_symbol must be >= 1");
    const int m = constellation.size();
    const long long blocks = (trials_per_symbol + kTrialsPerBlock - 1) / kTrialsPerBlock;

    std::vector<detail::BlockAccum<Scalar>> accum(static_cast<size_t>(m * blocks));
    detail::parallel_for(m * blocks, threads, [&](long long task) {
        const int symbol = static_cast<int>(task / blocks);
        const long long block = task % blocks;
        const long long lo = block * kTrialsPerBlock;
        const long long hi = std::min(trials_per_symbol, lo + kTrialsPerBlock);
        const Scalar power = constellation.powers[symbol];
        const Scalar mu = energy_stats(params, power).mean;
        GaussianRng<Scalar> rng(stream_seed(seed, static_cast<std::uint64_t>(symbol),
                                            static_cast<std::uint64_t>(block)));
        detail::BlockAccum<Scalar> a;
        for (long long i = lo; i < hi; ++i) {
            const Scalar y = sample_energy(params, power, rng);
            if (decide(y, boundaries) != symbol) ++a.errors;
            const Scalar d = y - mu;
            const Scalar d2 = d * d;
            a.s1 += d;
            a.s2 += d2;
            a.s3 += d2 * d;
            a.s4 += d2 * d2;
        }
        a.trials = hi - lo;
        accum[static_cast<size_t>(task)] = a;
    });

    SimResult<Scalar> result;
    result.trials_per_symbol = trials_per_symbol;
    result.seed = seed;
    result.errors_per_symbol.assign(static_cast<size_t>(m), 0);
    result.moments.resize(static_cast<size_t>(m));
    long long total_errors = 0;
    for (int symbol = 0; symbol < m; ++symbol) {
        detail::BlockAccum<Scalar> sum;
        for (long long block = 0; block < blocks; ++block) {
            const auto& a = accum[static_cast<size_t>(symbol * blocks + block)];
            sum.trials += a.trials;
            sum.errors += a.errors;
            sum.s1 += a.s1;
            sum.s2 += a.s2;
            sum.s3 += a.s3;
            sum.s4 += a.s4;
        }
        result.errors_per_symbol[static_cast<size_t>(symbol)] = sum.errors;
        total_errors += sum.errors;

        const Scalar n = Scalar(sum.trials);
        const Scalar mu = energy_stats(params, constellation.powers[symbol]).mean;
        const Scalar d1 = sum.s1 / n;  // empirical mean minus mu
        const Scalar m2 = sum.s2 / n - d1 * d1;
        const Scalar m4 = sum.s4 / n - Scalar(4) * d1 * sum.s3 / n +
                          Scalar(6) * d1 * d1 * sum.s2 / n - Scalar(3) * d1 * d1 * d1 * d1;
        SymbolMoments<Scalar>& mom = result.moments[static_cast<size_t>(symbol)];
        mom.mean = mu + d1;
        mom.variance = m2 * n / (n - Scalar(1));
        mom.mean_se = std::sqrt(mom.variance / n);
        mom.variance_se = std::sqrt(std::max(m4 - m2 * m2, Scalar(0)) / n);
    }
    const Scalar total = Scalar(m) * Scalar(trials_per_symbol);
    result.empirical_ser = Scalar(total_errors) / total;
    result.std_error =
        std::sqrt(result.empirical_ser * (Scalar(1) - result.empirical_ser) / total);
    return result;
}

/// Empirical moments and tail quantiles of the averaged energy against the
/// Gaussian prediction. Moment deltas are in standard errors (exact for any
/// N); quantile deltas are in predicted standard deviations and shrink only
/// as N grows.
template <typename Scalar>
struct GaussianityReport {
    long long draws;
    Scalar analytic_mean;
    Scalar analytic_variance;
    Scalar empirical_mean;
    Scalar empirical_variance;
    Scalar mean_delta_se;
    Scalar variance_delta_se;
    Scalar q01_delta_sigma;
    Scalar q99_delta_sigma;
    std::uint64_t seed;
};

template <typename Scalar>
GaussianityReport<Scalar> gaussianity_report(const SystemParams<Scalar>& params, Scalar p,
                                             long long draws, std::uint64_t seed,
                                             int threads = 0) {
    if (draws < 1000) throw ValidationError("gaussianity_report: need at least 1000 draws");
    const auto stats = energy_stats(params, p);
    std::vector<Scalar> samples(static_cast<size_t>(draws));
    const long long blocks = (draws + kTrialsPerBlock - 1) / kTrialsPerBlock;
    detail::parallel_for(blocks, threads, [&](long long block) {
        const long long lo = block * kTrialsPerBlock;
        const long long hi = std::min(draws, lo + kTrialsPerBlock);
        GaussianRng<Scalar> rng(stream_seed(seed, 0, static_cast<std::uint64_t>(block)));
        for (long long i = lo; i < hi; ++i)
            samples[static_cast<size_t>(i)] = sample_energy(params, p, rng);
    });

    const Scalar n = Scalar(draws);
    Scalar s1 = 0;
    for (const Scalar y : samples) s1 += y - stats.mean;
    const Scalar d1 = s1 / n;
    Scalar s2 = 0, s4 = 0;
    for (const Scalar y : samples) {
        const Scalar c = y - stats.mean - d1;
        s2 += c * c;
        s4 += c * c * c * c;
    }
    const Scalar m2 = s2 / n;
    const Scalar m4 = s4 / n;
    const Scalar variance = m2 * n / (n - Scalar(1));
    const Scalar sd = std::sqrt(stats.variance);

    auto quantile = [&](double q) {
        std::vector<Scalar> copy = samples;
        const auto idx = static_cast<long long>(std::llround(q * static_cast<double>(draws - 1)));
        std::nth_element(copy.begin(), copy.begin() + idx, copy.end());
        return copy[static_cast<size_t>(idx)];
    };
    // standard-normal 1% / 99% quantile magnitude
    const Scalar z99 = Scalar(2.3263478740408408);

    GaussianityReport<Scalar> report;
    report.draws = draws;
    report.seed = seed;
    report.analytic_mean = stats.mean;
    report.analytic_variance = stats.variance;
    report.empirical_mean = stats.mean + d1;
    report.empirical_variance = variance;
    report.mean_delta_se = d1 / std::sqrt(variance / n);
    report.variance_delta_se =
        (variance - stats.variance) / std::sqrt(std::max(m4 - m2 * m2, Scalar(0)) / n);
    report.q01_delta_sigma = (quantile(0.01) - (stats.mean - z99 * sd)) / sd;
    report.q99_delta_sigma = (quantile(0.99) - (stats.mean + z99 * sd)) / sd;
    return report;
}

}  // namespace edc
