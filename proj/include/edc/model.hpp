// SPDX-License-Identifier: Apache-2.0
//
// Channel statistics of the averaged receive energy.
//
// The receiver forms y_tilde = ||y||^2 / N with y = h*x + z, where h has
// circularly-symmetric complex entries with deterministic mean of magnitude
// sqrt(K/(K+1)) and complex variance 1/(K+1), and z is circularly-symmetric
// complex noise with variance sigma_z^2. For symbol power p the averaged
// energy has exact moments
//
//   mean     = p + sigma_z^2
//   variance = (2K+1)/(N(K+1)^2) * p^2 + sigma_z^4/N + 2*sigma_z^2*p/N
//
// The moments are exact for every N; only the Gaussian shape of y_tilde is an
// N -> inf approximation.

#pragma once

#include <cmath>
#include <string>

#include "edc/types.hpp"

namespace edc {

/// Line-of-sight power fraction and scattered variance of the unit-gain
/// Rician channel; the two always sum to 1.
template <typename Scalar>
struct RicianMoments {
    Scalar los_power;    // |mu|^2 = K/(K+1)
    Scalar scatter_var;  // sigma_h^2 = 1/(K+1)
};

template <typename Scalar>
RicianMoments<Scalar> rician_moments(Scalar k) {
    if (!(k >= Scalar(0)))
        throw std::domain_error("rician_moments: K must be a real number >= 0");
    return {k / (k + Scalar(1)), Scalar(1) / (k + Scalar(1))};
}

/// Exact mean and variance of the averaged receive energy for symbol power p.
template <typename Scalar>
EnergyStats<Scalar> energy_stats(const SystemParams<Scalar>& params, Scalar p) {
    if (!(p >= Scalar(0)))
        throw std::domain_error("energy_stats: symbol power must be >= 0");
    const Scalar k1 = params.rician_k + Scalar(1);
    const Scalar n = Scalar(params.n_antennas);
    const Scalar sz2 = params.noise_var;
    const Scalar variance = (Scalar(2) * params.rician_k + Scalar(1)) / (n * k1 * k1) * p * p +
                            sz2 * sz2 / n + Scalar(2) * sz2 * p / n;
    return {p + sz2, variance};
}

/// Average power budget for a target SNR in dB: p_bar = sigma_z^2 * 10^(dB/10).
template <typename Scalar>
Scalar snr_to_pbar(Scalar snr_db, Scalar sigma_z2) {
    if (!(sigma_z2 > Scalar(0)))
        throw std::domain_error("snr_to_pbar: noise variance must be > 0");
    return sigma_z2 * std::pow(Scalar(10), snr_db / Scalar(10));
}

/// Checks ordering, nonnegativity and the average power constraint
/// (mean <= p_bar with 1e-12 absolute slack) and attaches the power ratios.
template <typename Scalar>
Constellation<Scalar> validate_constellation(const Eigen::Ref<const VectorX<Scalar>>& powers,
                                             const SystemParams<Scalar>& params) {
    const int m = params.constellation_size;
    if (static_cast<int>(powers.size()) != m)
        throw ValidationError("constellation: expected " + std::to_string(m) + " powers, got " +
                              std::to_string(powers.size()));
    for (int i = 0; i < m; ++i) {
        if (!(powers[i] >= Scalar(0)))
            throw ValidationError("constellation: powers[" + std::to_string(i) +
                                  "] is negative or NaN");
        if (i > 0 && !(powers[i] > powers[i - 1]))
            throw ValidationError("constellation: powers[" + std::to_string(i) +
                                  "] does not strictly exceed powers[" + std::to_string(i - 1) +
                                  "]");
    }
    const Scalar mean = powers.mean();
    if (mean > params.avg_power + Scalar(1e-12))
        throw ValidationError("constellation: mean power " +
                              std::to_string(static_cast<double>(mean)) +
                              " exceeds budget p_bar = " +
                              std::to_string(static_cast<double>(params.avg_power)));
    Constellation<Scalar> c;
    c.powers = powers;
    c.alpha = powers / params.avg_power;
    return c;
}

}  // namespace edc
