// SPDX-License-Identifier: Apache-2.0
//
// Core domain types for energy-detection constellation design.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace edc {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A constellation, parameter set, or boundary vector failed validation.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Two adjacent energy variances are too close for the closed-form decision
/// boundary to be evaluated reliably.
class DegenerateSpacingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The budget closure p_M = M*p_bar - sum(p_1..p_{M-1}) cannot produce a
/// positive top power for the given boundaries.
class InfeasibleBudgetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Channel and receiver context: Rician factor, antenna count, per-antenna
/// noise variance, constellation size and average power budget.
template <typename Scalar>
struct SystemParams {
    Scalar rician_k;         // K >= 0, K=0 is Rayleigh
    int n_antennas;          // N >= 1
    Scalar noise_var;        // sigma_z^2 > 0 per antenna
    int constellation_size;  // M >= 2
    Scalar avg_power;        // p_bar > 0

    SystemParams(Scalar k, int n, Scalar sigma_z2, int m, Scalar p_bar)
        : rician_k(k), n_antennas(n), noise_var(sigma_z2), constellation_size(m), avg_power(p_bar) {
        if (!(k >= Scalar(0)))
            throw ValidationError("SystemParams: Rician factor K must be >= 0, got " +
                                  std::to_string(static_cast<double>(k)));
        if (n < 1)
            throw ValidationError("SystemParams: antenna count N must be >= 1, got " +
                                  std::to_string(n));
        if (!(sigma_z2 > Scalar(0)))
            throw ValidationError("SystemParams: noise variance must be > 0, got " +
                                  std::to_string(static_cast<double>(sigma_z2)));
        if (m < 2)
            throw ValidationError("SystemParams: constellation size M must be >= 2, got " +
                                  std::to_string(m));
        if (!(p_bar > Scalar(0)))
            throw ValidationError("SystemParams: average power budget must be > 0, got " +
                                  std::to_string(static_cast<double>(p_bar)));
    }
};

/// Ordered symbol power levels 0 <= p_1 < ... < p_M plus their ratios to the
/// average power budget. Construct through validate_constellation() or the
/// optimizer so the invariants hold.
template <typename Scalar>
struct Constellation {
    VectorX<Scalar> powers;  // strictly increasing
    VectorX<Scalar> alpha;   // powers / p_bar

    int size() const { return static_cast<int>(powers.size()); }
};

/// Gaussian parameters of the averaged receive energy for one symbol.
template <typename Scalar>
struct EnergyStats {
    Scalar mean;      // p_m + sigma_z^2
    Scalar variance;  // exact second moment, > 0

    Scalar stddev() const { return std::sqrt(variance); }
};

/// Interior decision thresholds lambda_1 < ... < lambda_{M-1}; the outer
/// boundaries lambda_0 = 0 and lambda_M = +inf are implicit.
template <typename Scalar>
struct Boundaries {
    VectorX<Scalar> lambdas;

    int size() const { return static_cast<int>(lambdas.size()); }
};

}  // namespace edc
