// analytic.hpp — Closed-form atomic inversion and time-averaged lineshapes of
// the driven Jaynes-Cummings model.
//
// Both observables are photon-weighted sums over excitation manifolds,
//
//   <sz>(t) = sum_m P(m) [delta^2/4 + g^2 (m+1) cos(2 Omega_{m+1} t)] / Omega_{m+1}^2
//   W(delta) = sum_m P(m) (delta / 2 Omega_{m+1})^2
//
// where P(m) is the transformed-frame photon distribution: displaced thermal
// for a driven thermal field, geometric for the undriven one, a displaced
// Fock column for number states. The bracket is evaluated as
// 1 - c (1 - cos), c = g^2(m+1)/Omega^2, which keeps every sample inside
// [-1, 1] and makes t = 0 sum to the weight mass exactly.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "djcm/model.hpp"
#include "djcm/specfun.hpp"

namespace djcm {

// Sampled <sigma_z>(t) trace with its generation metadata. leakage and
// norm_drift stay 0 for analytic traces; the numeric oracle fills them.
struct InversionSeries {
    std::vector<double> times;
    std::vector<double> values;
    ModelParams params;
    FieldSpec field;
    TruncationReport truncation;
    double leakage = 0.0;
    double norm_drift = 0.0;
};

// Sampled W(delta) over a detuning grid. Lineshapes depend on the model only
// through (g, alpha) and the initial field.
struct LineshapeCurve {
    std::vector<double> deltas;
    std::vector<double> values;
    double g = 0.0;
    double alpha = 0.0;
    FieldSpec field;
    TruncationReport truncation;
};

namespace detail {

inline double inversion_from_weights(std::span<const double> weights,
                                     double delta, double g, double t) {
    const double quarter_d2 = 0.25 * delta * delta;
    const double g2 = g * g;
    double sum = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        const double omega2 = quarter_d2 + g2 * static_cast<double>(m + 1);
        if (omega2 == 0.0) {
            // fully decoupled manifold (g = 0, delta = 0): the atom is frozen
            sum += weights[m];
            continue;
        }
        const double c = g2 * static_cast<double>(m + 1) / omega2;
        const double omega = std::sqrt(omega2);
        sum += weights[m] * (1.0 - c * (1.0 - std::cos(2.0 * omega * t)));
    }
    return sum;
}

inline double lineshape_from_weights(std::span<const double> weights,
                                     double delta, double g) {
    if (delta == 0.0) {
        return 0.0;
    }
    const double quarter_d2 = 0.25 * delta * delta;
    const double g2 = g * g;
    double sum = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        sum += weights[m] *
               (quarter_d2 / (quarter_d2 + g2 * static_cast<double>(m + 1)));
    }
    return sum;
}

inline void require_positive_g(double g, const char* where) {
    if (!(g > 0.0)) {
        throw NonPositiveCoupling(std::string(where) + ": requires g > 0");
    }
}

}  // namespace detail

// ---------------------------- atomic inversion ------------------------------

// Driven-model inversion for an initially thermal field (atom excited).
inline double inversion_thermal(const ModelParams& params, double n_bar,
                                double t, const TruncationPolicy& policy = {}) {
    const DerivedParams d = derive(params);
    const WeightTable w =
        displaced_thermal_weight_table(n_bar, d.alpha, policy);
    return detail::inversion_from_weights(w.weights, d.delta, params.g, t);
}

// Standard JCM inversion (no classical drive): geometric weights only.
inline double inversion_undriven(const ModelParams& params, double n_bar,
                                 double t,
                                 const TruncationPolicy& policy = {}) {
    const WeightTable w = geometric_weight_table(n_bar, policy);
    return detail::inversion_from_weights(
        w.weights, params.omega_eg - params.omega_c, params.g, t);
}

// Driven-model inversion for an initial Fock state |k>.
inline double inversion_fock(const ModelParams& params, int k, double t,
                             const TruncationPolicy& policy = {}) {
    const DerivedParams d = derive(params);
    const WeightTable w = fock_weight_table(k, d.alpha, policy);
    return detail::inversion_from_weights(w.weights, d.delta, params.g, t);
}

inline double inversion(const ModelParams& params, const FieldSpec& field,
                        double t, const TruncationPolicy& policy = {}) {
    return field.is_thermal() ? inversion_thermal(params, field.n_bar, t, policy)
                              : inversion_fock(params, field.k, t, policy);
}

// Full trace over a time grid; the photon weights are built once and shared
// across all samples.
inline InversionSeries inversion_series(const ModelParams& params,
                                        const FieldSpec& field,
                                        std::span<const double> t_grid,
                                        const TruncationPolicy& policy = {}) {
    const DerivedParams d = derive(params);
    const WeightTable w = field_weight_table(field, d.alpha, policy);
    InversionSeries s;
    s.params = params;
    s.field = field;
    s.truncation = w.report;
    s.times.assign(t_grid.begin(), t_grid.end());
    s.values.reserve(t_grid.size());
    for (double t : t_grid) {
        s.values.push_back(
            detail::inversion_from_weights(w.weights, d.delta, params.g, t));
    }
    return s;
}

// ------------------------------- lineshapes ---------------------------------

inline double lineshape_thermal(double g, double alpha, double n_bar,
                                double delta,
                                const TruncationPolicy& policy = {}) {
    detail::require_positive_g(g, "lineshape_thermal");
    const WeightTable w = displaced_thermal_weight_table(n_bar, alpha, policy);
    return detail::lineshape_from_weights(w.weights, delta, g);
}

inline double lineshape_undriven(double g, double n_bar, double delta,
                                 const TruncationPolicy& policy = {}) {
    detail::require_positive_g(g, "lineshape_undriven");
    const WeightTable w = geometric_weight_table(n_bar, policy);
    return detail::lineshape_from_weights(w.weights, delta, g);
}

inline double lineshape_fock(double g, double alpha, int k, double delta,
                             const TruncationPolicy& policy = {}) {
    detail::require_positive_g(g, "lineshape_fock");
    const WeightTable w = fock_weight_table(k, alpha, policy);
    return detail::lineshape_from_weights(w.weights, delta, g);
}

// One W(delta) per grid point; weights computed once, so the result is
// independent of evaluation order.
inline LineshapeCurve sweep_lineshape(const FieldSpec& field, double g,
                                      double alpha,
                                      std::span<const double> delta_grid,
                                      const TruncationPolicy& policy = {}) {
    detail::require_positive_g(g, "sweep_lineshape");
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        if (!std::isfinite(delta_grid[i])) {
            throw Error("sweep_lineshape: delta grid must be finite");
        }
        if (i > 0 && !(delta_grid[i] >= delta_grid[i - 1])) {
            throw Error("sweep_lineshape: delta grid must be sorted");
        }
    }
    const WeightTable w = field_weight_table(field, alpha, policy);
    LineshapeCurve c;
    c.g = g;
    c.alpha = alpha;
    c.field = field;
    c.truncation = w.report;
    c.deltas.assign(delta_grid.begin(), delta_grid.end());
    c.values.reserve(delta_grid.size());
    for (double delta : delta_grid) {
        c.values.push_back(detail::lineshape_from_weights(w.weights, delta, g));
    }
    return c;
}

}  // namespace djcm
