// model.hpp — Physical parameters, derived detunings, initial-field specs and
// truncation policy for the classically driven Jaynes-Cummings model.
//
// Conventions: hbar = 1, all couplings real, atom basis {|g>, |e>} with
// sigma_z = |e><e| - |g><g|.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace djcm {

// ----------------------------- error types ----------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// g <= 0 while the classical drive couples to the atom (alpha = zeta/g needed)
struct NonPositiveCoupling : Error {
    using Error::Error;
};

// zeta, xi negative or omega_c, omega_eg not positive
struct NegativeRate : Error {
    using Error::Error;
};

// explicit omega_0 inconsistent with omega_0 = omega_c - g*xi/zeta
struct ConstrictionViolated : Error {
    using Error::Error;
};

// series or basis would exceed the configured hard cap
struct TruncationCapExceeded : Error {
    using Error::Error;
};

struct CutoffTooSmall : Error {
    using Error::Error;
};

struct NormDrift : Error {
    using Error::Error;
};

struct LeakageExceeded : Error {
    using Error::Error;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

// ----------------------------- domain types ---------------------------------

// All angular frequencies and couplings of the lab-frame Hamiltonian
//
//   H(t) = (omega_eg/2) sz + omega_c a'a + g (s+ a + s- a')
//        + zeta (s- e^{+i w0 t} + s+ e^{-i w0 t})
//        + xi   (a  e^{+i w0 t} + a' e^{-i w0 t})
//
// The drive frequency omega_0 is not free: removing the drive by a coherent
// displacement requires omega_0 = omega_c - g*xi/zeta whenever zeta > 0.
// validate_params() recomputes it; an explicit value is only accepted as a
// consistency check. zeta = 0 means the classical drive is absent entirely
// (both drive terms), with omega_0 := omega_c by convention.
struct ModelParams {
    double omega_c = 0.0;   // cavity mode frequency
    double omega_eg = 0.0;  // atomic transition frequency
    double g = 0.0;         // atom-cavity coupling
    double zeta = 0.0;      // classical-field-atom coupling
    double xi = 0.0;        // classical-field-cavity coupling
    // drive frequency; NaN = derive from the constriction
    double omega_0 = std::numeric_limits<double>::quiet_NaN();
};

// Detunings and displacement amplitude implied by validated ModelParams.
struct DerivedParams {
    double delta_c = 0.0;   // omega_c - omega_0 = g*xi/zeta (0 when zeta = 0)
    double delta_eg = 0.0;  // omega_eg - omega_0
    double delta = 0.0;     // delta_eg - delta_c = omega_eg - omega_c
    double alpha = 0.0;     // zeta/g, real and nonnegative
};

// Initial cavity field: thermal with mean photon number n_bar, or a Fock
// state with exactly k photons. The atom always starts excited.
struct FieldSpec {
    enum class Kind { thermal, fock };

    Kind kind = Kind::thermal;
    double n_bar = 0.0;
    int k = 0;

    static FieldSpec thermal(double n_bar) {
        if (!(n_bar >= 0.0)) {
            throw NegativeRate("FieldSpec: n_bar must be >= 0");
        }
        FieldSpec f;
        f.kind = Kind::thermal;
        f.n_bar = n_bar;
        return f;
    }

    static FieldSpec fock(int k) {
        if (k < 0) {
            throw NegativeRate("FieldSpec: Fock photon number must be >= 0");
        }
        FieldSpec f;
        f.kind = Kind::fock;
        f.k = k;
        return f;
    }

    bool is_thermal() const { return kind == Kind::thermal; }

    std::string label() const {
        return is_thermal() ? "thermal(n_bar=" + std::to_string(n_bar) + ")"
                            : "fock(k=" + std::to_string(k) + ")";
    }
};

// Tail tolerance and hard cap shared by every adaptively truncated series
// and basis in the library.
struct TruncationPolicy {
    double epsilon = 1e-12;
    std::size_t max_terms = 4096;

    void validate() const {
        if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
            throw Error("TruncationPolicy: epsilon must lie in (0, 1)");
        }
        if (max_terms < 16) {
            throw Error("TruncationPolicy: max_terms must be >= 16");
        }
    }
};

// How far an adaptive series was taken and how much mass the tail still holds.
struct TruncationReport {
    std::size_t terms_used = 0;
    double tail_bound = 0.0;
};

// ------------------------------ operations ----------------------------------

// Checks couplings and frequencies and resolves omega_0 through the
// constriction. Throws NonPositiveCoupling, NegativeRate or
// ConstrictionViolated.
inline ModelParams validate_params(ModelParams raw) {
    if (raw.zeta < 0.0 || raw.xi < 0.0) {
        throw NegativeRate("zeta and xi must be >= 0");
    }
    if (!(raw.omega_c > 0.0) || !(raw.omega_eg > 0.0)) {
        throw NegativeRate("omega_c and omega_eg must be > 0");
    }
    if (raw.g < 0.0 || (raw.g == 0.0 && raw.zeta > 0.0)) {
        throw NonPositiveCoupling(
            "g must be > 0 when the drive couples to the atom (zeta > 0)");
    }

    const double derived_omega_0 =
        raw.zeta > 0.0 ? raw.omega_c - raw.g * raw.xi / raw.zeta : raw.omega_c;
    if (raw.zeta > 0.0 && !std::isnan(raw.omega_0)) {
        const double scale = std::max(1.0, std::abs(derived_omega_0));
        if (std::abs(raw.omega_0 - derived_omega_0) > 1e-9 * scale) {
            throw ConstrictionViolated(
                "explicit omega_0 = " + std::to_string(raw.omega_0) +
                " contradicts omega_c - g*xi/zeta = " +
                std::to_string(derived_omega_0));
        }
    }
    raw.omega_0 = derived_omega_0;
    return raw;
}

// Detunings per the transformed-frame definitions. Assumes validated params.
inline DerivedParams derive(const ModelParams& p) {
    DerivedParams d;
    d.delta_c = p.zeta > 0.0 ? p.g * p.xi / p.zeta : 0.0;
    d.delta_eg = p.zeta > 0.0 ? p.omega_eg - p.omega_0 : p.omega_eg - p.omega_c;
    d.delta = p.omega_eg - p.omega_c;
    d.alpha = p.zeta > 0.0 ? p.zeta / p.g : 0.0;
    return d;
}

// Rabi frequency of the n-excitation manifold, Omega_n = sqrt(delta^2/4 + g^2 n).
// Even in delta by construction (enters through delta^2 only).
inline double rabi_frequency(double delta, double g, long n) {
    return std::sqrt(0.25 * delta * delta + g * g * static_cast<double>(n));
}

// Geometric photon-number weights p_k = n_bar^k / (1+n_bar)^{k+1} of a thermal
// state, truncated once the remaining tail mass drops below policy.epsilon.
// Throws TruncationCapExceeded if the cap is hit first.
inline std::vector<double> thermal_weights(double n_bar,
                                           const TruncationPolicy& policy) {
    policy.validate();
    if (!(n_bar >= 0.0)) {
        throw NegativeRate("thermal_weights: n_bar must be >= 0");
    }
    if (n_bar == 0.0) {
        return {1.0};
    }
    const double ratio = n_bar / (1.0 + n_bar);
    std::vector<double> w;
    double wk = 1.0 / (1.0 + n_bar);
    double tail = 1.0;  // mass not yet emitted = ratio^k
    for (std::size_t k = 0; k < policy.max_terms; ++k) {
        w.push_back(wk);
        tail *= ratio;
        if (tail < policy.epsilon) {
            return w;
        }
        wk *= ratio;
    }
    throw TruncationCapExceeded(
        "thermal_weights: tail still " + std::to_string(tail) + " after " +
        std::to_string(policy.max_terms) + " terms (n_bar = " +
        std::to_string(n_bar) + ")");
}

// Number of thermal terms needed before the geometric tail drops below eps.
inline std::size_t thermal_terms_needed(double n_bar, double eps) {
    if (n_bar <= 0.0) {
        return 1;
    }
    const double ratio = n_bar / (1.0 + n_bar);
    return static_cast<std::size_t>(
               std::ceil(std::log(eps) / std::log(ratio))) +
           1;
}

}  // namespace djcm
