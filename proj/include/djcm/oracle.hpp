// oracle.hpp — Independent numerical verification of the closed-form results:
// dense truncated-Fock-space evolution of the lab-frame time-dependent
// Hamiltonian, exact propagation of the transformed Jaynes-Cummings
// Hamiltonian through its eigendecomposition, and numeric time averaging.
//
// Nothing here shares a code path with the Laguerre-series formulas in
// analytic.hpp; agreement between the two is the verification.
//
// Basis layout for a Fock cutoff N (2N amplitudes):
//   index n     -> |n, g>,  n = 0..N-1
//   index N + n -> |n, e>

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "djcm/analytic.hpp"
#include "djcm/model.hpp"

namespace djcm::oracle {

using OperatorMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// Truncated atom (x) field state. Norm should stay at 1 up to truncation
// leakage; the top field level is the leakage diagnostic.
struct QuantumStateVector {
    int cutoff = 0;  // Fock dimension N
    Eigen::VectorXcd amplitudes;
    double time = 0.0;

    static QuantumStateVector fock_excited(int k, int N) {
        if (N < 2) {
            throw CutoffTooSmall("QuantumStateVector: cutoff must be >= 2");
        }
        if (k < 0 || k >= N) {
            throw CutoffTooSmall("QuantumStateVector: |k,e> needs k < N (k = " +
                                 std::to_string(k) + ", N = " +
                                 std::to_string(N) + ")");
        }
        QuantumStateVector s;
        s.cutoff = N;
        s.amplitudes = Eigen::VectorXcd::Zero(2 * N);
        s.amplitudes(N + k) = 1.0;
        return s;
    }

    double norm() const { return amplitudes.norm(); }
};

struct EvolveOptions {
    double max_phase_per_step = 0.05;  // step * spectral-radius bound
    double leakage_threshold = 1e-8;
    double norm_drift_tol = 1e-7;
};

enum class Method { transformed, lab };

// ------------------------------ diagnostics ---------------------------------

inline double sigma_z_expectation(const QuantumStateVector& s) {
    const int N = s.cutoff;
    return s.amplitudes.tail(N).squaredNorm() -
           s.amplitudes.head(N).squaredNorm();
}

// occupation of the highest retained field level, both atomic states
inline double top_level_occupation(const QuantumStateVector& s) {
    const int N = s.cutoff;
    return std::norm(s.amplitudes(N - 1)) + std::norm(s.amplitudes(2 * N - 1));
}

inline double hermiticity_residual(const OperatorMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double unitarity_residual(const OperatorMatrix& u) {
    const OperatorMatrix r =
        u.adjoint() * u -
        OperatorMatrix::Identity(u.rows(), u.cols());
    return r.cwiseAbs().maxCoeff();
}

// ---------------------------- operator builders -----------------------------

// field annihilation operator on the truncated Fock space
inline OperatorMatrix annihilation_op(int N) {
    OperatorMatrix a = OperatorMatrix::Zero(N, N);
    for (int n = 1; n < N; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

// Lab-frame Hamiltonian at time t, all five terms with explicit drive phases.
// With zeta = 0 the classical drive is absent entirely.
inline OperatorMatrix build_h_lab(const ModelParams& params, double t, int N) {
    if (N < 2) {
        throw CutoffTooSmall("build_h_lab: cutoff must be >= 2");
    }
    OperatorMatrix h = OperatorMatrix::Zero(2 * N, 2 * N);
    for (int n = 0; n < N; ++n) {
        const double field = params.omega_c * n;
        h(n, n) = field - 0.5 * params.omega_eg;
        h(N + n, N + n) = field + 0.5 * params.omega_eg;
    }
    for (int n = 1; n < N; ++n) {
        const double gc = params.g * std::sqrt(static_cast<double>(n));
        h(N + n - 1, n) += gc;  // s+ a
        h(n, N + n - 1) += gc;  // s- a'
    }
    if (params.zeta > 0.0) {
        const Complex phase(std::cos(params.omega_0 * t),
                            std::sin(params.omega_0 * t));
        for (int n = 0; n < N; ++n) {
            h(n, N + n) += params.zeta * phase;             // s- e^{+i w0 t}
            h(N + n, n) += params.zeta * std::conj(phase);  // s+ e^{-i w0 t}
        }
        for (int n = 1; n < N; ++n) {
            const Complex xc = params.xi *
                               std::sqrt(static_cast<double>(n)) * phase;
            h(n - 1, n) += xc;  // a e^{+i w0 t}
            h(n, n - 1) += std::conj(xc);
            h(N + n - 1, N + n) += xc;
            h(N + n, N + n - 1) += std::conj(xc);
        }
    }
    return h;
}

// Transformed-frame Hamiltonian Delta_c n + (Delta_eg/2) sz + g (s+ a + s- a').
inline OperatorMatrix build_h_jc(const ModelParams& params, int N) {
    if (N < 2) {
        throw CutoffTooSmall("build_h_jc: cutoff must be >= 2");
    }
    const DerivedParams d = derive(params);
    OperatorMatrix h = OperatorMatrix::Zero(2 * N, 2 * N);
    for (int n = 0; n < N; ++n) {
        const double field = d.delta_c * n;
        h(n, n) = field - 0.5 * d.delta_eg;
        h(N + n, N + n) = field + 0.5 * d.delta_eg;
    }
    for (int n = 1; n < N; ++n) {
        const double gc = params.g * std::sqrt(static_cast<double>(n));
        h(N + n - 1, n) += gc;
        h(n, N + n - 1) += gc;
    }
    return h;
}

// Displacement operator D(alpha) = exp[alpha (a' - a)] on the field space,
// unitary by construction: exponentiated through the eigendecomposition of
// the Hermitian generator i alpha (a' - a).
inline OperatorMatrix displacement_matrix(double alpha, int N) {
    if (N < 2) {
        throw CutoffTooSmall("displacement_matrix: cutoff must be >= 2");
    }
    if (alpha == 0.0) {
        return OperatorMatrix::Identity(N, N);
    }
    OperatorMatrix k = OperatorMatrix::Zero(N, N);
    const Complex i_unit(0.0, 1.0);
    for (int n = 1; n < N; ++n) {
        const double s = alpha * std::sqrt(static_cast<double>(n));
        k(n, n - 1) = i_unit * s;   // i alpha a'
        k(n - 1, n) = -i_unit * s;  // -i alpha a
    }
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(k);
    const Eigen::VectorXd lam = es.eigenvalues();
    Eigen::VectorXcd phases(N);
    for (int n = 0; n < N; ++n) {
        phases(n) = Complex(std::cos(-lam(n)), std::sin(-lam(n)));
    }
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
}

// Fock cutoff large enough to hold the field tail plus the displacement, per
// N >= k_max + 10 + ceil(alpha^2 + 10 alpha + 10).
inline int auto_cutoff(const FieldSpec& field, double alpha,
                       const TruncationPolicy& policy = {}) {
    const long k_top =
        field.is_thermal()
            ? static_cast<long>(thermal_terms_needed(field.n_bar,
                                                     policy.epsilon)) -
                  1
            : field.k;
    const double pad = std::ceil(alpha * alpha + 10.0 * alpha + 10.0);
    return static_cast<int>(k_top + 10 + static_cast<long>(pad));
}

namespace detail {

struct JcEigensystem {
    Eigen::VectorXd evals;
    Eigen::MatrixXcd evecs;
};

inline JcEigensystem diagonalize_jc(const ModelParams& params, int N) {
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(build_h_jc(params, N));
    return {es.eigenvalues(), es.eigenvectors()};
}

inline Eigen::VectorXcd phases_at(const Eigen::VectorXd& evals, double t) {
    Eigen::VectorXcd w(evals.size());
    for (Eigen::Index j = 0; j < evals.size(); ++j) {
        w(j) = Complex(std::cos(-evals(j) * t), std::sin(-evals(j) * t));
    }
    return w;
}

inline void check_grid(std::span<const double> t_grid) {
    if (t_grid.empty()) {
        throw Error("time grid must be non-empty");
    }
    if (t_grid.front() < 0.0) {
        throw Error("time grid must start at t >= 0");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= t_grid[i - 1])) {
            throw Error("time grid must be sorted ascending");
        }
    }
}

}  // namespace detail

// ------------------------------- propagation --------------------------------

// Fixed-step RK4 integration of the Schroedinger equation with the lab-frame
// Hamiltonian. The step size satisfies h * bound <= max_phase_per_step with
// bound = omega_eg/2 + omega_c N + 2 g sqrt(N) + 2 zeta + 2 xi sqrt(N).
// The norm is never renormalized; drift beyond norm_drift_tol throws.
inline std::vector<QuantumStateVector> evolve_lab(
    const ModelParams& params, const QuantumStateVector& initial,
    std::span<const double> t_grid, const EvolveOptions& options = {}) {
    detail::check_grid(t_grid);
    const int N = initial.cutoff;
    if (N < 2 || initial.amplitudes.size() != 2 * N) {
        throw CutoffTooSmall("evolve_lab: malformed initial state");
    }

    // H(t) = H0 + e^{+i w0 t} B + e^{-i w0 t} B'
    OperatorMatrix h0 = OperatorMatrix::Zero(2 * N, 2 * N);
    OperatorMatrix b = OperatorMatrix::Zero(2 * N, 2 * N);
    for (int n = 0; n < N; ++n) {
        const double field = params.omega_c * n;
        h0(n, n) = field - 0.5 * params.omega_eg;
        h0(N + n, N + n) = field + 0.5 * params.omega_eg;
    }
    for (int n = 1; n < N; ++n) {
        const double gc = params.g * std::sqrt(static_cast<double>(n));
        h0(N + n - 1, n) += gc;
        h0(n, N + n - 1) += gc;
    }
    if (params.zeta > 0.0) {
        for (int n = 0; n < N; ++n) {
            b(n, N + n) += params.zeta;  // zeta s-
        }
        for (int n = 1; n < N; ++n) {
            const double xc = params.xi * std::sqrt(static_cast<double>(n));
            b(n - 1, n) += xc;  // xi a
            b(N + n - 1, N + n) += xc;
        }
    }
    const OperatorMatrix bdag = b.adjoint();

    const double root_n = std::sqrt(static_cast<double>(N));
    const double bound = 0.5 * params.omega_eg + params.omega_c * N +
                         2.0 * params.g * root_n + 2.0 * params.zeta +
                         2.0 * params.xi * root_n;
    const double h_max = options.max_phase_per_step / bound;

    const Complex minus_i(0.0, -1.0);
    const double w0 = params.omega_0;
    const bool driven = params.zeta > 0.0;
    const auto rhs = [&](double t, const Eigen::VectorXcd& y) {
        Eigen::VectorXcd hy = h0 * y;
        if (driven) {
            const Complex phase(std::cos(w0 * t), std::sin(w0 * t));
            hy += phase * (b * y) + std::conj(phase) * (bdag * y);
        }
        return Eigen::VectorXcd(minus_i * hy);
    };

    std::vector<QuantumStateVector> out;
    out.reserve(t_grid.size());
    QuantumStateVector state = initial;
    state.time = t_grid.front();
    double t = t_grid.front();

    const auto record = [&](double at) {
        state.time = at;
        const double drift = std::abs(state.norm() - 1.0);
        if (drift > options.norm_drift_tol) {
            throw NormDrift("evolve_lab: norm drift " + std::to_string(drift) +
                            " at t = " + std::to_string(at));
        }
        const double leak = top_level_occupation(state);
        if (leak > options.leakage_threshold) {
            throw LeakageExceeded("evolve_lab: top-level occupation " +
                                  std::to_string(leak) + " at t = " +
                                  std::to_string(at) +
                                  "; increase the cutoff");
        }
        out.push_back(state);
    };

    record(t);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double span = t_grid[i] - t;
        if (span > 0.0) {
            const long steps =
                std::max<long>(1, static_cast<long>(std::ceil(span / h_max)));
            const double h = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) {
                const Eigen::VectorXcd k1 = rhs(t, state.amplitudes);
                const Eigen::VectorXcd k2 =
                    rhs(t + 0.5 * h, state.amplitudes + 0.5 * h * k1);
                const Eigen::VectorXcd k3 =
                    rhs(t + 0.5 * h, state.amplitudes + 0.5 * h * k2);
                const Eigen::VectorXcd k4 = rhs(t + h, state.amplitudes + h * k3);
                state.amplitudes += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
            }
            t = t_grid[i];  // absorb accumulated rounding
        }
        record(t_grid[i]);
    }
    return out;
}

// Exact propagation through the transformation chain: displace by alpha,
// evolve with exp(-i t H_JC) via the Hermitian eigendecomposition, displace
// back. The residual rotating-frame transform is a diagonal phase that drops
// out of every |amplitude|^2 observable and is not applied.
inline std::vector<QuantumStateVector> evolve_transformed(
    const ModelParams& params, const QuantumStateVector& initial,
    std::span<const double> t_grid, const EvolveOptions& options = {}) {
    detail::check_grid(t_grid);
    const int N = initial.cutoff;
    if (N < 2 || initial.amplitudes.size() != 2 * N) {
        throw CutoffTooSmall("evolve_transformed: malformed initial state");
    }
    const DerivedParams d = derive(params);
    const OperatorMatrix disp = displacement_matrix(d.alpha, N);
    const detail::JcEigensystem jc = detail::diagonalize_jc(params, N);

    Eigen::VectorXcd phi0(2 * N);
    phi0.head(N) = disp * initial.amplitudes.head(N);
    phi0.tail(N) = disp * initial.amplitudes.tail(N);
    const Eigen::VectorXcd coeff = jc.evecs.adjoint() * phi0;

    std::vector<QuantumStateVector> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        const Eigen::VectorXcd chi =
            jc.evecs *
            Eigen::VectorXcd(detail::phases_at(jc.evals, t).cwiseProduct(coeff));
        const double leak = std::norm(chi(N - 1)) + std::norm(chi(2 * N - 1));
        if (leak > options.leakage_threshold) {
            throw LeakageExceeded(
                "evolve_transformed: top-level occupation " +
                std::to_string(leak) + " at t = " + std::to_string(t) +
                "; increase the cutoff");
        }
        QuantumStateVector s;
        s.cutoff = N;
        s.time = t;
        s.amplitudes.resize(2 * N);
        s.amplitudes.head(N) = disp.adjoint() * chi.head(N);
        s.amplitudes.tail(N) = disp.adjoint() * chi.tail(N);
        out.push_back(std::move(s));
    }
    return out;
}

// ----------------------------- atomic inversion -----------------------------

// Numeric <sigma_z>(t): the initial field is expanded into pure |k,e>
// trajectories with tail mass below policy.epsilon, each trajectory evolved
// and the expectations combined with the thermal weights.
//
// The transformed method folds the weighted trajectories into one quadratic
// form per observable in the H_JC eigenbasis, which keeps long time grids
// cheap; the lab method integrates each trajectory with RK4.
inline InversionSeries inversion_numeric(const ModelParams& params,
                                         const FieldSpec& field,
                                         std::span<const double> t_grid, int N,
                                         const TruncationPolicy& policy = {},
                                         const EvolveOptions& options = {},
                                         Method method = Method::transformed) {
    detail::check_grid(t_grid);
    policy.validate();
    if (N < 2) {
        throw CutoffTooSmall("inversion_numeric: cutoff must be >= 2");
    }

    std::vector<double> pk;
    long k_base = 0;
    if (field.is_thermal()) {
        pk = thermal_weights(field.n_bar, policy);
    } else {
        pk = {1.0};
        k_base = field.k;
    }
    const long k_top = k_base + static_cast<long>(pk.size()) - 1;
    if (k_top >= N) {
        throw CutoffTooSmall(
            "inversion_numeric: cutoff N = " + std::to_string(N) +
            " cannot hold the initial-field tail (k_top = " +
            std::to_string(k_top) + ")");
    }
    double weight_mass = 0.0;
    for (double p : pk) {
        weight_mass += p;
    }

    InversionSeries series;
    series.params = params;
    series.field = field;
    series.times.assign(t_grid.begin(), t_grid.end());
    series.truncation.terms_used = pk.size();
    series.truncation.tail_bound = std::max(0.0, 1.0 - weight_mass);

    if (method == Method::lab) {
        std::vector<double> acc(t_grid.size(), 0.0);
        double leakage = 0.0;
        double drift = 0.0;
        for (std::size_t i = 0; i < pk.size(); ++i) {
            const int k = static_cast<int>(k_base + static_cast<long>(i));
            const auto traj = evolve_lab(
                params, QuantumStateVector::fock_excited(k, N), t_grid,
                options);
            for (std::size_t s = 0; s < traj.size(); ++s) {
                acc[s] += pk[i] * sigma_z_expectation(traj[s]);
                leakage = std::max(leakage, top_level_occupation(traj[s]));
                drift = std::max(drift, std::abs(traj[s].norm() - 1.0));
            }
        }
        series.values = std::move(acc);
        series.leakage = leakage;
        series.norm_drift = drift;
        return series;
    }

    const DerivedParams d = derive(params);
    const OperatorMatrix disp = displacement_matrix(d.alpha, N);
    const detail::JcEigensystem jc = detail::diagonalize_jc(params, N);
    const Eigen::Index dim = 2 * N;

    // sigma_z and the top-level projector, rotated into the eigenbasis
    Eigen::VectorXd sz_diag(dim);
    sz_diag.head(N).setConstant(-1.0);
    sz_diag.tail(N).setConstant(1.0);
    const OperatorMatrix s_z =
        jc.evecs.adjoint() * sz_diag.asDiagonal() * jc.evecs;
    Eigen::VectorXd top_diag = Eigen::VectorXd::Zero(dim);
    top_diag(N - 1) = 1.0;
    top_diag(dim - 1) = 1.0;
    const OperatorMatrix s_top =
        jc.evecs.adjoint() * top_diag.asDiagonal() * jc.evecs;

    // weighted sum of pure-trajectory density matrices in the eigenbasis
    OperatorMatrix gram = OperatorMatrix::Zero(dim, dim);
    double drift = 0.0;
    for (std::size_t i = 0; i < pk.size(); ++i) {
        const long k = k_base + static_cast<long>(i);
        Eigen::VectorXcd phi0 = Eigen::VectorXcd::Zero(dim);
        phi0.tail(N) = disp.col(k);  // D |k,e>
        const Eigen::VectorXcd c = jc.evecs.adjoint() * phi0;
        drift = std::max(drift, std::abs(c.squaredNorm() - 1.0));
        gram.noalias() += pk[i] * (c.conjugate() * c.transpose());
    }
    const OperatorMatrix m_z = gram.cwiseProduct(s_z);
    const OperatorMatrix m_top = gram.cwiseProduct(s_top);

    series.values.resize(t_grid.size());
    double leakage = 0.0;
    const std::size_t chunk = 4096;
    Eigen::MatrixXcd w(dim, std::min(chunk, t_grid.size()));
    for (std::size_t begin = 0; begin < t_grid.size(); begin += chunk) {
        const std::size_t count = std::min(chunk, t_grid.size() - begin);
        for (std::size_t c = 0; c < count; ++c) {
            w.col(static_cast<Eigen::Index>(c)) =
                detail::phases_at(jc.evals, t_grid[begin + c]);
        }
        const auto wc = w.leftCols(static_cast<Eigen::Index>(count));
        const Eigen::MatrixXcd z_z = m_z * wc;
        const Eigen::MatrixXcd z_top = m_top * wc;
        for (std::size_t c = 0; c < count; ++c) {
            const Eigen::Index ci = static_cast<Eigen::Index>(c);
            series.values[begin + c] = wc.col(ci).dot(z_z.col(ci)).real();
            leakage = std::max(leakage,
                               wc.col(ci).dot(z_top.col(ci)).real());
        }
    }
    if (leakage > options.leakage_threshold) {
        throw LeakageExceeded("inversion_numeric: top-level occupation " +
                              std::to_string(leakage) +
                              "; increase the cutoff");
    }
    series.leakage = leakage;
    series.norm_drift = drift;
    return series;
}

// Trapezoidal mean of <sigma_z> over [0, T_window]. Converges to W(delta) as
// O(1/T_window) since the residual is a finite sum of cos(2 Omega t) terms.
inline double time_average_numeric(const InversionSeries& series,
                                   double t_window) {
    if (!(t_window > 0.0)) {
        throw Error("time_average_numeric: window must be positive");
    }
    const auto& t = series.times;
    const auto& v = series.values;
    if (t.size() != v.size() || t.size() < 2) {
        throw InsufficientSamples("time_average_numeric: need sampled series");
    }
    const double upper = t_window * (1.0 + 1e-12);
    std::size_t last = 0;
    while (last + 1 < t.size() && t[last + 1] <= upper) {
        ++last;
    }
    if (last + 1 < 1000) {
        throw InsufficientSamples(
            "time_average_numeric: fewer than 1000 samples inside the window");
    }
    if (t[last] < t_window * (1.0 - 1e-6)) {
        throw InsufficientSamples(
            "time_average_numeric: series does not cover the window");
    }
    double integral = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
        integral += 0.5 * (v[i] + v[i + 1]) * (t[i + 1] - t[i]);
    }
    return integral / (t[last] - t.front());
}

}  // namespace djcm::oracle
