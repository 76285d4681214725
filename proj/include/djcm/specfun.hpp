// specfun.hpp — Associated Laguerre polynomials and displaced-number-state
// overlap probabilities, the series kernel behind the driven-model inversion
// and lineshape sums.
//
// Overlaps are evaluated in log space with a rescaled three-term recurrence so
// that index gaps of several hundred neither overflow nor underflow.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "djcm/model.hpp"

namespace djcm {

namespace detail {

// exp(x) would underflow to 0 below roughly -745; skip work well before that
inline constexpr double kNegligibleLog = -600.0;

inline constexpr double kRescaleHi = 1e140;
inline constexpr double kRescaleLo = 1e-140;

// Walks L_n^{(a)}(x) for n = 0..n_max via the degree recurrence
//   L_0 = 1,  L_1 = 1 + a - x,  (n+1) L_{n+1} = (2n+1+a-x) L_n - (n+a) L_{n-1}
// presenting each value as mantissa * exp(log_scale). Rescales whenever the
// mantissa pair leaves [1e-140, 1e140], so the walk never overflows.
template <typename Visit>
void laguerre_scaled_walk(std::size_t n_max, double a, double x,
                          Visit&& visit) {
    double prev = 1.0;  // L_0
    double log_scale = 0.0;
    visit(std::size_t{0}, prev, log_scale);
    if (n_max == 0) {
        return;
    }
    double cur = 1.0 + a - x;  // L_1
    visit(std::size_t{1}, cur, log_scale);
    for (std::size_t n = 1; n < n_max; ++n) {
        const double dn = static_cast<double>(n);
        double next =
            ((2.0 * dn + 1.0 + a - x) * cur - (dn + a) * prev) / (dn + 1.0);
        prev = cur;
        cur = next;
        const double mag = std::max(std::abs(cur), std::abs(prev));
        if (mag > kRescaleHi) {
            cur *= kRescaleLo;
            prev *= kRescaleLo;
            log_scale += std::log(kRescaleHi);
        } else if (mag < kRescaleLo && mag > 0.0) {
            cur *= kRescaleHi;
            prev *= kRescaleHi;
            log_scale -= std::log(kRescaleHi);
        }
        visit(n + 1, cur, log_scale);
    }
}

// log of the A&S bound |L_n^{(a)}(x)| <= C(n+a, n) e^{x/2} for a, x >= 0
inline double laguerre_log_bound(double n, double a, double x) {
    return std::lgamma(n + a + 1.0) - std::lgamma(n + 1.0) -
           std::lgamma(a + 1.0) + 0.5 * x;
}

}  // namespace detail

// Associated Laguerre polynomial L_n^{(a)}(x) by the three-term recurrence in
// the degree at fixed superscript.
inline double laguerre_assoc(long n, long a, double x) {
    if (n < 0 || a < 0 || !(x >= 0.0)) {
        throw Error("laguerre_assoc: requires n >= 0, a >= 0, x >= 0");
    }
    double value = 0.0;
    detail::laguerre_scaled_walk(
        static_cast<std::size_t>(n), static_cast<double>(a), x,
        [&](std::size_t deg, double mant, double log_scale) {
            if (deg == static_cast<std::size_t>(n)) {
                value = mant * std::exp(log_scale);
            }
        });
    return value;
}

// Probability |<m|D(alpha)|k>|^2 of finding m photons in the displaced number
// state D(alpha)|k>. Symmetric two-branch form
//   P = e^{-a^2} (min!/max!) a^{2|m-k|} [L_min^{(|m-k|)}(a^2)]^2
// evaluated with the factorial ratio and power in log space.
inline double displaced_number_overlap(long m, long k, double alpha) {
    if (m < 0 || k < 0) {
        throw Error("displaced_number_overlap: indices must be >= 0");
    }
    if (!(alpha >= 0.0)) {
        throw Error("displaced_number_overlap: alpha must be >= 0");
    }
    if (alpha == 0.0) {
        return m == k ? 1.0 : 0.0;
    }
    const long mn = std::min(m, k);
    const long mx = std::max(m, k);
    const long j = mx - mn;
    const double x = alpha * alpha;
    const double log_pref = -x + std::lgamma(mn + 1.0) -
                            std::lgamma(mx + 1.0) +
                            2.0 * j * std::log(alpha);
    if (log_pref + 2.0 * detail::laguerre_log_bound(
                             static_cast<double>(mn), static_cast<double>(j),
                             x) <
        detail::kNegligibleLog) {
        return 0.0;
    }
    double mant = 0.0;
    double scale = 0.0;
    detail::laguerre_scaled_walk(
        static_cast<std::size_t>(mn), static_cast<double>(j), x,
        [&](std::size_t deg, double value, double log_scale) {
            if (deg == static_cast<std::size_t>(mn)) {
                mant = value;
                scale = log_scale;
            }
        });
    if (mant == 0.0) {
        return 0.0;
    }
    const double log_p = log_pref + 2.0 * (std::log(std::abs(mant)) + scale);
    return log_p < detail::kNegligibleLog ? 0.0 : std::exp(log_p);
}

// Photon-number probability of the displaced thermal state,
//   P(m) = 1/(1+n_bar) sum_k (n_bar/(1+n_bar))^k |<m|D(alpha)|k>|^2,
// with the k-sum cut once the geometric tail mass falls below policy.epsilon.
inline double displaced_thermal_weight(long m, double n_bar, double alpha,
                                       const TruncationPolicy& policy = {}) {
    policy.validate();
    if (m < 0) {
        throw Error("displaced_thermal_weight: m must be >= 0");
    }
    if (!(n_bar >= 0.0)) {
        throw NegativeRate("displaced_thermal_weight: n_bar must be >= 0");
    }
    if (alpha == 0.0) {
        // bare geometric distribution, exactly
        return std::pow(n_bar / (1.0 + n_bar), static_cast<double>(m)) /
               (1.0 + n_bar);
    }
    if (n_bar == 0.0) {
        return displaced_number_overlap(m, 0, alpha);
    }
    const double ratio = n_bar / (1.0 + n_bar);
    double pk = 1.0 / (1.0 + n_bar);
    double tail = 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < policy.max_terms; ++k) {
        sum += pk * displaced_number_overlap(m, static_cast<long>(k), alpha);
        tail *= ratio;
        if (tail < policy.epsilon) {
            return sum;
        }
        pk *= ratio;
    }
    throw TruncationCapExceeded(
        "displaced_thermal_weight: thermal tail not resolved within max_terms");
}

// -------------------------- displaced-number table --------------------------

// Dense table of P(m|k; alpha) = |<m|D(alpha)|k>|^2 for m = 0..m_max,
// k = 0..k_max. Filled one superscript-diagonal at a time so each diagonal
// costs a single recurrence pass; symmetric in (m, k) by construction.
class OverlapTable {
  public:
    OverlapTable(std::size_t m_max, std::size_t k_max, double alpha)
        : m_count_(m_max + 1),
          k_count_(k_max + 1),
          alpha_(alpha),
          data_(m_count_ * k_count_, 0.0) {
        if (!(alpha >= 0.0)) {
            throw Error("OverlapTable: alpha must be >= 0");
        }
        if (alpha == 0.0) {
            for (std::size_t i = 0; i < std::min(m_count_, k_count_); ++i) {
                data_[i * k_count_ + i] = 1.0;
            }
            return;
        }
        const double x = alpha * alpha;
        const double log_alpha = std::log(alpha);
        // lgamma(i+1) lookup for all indices the table can touch
        std::vector<double> lg(m_count_ + k_count_, 0.0);
        for (std::size_t i = 1; i < lg.size(); ++i) {
            lg[i] = std::lgamma(static_cast<double>(i) + 1.0);
        }
        const auto fill_diagonal = [&](std::size_t j, bool m_above_k) {
            const std::size_t n_end = m_above_k
                                          ? std::min(k_max, m_max - j)
                                          : std::min(m_max, k_max - j);
            // bound grows with the degree; prune when even the last entry
            // cannot reach representable magnitude
            const double worst =
                lg[n_end + j] - lg[n_end] - 2.0 * lg[j] +
                2.0 * static_cast<double>(j) * log_alpha;
            if (worst < detail::kNegligibleLog) {
                return;
            }
            detail::laguerre_scaled_walk(
                n_end, static_cast<double>(j), x,
                [&](std::size_t n, double mant, double log_scale) {
                    if (mant == 0.0) {
                        return;
                    }
                    const double log_pref =
                        -x + lg[n] - lg[n + j] +
                        2.0 * static_cast<double>(j) * log_alpha;
                    const double log_p =
                        log_pref +
                        2.0 * (std::log(std::abs(mant)) + log_scale);
                    if (log_p < detail::kNegligibleLog) {
                        return;
                    }
                    const double p = std::exp(log_p);
                    const std::size_t m = m_above_k ? n + j : n;
                    const std::size_t k = m_above_k ? n : n + j;
                    data_[m * k_count_ + k] = p;
                });
        };
        for (std::size_t j = 0; j <= m_max; ++j) {
            fill_diagonal(j, true);
        }
        for (std::size_t j = 1; j <= k_max; ++j) {
            fill_diagonal(j, false);
        }
    }

    double at(std::size_t m, std::size_t k) const {
        return data_[m * k_count_ + k];
    }

    std::size_t m_count() const { return m_count_; }
    std::size_t k_count() const { return k_count_; }
    double alpha() const { return alpha_; }

  private:
    std::size_t m_count_;
    std::size_t k_count_;
    double alpha_;
    std::vector<double> data_;
};

// ------------------------------ weight tables -------------------------------

// Photon-number weights of an initial-field distribution, truncated once the
// accumulated mass reaches 1 - epsilon.
struct WeightTable {
    std::vector<double> weights;
    TruncationReport report;
};

inline WeightTable geometric_weight_table(double n_bar,
                                          const TruncationPolicy& policy = {}) {
    WeightTable t;
    t.weights = thermal_weights(n_bar, policy);
    double sum = 0.0;
    for (double w : t.weights) {
        sum += w;
    }
    t.report.terms_used = t.weights.size();
    t.report.tail_bound = std::max(0.0, 1.0 - sum);
    return t;
}

// Column of the displaced-number overlap, P(m|k; alpha) over m.
inline WeightTable fock_weight_table(long k, double alpha,
                                     const TruncationPolicy& policy = {}) {
    policy.validate();
    if (k < 0) {
        throw Error("fock_weight_table: k must be >= 0");
    }
    WeightTable t;
    if (alpha == 0.0) {
        t.weights.assign(static_cast<std::size_t>(k) + 1, 0.0);
        t.weights.back() = 1.0;
        t.report.terms_used = t.weights.size();
        t.report.tail_bound = 0.0;
        return t;
    }
    double sum = 0.0;
    for (std::size_t m = 0; m < policy.max_terms; ++m) {
        const double p =
            displaced_number_overlap(static_cast<long>(m), k, alpha);
        t.weights.push_back(p);
        sum += p;
        if (sum >= 1.0 - policy.epsilon) {
            t.report.terms_used = t.weights.size();
            t.report.tail_bound = std::max(0.0, 1.0 - sum);
            return t;
        }
    }
    throw TruncationCapExceeded(
        "fock_weight_table: overlap column mass not resolved within max_terms "
        "(k = " +
        std::to_string(k) + ", alpha = " + std::to_string(alpha) + ")");
}

// Displaced-thermal weights P(m), accumulated diagonal-wise so the whole
// vector costs O(m_max * k_max) recurrence steps. The inner thermal sum keeps
// tail mass below epsilon/2, the outer m cut keeps the remaining weight below
// epsilon.
inline WeightTable displaced_thermal_weight_table(
    double n_bar, double alpha, const TruncationPolicy& policy = {}) {
    policy.validate();
    if (!(n_bar >= 0.0)) {
        throw NegativeRate("displaced_thermal_weight_table: n_bar must be >= 0");
    }
    if (!(alpha >= 0.0)) {
        throw Error("displaced_thermal_weight_table: alpha must be >= 0");
    }
    if (alpha == 0.0) {
        return geometric_weight_table(n_bar, policy);
    }
    TruncationPolicy inner = policy;
    inner.epsilon = 0.5 * policy.epsilon;
    const std::vector<double> pk = thermal_weights(n_bar, inner);
    const std::size_t k_max = pk.size() - 1;

    const double x = alpha * alpha;
    const double log_alpha = std::log(alpha);
    std::size_t m_cap = std::min<std::size_t>(
        policy.max_terms - 1,
        k_max + 10 +
            static_cast<std::size_t>(std::ceil(x + 10.0 * alpha + 10.0)));

    std::vector<double> lg;
    const auto accumulate = [&](std::vector<double>& w) {
        lg.assign(m_cap + k_max + 2, 0.0);
        for (std::size_t i = 1; i < lg.size(); ++i) {
            lg[i] = std::lgamma(static_cast<double>(i) + 1.0);
        }
        const auto run_diagonal = [&](std::size_t j, bool m_above_k) {
            const std::size_t n_end = m_above_k ? std::min(k_max, m_cap - j)
                                                : std::min(m_cap, k_max - j);
            const double worst = lg[n_end + j] - lg[n_end] - 2.0 * lg[j] +
                                 2.0 * static_cast<double>(j) * log_alpha;
            if (worst < detail::kNegligibleLog) {
                return;
            }
            detail::laguerre_scaled_walk(
                n_end, static_cast<double>(j), x,
                [&](std::size_t n, double mant, double log_scale) {
                    if (mant == 0.0) {
                        return;
                    }
                    const double log_p =
                        -x + lg[n] - lg[n + j] +
                        2.0 * static_cast<double>(j) * log_alpha +
                        2.0 * (std::log(std::abs(mant)) + log_scale);
                    if (log_p < detail::kNegligibleLog) {
                        return;
                    }
                    const std::size_t m = m_above_k ? n + j : n;
                    const std::size_t k = m_above_k ? n : n + j;
                    w[m] += pk[k] * std::exp(log_p);
                });
        };
        for (std::size_t j = 0; j <= m_cap; ++j) {
            run_diagonal(j, true);
        }
        for (std::size_t j = 1; j <= k_max; ++j) {
            run_diagonal(j, false);
        }
    };

    for (;;) {
        std::vector<double> w(m_cap + 1, 0.0);
        accumulate(w);
        double sum = 0.0;
        for (std::size_t m = 0; m <= m_cap; ++m) {
            sum += w[m];
            if (sum >= 1.0 - policy.epsilon) {
                WeightTable t;
                t.weights.assign(w.begin(),
                                 w.begin() + static_cast<std::ptrdiff_t>(m + 1));
                t.report.terms_used = m + 1;
                t.report.tail_bound = std::max(0.0, 1.0 - sum);
                return t;
            }
        }
        if (m_cap + 1 >= policy.max_terms) {
            throw TruncationCapExceeded(
                "displaced_thermal_weight_table: weight mass not resolved "
                "within max_terms (n_bar = " +
                std::to_string(n_bar) + ", alpha = " + std::to_string(alpha) +
                ")");
        }
        m_cap = std::min(policy.max_terms - 1, (m_cap * 8) / 5 + 16);
    }
}

// Weights of the transformed-frame photon distribution for any initial field.
inline WeightTable field_weight_table(const FieldSpec& field, double alpha,
                                      const TruncationPolicy& policy = {}) {
    if (field.is_thermal()) {
        return displaced_thermal_weight_table(field.n_bar, alpha, policy);
    }
    return fock_weight_table(field.k, alpha, policy);
}

}  // namespace djcm
