#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "combinat.hpp"
#include "linalg.hpp"
#include "quantum.hpp"
#include "rng.hpp"

namespace qcausal {

namespace detail {

// one pow for every closed form, so algebraically equal formulas agree bitwise
inline double pow_dn(std::size_t d, std::size_t n) {
    return std::pow(static_cast<double>(d), static_cast<double>(n));
}

inline void require_dn(std::size_t d, std::size_t n, const char *who) {
    if (d < 2) throw std::invalid_argument(std::string(who) + ": d must be at least 2");
    if (n < 1) throw std::invalid_argument(std::string(who) + ": n must be positive");
}

}  // namespace detail

// best classical error, n uses, d symbols
inline double p_classical(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "p_classical");
    return 1.0 / (2.0 * detail::pow_dn(d, n - 1));
}

inline double log2_p_classical(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "log2_p_classical");
    return -1.0 - static_cast<double>(n - 1) * std::log2(static_cast<double>(d));
}

// product of uniform superpositions
inline double p_coherent(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "p_coherent");
    return 1.0 / (2.0 * detail::pow_dn(d, n));
}

inline double log2_p_coherent(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "log2_p_coherent");
    return -1.0 - static_cast<double>(n) * std::log2(static_cast<double>(d));
}

// fixed grouping into singlets; only d*floor(n/d) uses carry signal
inline double p_singlet(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "p_singlet");
    if (n < d) throw std::invalid_argument("p_singlet: n < d leaves no singlet group");
    return 1.0 / (2.0 * detail::pow_dn(d, d * (n / d)));
}

inline double log2_p_singlet(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "log2_p_singlet");
    if (n < d) throw std::invalid_argument("log2_p_singlet: n < d leaves no singlet group");
    return -1.0 - static_cast<double>(d * (n / d)) * std::log2(static_cast<double>(d));
}

// reference-superposed grouping at explicit multiplicity m. Written as
// 1/(2 m d^n (1+sqrt(1-1/m^2))) rather than the difference form
// (m/(2 d^n))(1-sqrt(1-1/m^2)), which cancels catastrophically for large m.
inline double p_reference_with_multiplicity(std::size_t n, std::size_t d, double m) {
    detail::require_dn(d, n, "p_reference_with_multiplicity");
    if (!(m >= 1.0)) throw std::invalid_argument("p_reference_with_multiplicity: m must be >= 1");
    const double s = std::sqrt(1.0 - 1.0 / (m * m));
    return 1.0 / (2.0 * m * detail::pow_dn(d, n) * (1.0 + s));
}

inline double p_reference(std::size_t n, std::size_t d) {
    require_divisible(n, d, "p_reference");
    return p_reference_with_multiplicity(n, d, multiplicity(n, d).convert_to<double>());
}

inline double log2_p_reference(std::size_t n, std::size_t d) {
    require_divisible(n, d, "log2_p_reference");
    const double lm = multiplicity_log2(n, d);
    const double x = std::exp2(-2.0 * lm);  // 1/m^2, underflows harmlessly to 0
    return -1.0 - lm - static_cast<double>(n) * std::log2(static_cast<double>(d)) -
           std::log2(1.0 + std::sqrt(1.0 - x));
}

// large-m limit of p_reference
inline double p_reference_asymptotic(std::size_t n, std::size_t d) {
    require_divisible(n, d, "p_reference_asymptotic");
    return 1.0 / (4.0 * multiplicity(n, d).convert_to<double>() * detail::pow_dn(d, n));
}

inline double log2_p_reference_asymptotic(std::size_t n, std::size_t d) {
    require_divisible(n, d, "log2_p_reference_asymptotic");
    return -2.0 - multiplicity_log2(n, d) -
           static_cast<double>(n) * std::log2(static_cast<double>(d));
}

// floor over every strategy with a fixed causal arrangement of the n calls
inline double seq_lower_bound(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "seq_lower_bound");
    return 1.0 / (4.0 * detail::pow_dn(d, 2 * n));
}

inline double log2_seq_lower_bound(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "log2_seq_lower_bound");
    return -2.0 - 2.0 * static_cast<double>(n) * std::log2(static_cast<double>(d));
}

// floor including indefinite causal order: x/(2 (1+sqrt(1-x))), x = d^(-2n).
// Same cancellation-safe shape as p_reference.
inline double indefinite_lower_bound(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "indefinite_lower_bound");
    const double x = 1.0 / detail::pow_dn(d, 2 * n);
    return 0.5 * x / (1.0 + std::sqrt(1.0 - x));
}

inline double log2_indefinite_lower_bound(std::size_t n, std::size_t d) {
    detail::require_dn(d, n, "log2_indefinite_lower_bound");
    const double x = std::exp2(-2.0 * static_cast<double>(n) * std::log2(static_cast<double>(d)));
    return -1.0 - 2.0 * static_cast<double>(n) * std::log2(static_cast<double>(d)) -
           std::log2(1.0 + std::sqrt(1.0 - x));
}

// k equiprobable causal arrangements instead of two
enum class MultiSetting { classical, quantum };

inline double p_multi_k(std::size_t n, std::size_t d, std::size_t k, MultiSetting setting) {
    detail::require_dn(d, n, "p_multi_k");
    if (k < 2) throw std::invalid_argument("p_multi_k: need at least two hypotheses");
    const double km1 = static_cast<double>(k - 1);
    return setting == MultiSetting::classical ? km1 / (2.0 * detail::pow_dn(d, n - 1))
                                              : km1 / (2.0 * detail::pow_dn(d, n));
}

struct RatePoint {
    double n = 0.0;
    double log2_p = 0.0;
};

// least-squares slope of -log2(p) against n
inline double decay_rate_fit(const std::vector<RatePoint> &points) {
    if (points.size() < 2) throw std::invalid_argument("decay_rate_fit: need at least two points");
    double nbar = 0.0, ybar = 0.0;
    for (const auto &p : points) {
        nbar += p.n;
        ybar += -p.log2_p;
    }
    nbar /= static_cast<double>(points.size());
    ybar /= static_cast<double>(points.size());
    double num = 0.0, den = 0.0;
    for (const auto &p : points) {
        num += (p.n - nbar) * (-p.log2_p - ybar);
        den += (p.n - nbar) * (p.n - nbar);
    }
    if (den == 0.0) throw std::invalid_argument("decay_rate_fit: all abscissae equal");
    return num / den;
}

enum class DecayKind {
    classical,
    coherent,
    singlet,
    reference,
    quantum_limit,
    link_classical,
    link_quantum,
};

// bits of discrimination gained per use, in the large-n limit
inline double decay_rate_closed(DecayKind kind, std::size_t d) {
    if (d < 2) throw std::invalid_argument("decay_rate_closed: d must be at least 2");
    const double l = std::log2(static_cast<double>(d));
    switch (kind) {
        case DecayKind::classical:
        case DecayKind::coherent:
        case DecayKind::singlet:
        case DecayKind::link_classical:
            return l;
        case DecayKind::reference:
        case DecayKind::quantum_limit:
        case DecayKind::link_quantum:
            return 2.0 * l;
    }
    throw std::logic_error("decay_rate_closed: unknown kind");
}

struct CauseIdResult {
    double error_probability = 0.0;
    std::size_t classical_queries = 0;
    std::size_t quantum_queries = 0;
};

// identification among num_causes candidate causes after n uses, plus the
// query counts needed to drive the error to zero classically and quantumly
inline CauseIdResult cause_id(std::size_t num_causes, std::size_t d, std::size_t n,
                              double eps = 0.0) {
    detail::require_dn(d, n, "cause_id");
    if (num_causes < 1) throw std::invalid_argument("cause_id: need at least one candidate");
    if (eps < 0.0) throw std::invalid_argument("cause_id: eps must be nonnegative");

    CauseIdResult res;
    const double mm1 = static_cast<double>(num_causes - 1);
    res.error_probability = mm1 / (detail::pow_dn(d, 2 * n) + mm1);

    // smallest q with d^q >= num_causes, in exact integers
    std::size_t q = 0;
    BigInt power = 1;
    while (power < num_causes) {
        power *= static_cast<unsigned>(d);
        ++q;
    }
    res.classical_queries = q;

    // ceil((1+eps) log_d(num_causes) / 2); exact powers of d use the integer
    // exponent so the ceiling cannot be pushed up by rounding noise
    double logdm;
    if (power == num_causes) {
        logdm = static_cast<double>(q);
    } else {
        logdm = std::log(static_cast<double>(num_causes)) / std::log(static_cast<double>(d));
    }
    const double v = (1.0 + eps) * logdm / 2.0;
    res.quantum_queries =
        static_cast<std::size_t>(std::ceil(v - 1e-9 * std::max(1.0, std::abs(v))));
    return res;
}

struct ClaimResult {
    std::size_t n_quantum = 0;
    std::size_t n_classical = 0;
    double p_quantum = 0.0;
    double p_classical = 0.0;
};

// Smallest n with error at or below the threshold, for the reference strategy
// (uses beyond the last full group of d are ignored; below one full group the
// probe is uninformative and the error is 1/2) and for the best classical
// strategy. Comparisons run in the log domain so tiny thresholds stay exact.
inline ClaimResult claim_crossover(std::size_t d, double threshold) {
    if (d < 2) throw std::invalid_argument("claim_crossover: d must be at least 2");
    if (!(threshold > 0.0) || threshold > 1.0)
        throw std::invalid_argument("claim_crossover: threshold must lie in (0, 1]");
    const double lt = std::log2(threshold);

    ClaimResult res;
    for (std::size_t n = 1;; ++n) {
        if (n > 200000) throw std::runtime_error("claim_crossover: threshold out of reach");
        const std::size_t active = d * (n / d);
        const double lp = active == 0 ? -1.0 : log2_p_reference(active, d);
        if (lp <= lt) {
            res.n_quantum = n;
            res.p_quantum = std::exp2(lp);
            break;
        }
    }
    for (std::size_t n = 1;; ++n) {
        if (n > 200000) throw std::runtime_error("claim_crossover: threshold out of reach");
        const double lp = log2_p_classical(n, d);
        if (lp <= lt) {
            res.n_classical = n;
            res.p_classical = std::exp2(lp);
            break;
        }
    }
    return res;
}

// Haar pure state on a dim-dimensional space
inline CVec haar_pure(std::size_t dim, Rng &rng) {
    CVec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = cplx(rng.gaussian(), rng.gaussian());
    const double nrm = vec_norm(v);
    for (auto &x : v) x /= nrm;
    return v;
}

// Smallest observed ratio F(out1, out2) / F(in1, in2) over sampled pure input
// pairs fed through c1 and c2 (each extended by an inert reference of
// dimension ref_dim). The first pair is always identical inputs; remaining
// pairs are independent Haar states. Pairs with input fidelity below 1e-10
// are skipped. Squared-fidelity convention throughout.
inline double fidelity_divergence_estimate(const Channel &c1, const Channel &c2,
                                           std::size_t ref_dim, std::size_t samples, Rng &rng) {
    if (c1.in_dim() != c2.in_dim())
        throw std::invalid_argument("fidelity_divergence_estimate: input dimensions differ");
    if (c1.out_dim() != c2.out_dim())
        throw std::invalid_argument("fidelity_divergence_estimate: output dimensions differ");
    if (ref_dim < 1) throw std::invalid_argument("fidelity_divergence_estimate: ref_dim must be >= 1");
    if (samples < 1) throw std::invalid_argument("fidelity_divergence_estimate: need samples");

    const std::size_t din = c1.in_dim();
    const std::vector<std::size_t> dims{din, ref_dim};
    bool any = false;
    double best = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const CVec v1 = haar_pure(din * ref_dim, rng);
        const CVec v2 = s == 0 ? v1 : haar_pure(din * ref_dim, rng);
        const cplx ov = vdot(v1, v2);
        const double f_in = std::norm(ov);
        if (f_in <= 1e-10) continue;

        const MultiState o1 = apply_channel(c1, pure_state(v1, dims), {0});
        const MultiState o2 = apply_channel(c2, pure_state(v2, dims), {0});
        const double f_out = state_fidelity(o1.rho, o2.rho);
        const double ratio = f_out / f_in;
        if (!any || ratio < best) best = ratio;
        any = true;
    }
    if (!any)
        throw std::runtime_error("fidelity_divergence_estimate: every sampled pair was orthogonal");
    return best;
}

}  // namespace qcausal
