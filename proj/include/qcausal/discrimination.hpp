#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "combinat.hpp"
#include "hermitian_eig.hpp"
#include "linalg.hpp"
#include "quantum.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "strategies.hpp"

namespace qcausal {

enum class HelstromPath { automatic, dense, low_rank };

struct DiscriminationResult {
    enum class Method { helstrom, srm, tv_enumeration, monte_carlo };
    double error_probability = 0.0;
    Method method = Method::helstrom;
    std::optional<double> trace_distance;
    std::optional<std::uint64_t> samples;
    std::optional<double> std_err;
    std::optional<Rational> exact;
    std::vector<std::size_t> best_inputs;
};

namespace detail {

constexpr std::size_t kLowRankAmbientFloor = 1024;
constexpr std::size_t kLowRankRankCap = 256;

inline ComplexMatrix low_rank_to_dense(const WeightedVectors &w, std::size_t side) {
    ComplexMatrix m(side, side);
    for (std::size_t k = 0; k < w.weights.size(); ++k) {
        const CVec &v = w.vectors[k];
        for (std::size_t i = 0; i < side; ++i) {
            if (v[i] == cplx(0.0, 0.0)) continue;
            const cplx wvi = w.weights[k] * v[i];
            for (std::size_t j = 0; j < side; ++j) m(i, j) += wvi * std::conj(v[j]);
        }
    }
    return m;
}

}  // namespace detail

// Minimum-error probability for a binary hypothesis test between s1 and s2
// with priors (prior1, 1-prior1): (1 - ||p1 rho1 - p2 rho2||_1) / 2.
// The low-rank path never materializes the ambient density matrices; it is
// selected automatically when both states carry small ensembles in a large
// ambient space, or forced via `path`.
inline DiscriminationResult helstrom_error(const MultiState &s1, const MultiState &s2,
                                           double prior1 = 0.5,
                                           HelstromPath path = HelstromPath::automatic) {
    if (s1.dims != s2.dims) throw std::invalid_argument("helstrom_error: factor dimensions differ");
    if (!(prior1 > 0.0) || !(prior1 < 1.0))
        throw std::invalid_argument("helstrom_error: prior must lie strictly between 0 and 1");
    const double prior2 = 1.0 - prior1;
    const std::size_t side = s1.side();

    bool use_low_rank = false;
    switch (path) {
        case HelstromPath::dense:
            break;
        case HelstromPath::low_rank:
            if (!s1.low_rank || !s2.low_rank)
                throw std::invalid_argument("helstrom_error: low-rank path requires ensembles");
            use_low_rank = true;
            break;
        case HelstromPath::automatic:
            use_low_rank = s1.low_rank && s2.low_rank &&
                           s1.low_rank->weights.size() <= detail::kLowRankRankCap &&
                           s2.low_rank->weights.size() <= detail::kLowRankRankCap &&
                           side > detail::kLowRankAmbientFloor;
            break;
    }

    double dist = 0.0;
    if (use_low_rank) {
        WeightedVectors a = *s1.low_rank, b = *s2.low_rank;
        for (double &w : a.weights) w *= prior1;
        for (double &w : b.weights) w *= prior2;
        dist = low_rank_trace_norm(a, b);
    } else {
        ComplexMatrix r1 = s1.rho.rows() ? s1.rho : detail::low_rank_to_dense(*s1.low_rank, side);
        ComplexMatrix r2 = s2.rho.rows() ? s2.rho : detail::low_rank_to_dense(*s2.low_rank, side);
        r1 *= cplx(prior1, 0.0);
        r2 *= cplx(prior2, 0.0);
        dist = trace_norm(r1 - r2);
    }

    DiscriminationResult res;
    res.method = DiscriminationResult::Method::helstrom;
    res.trace_distance = dist;
    res.error_probability = 0.5 * (1.0 - dist);
    if (res.error_probability < 0.0 && res.error_probability > -1e-12) res.error_probability = 0.0;
    return res;
}

namespace detail {

// expand a multiplicity pattern (how many sites share each symbol) into a
// concrete non-decreasing input word of length n
inline std::vector<std::size_t> pattern_to_inputs(const std::vector<std::size_t> &pattern,
                                                  std::size_t n) {
    std::vector<std::size_t> inputs;
    inputs.reserve(n);
    for (std::size_t sym = 0; sym < pattern.size(); ++sym)
        for (std::size_t k = 0; k < pattern[sym]; ++k) inputs.push_back(sym);
    return inputs;
}

inline Rational total_variation(const ClassicalDistribution &p1, const ClassicalDistribution &p2) {
    Rational tv(0);
    for (std::size_t i = 0; i < p1.p.size(); ++i) {
        Rational diff = p1.p[i] - p2.p[i];
        tv += diff.abs();
    }
    return tv * Rational(1, 2);
}

}  // namespace detail

// Best classical strategy at d symbols and n uses: maximize the total
// variation between the two hypothesis distributions over input words.
// Relabeling symbols or reordering sites never changes the distance, so only
// multiplicity patterns are enumerated. Exact rational output.
inline DiscriminationResult classical_optimum(std::size_t d, std::size_t n) {
    if (d < 2 || d > 3 || n < 1 || n > 4)
        throw std::invalid_argument("classical_optimum: supported range is d in {2,3}, n in 1..4");

    HypothesisSpec h1, h2;
    h1.d = h2.d = d;
    h1.family = h2.family = DependenceFamily::permutation;
    h1.slot = EffectSlot::first;
    h2.slot = EffectSlot::second;

    DiscriminationResult res;
    res.method = DiscriminationResult::Method::tv_enumeration;
    Rational best(-1);
    for (const auto &pattern : count_partitions(n, d)) {
        const auto inputs = detail::pattern_to_inputs(pattern, n);
        const auto p1 = classical_output_distribution(inputs, h1);
        const auto p2 = classical_output_distribution(inputs, h2);
        const Rational tv = detail::total_variation(p1, p2);
        if (best < tv) {
            best = tv;
            res.best_inputs = inputs;
        }
    }
    res.exact = (Rational(1) - best) * Rational(1, 2);
    res.error_probability = res.exact->to_double();
    res.trace_distance = best.to_double();
    return res;
}

// Square-root ("pretty good") measurement error for an ensemble of states.
inline DiscriminationResult srm_error(const std::vector<MultiState> &states,
                                      const std::vector<double> &priors) {
    if (states.size() < 2) throw std::invalid_argument("srm_error: need at least two states");
    if (states.size() != priors.size())
        throw std::invalid_argument("srm_error: prior count differs from state count");
    const std::size_t side = states[0].side();
    double psum = 0.0;
    for (double p : priors) {
        if (p < 0.0) throw std::invalid_argument("srm_error: negative prior");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9) throw std::invalid_argument("srm_error: priors must sum to 1");

    ComplexMatrix s(side, side);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].side() != side) throw std::invalid_argument("srm_error: dimension mismatch");
        ComplexMatrix term = states[i].rho;
        term *= cplx(priors[i], 0.0);
        s += term;
    }

    // pseudo-inverse square root of the ensemble average
    EigenDecomposition eig = hermitian_eig(s);
    const double cutoff = 1e-12 * std::max(eig.values.empty() ? 0.0 : eig.values.front(), 0.0);
    ComplexMatrix sm(side, side);
    for (std::size_t k = 0; k < side; ++k) {
        if (eig.values[k] <= cutoff) continue;
        const double inv_sqrt = 1.0 / std::sqrt(eig.values[k]);
        for (std::size_t i = 0; i < side; ++i) {
            const cplx vik = eig.vectors(i, k) * inv_sqrt;
            if (vik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < side; ++j) sm(i, j) += vik * std::conj(eig.vectors(j, k));
        }
    }

    double success = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const ComplexMatrix proj = sm * states[i].rho * sm;
        success += priors[i] * priors[i] * (states[i].rho * proj).trace().real();
    }

    DiscriminationResult res;
    res.method = DiscriminationResult::Method::srm;
    res.error_probability = 1.0 - success;
    if (res.error_probability < 0.0 && res.error_probability > -1e-12) res.error_probability = 0.0;
    return res;
}

// Monte Carlo estimate of the classical maximum-likelihood error for a fixed
// input word: sample a hypothesis and a hidden permutation, draw the outcome
// block, decide by exact likelihood comparison (ties to the first hypothesis).
inline DiscriminationResult monte_carlo_classical(std::size_t d, std::size_t n,
                                                  const std::vector<std::size_t> &inputs,
                                                  std::uint64_t trials, Rng &rng) {
    if (trials < 100) throw std::invalid_argument("monte_carlo_classical: need at least 100 trials");
    if (inputs.size() != n) throw std::invalid_argument("monte_carlo_classical: input count differs from n");

    HypothesisSpec h1, h2;
    h1.d = h2.d = d;
    h1.family = h2.family = DependenceFamily::permutation;
    h1.slot = EffectSlot::first;
    h2.slot = EffectSlot::second;
    const auto p1 = classical_output_distribution(inputs, h1);
    const auto p2 = classical_output_distribution(inputs, h2);

    std::size_t dn = 1;
    for (std::size_t k = 0; k < n; ++k) dn *= d;

    std::vector<std::size_t> perm(d);
    std::uint64_t errors = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const bool is_h1 = rng.uniform() < 0.5;
        for (std::size_t i = 0; i < d; ++i) perm[i] = i;
        for (std::size_t i = d; i-- > 1;) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);

        std::size_t effect = 0;
        for (std::size_t k = 0; k < n; ++k) effect = effect * d + perm[inputs[k]];
        std::size_t other = 0;
        for (std::size_t k = 0; k < n; ++k) other = other * d + rng.uniform_int(d);

        const std::size_t idx = ((is_h1 ? h1.slot : h2.slot) == EffectSlot::first)
                                    ? effect * dn + other
                                    : other * dn + effect;
        const bool guess_h1 = !(p1.p[idx] < p2.p[idx]);
        if (guess_h1 != is_h1) ++errors;
    }

    DiscriminationResult res;
    res.method = DiscriminationResult::Method::monte_carlo;
    res.samples = trials;
    const double p_hat = static_cast<double>(errors) / static_cast<double>(trials);
    res.error_probability = p_hat;
    res.std_err = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
    res.best_inputs = inputs;
    return res;
}

}  // namespace qcausal
