#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "combinat.hpp"
#include "quantum.hpp"
#include "rational.hpp"

namespace qcausal {

// Probe preparation taxonomy. `inputs` is used by the classical kind,
// `partition` by the singlet kind (contiguous groups when absent).
struct ProbeKind {
    enum class Kind { classical, coherent, singlet, reference };
    Kind kind = Kind::coherent;
    std::vector<std::size_t> inputs;
    std::optional<GroupPartition> partition;

    static ProbeKind classical_inputs(std::vector<std::size_t> in) {
        ProbeKind p;
        p.kind = Kind::classical;
        p.inputs = std::move(in);
        return p;
    }
    static ProbeKind coherent() { return ProbeKind{}; }
    static ProbeKind singlet(std::optional<GroupPartition> part = std::nullopt) {
        ProbeKind p;
        p.kind = Kind::singlet;
        p.partition = std::move(part);
        return p;
    }
    static ProbeKind reference() {
        ProbeKind p;
        p.kind = Kind::reference;
        return p;
    }
};

// |e0> = sum_i |i>/sqrt(d), n copies.
inline MultiState coherent_probe(std::size_t n, std::size_t d) {
    if (n < 1 || d < 2) throw std::invalid_argument("coherent_probe: need n >= 1, d >= 2");
    std::size_t dim = 1;
    for (std::size_t k = 0; k < n; ++k) dim *= d;
    CVec v(dim, cplx(std::pow(static_cast<double>(d), -0.5 * static_cast<double>(n)), 0.0));
    return pure_state(v, std::vector<std::size_t>(n, d));
}

namespace detail {

// totally antisymmetric d-party vector (1/sqrt(d!)) sum_pi sign(pi) |pi>
inline CVec singlet_vec(std::size_t d) {
    std::size_t dim = 1, dfact = 1;
    for (std::size_t k = 0; k < d; ++k) dim *= d;
    for (std::size_t k = 2; k <= d; ++k) dfact *= k;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dfact));
    CVec v(dim, cplx(0.0, 0.0));
    std::vector<std::size_t> perm(d);
    for (std::size_t i = 0; i < d; ++i) perm[i] = i;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                if (perm[i] > perm[j]) ++inversions;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < d; ++i) idx = idx * d + perm[i];
        v[idx] = (inversions % 2 == 0 ? amp : -amp);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return v;
}

inline void validate_partition(const GroupPartition &p, std::size_t n, std::size_t d,
                               const char *who) {
    std::vector<bool> seen(n, false);
    if (p.groups.size() != n / d) throw std::invalid_argument(std::string(who) + ": wrong group count");
    for (const auto &g : p.groups) {
        if (g.size() != d) throw std::invalid_argument(std::string(who) + ": group size differs from d");
        for (std::size_t site : g) {
            if (site >= n || seen[site]) throw std::invalid_argument(std::string(who) + ": not an exact cover");
            seen[site] = true;
        }
    }
}

inline CVec grouped_singlet_vec(const GroupPartition &p, std::size_t n, std::size_t d) {
    std::size_t dim = 1;
    for (std::size_t k = 0; k < n; ++k) dim *= d;
    std::vector<std::size_t> site_stride(n, 1);
    for (std::size_t k = n; k-- > 1;) site_stride[k - 1] = site_stride[k] * d;

    const CVec sv = singlet_vec(d);
    // nonzero singlet entries as (symbol tuple, amplitude)
    std::vector<std::pair<std::vector<std::size_t>, double>> terms;
    for (std::size_t idx = 0; idx < sv.size(); ++idx) {
        if (sv[idx] == cplx(0.0, 0.0)) continue;
        std::vector<std::size_t> symbols(d);
        std::size_t rem = idx;
        for (std::size_t i = d; i-- > 0;) {
            symbols[i] = rem % d;
            rem /= d;
        }
        terms.emplace_back(std::move(symbols), sv[idx].real());
    }

    CVec v(dim, cplx(0.0, 0.0));
    const std::size_t ngroups = p.groups.size();
    std::vector<std::size_t> choice(ngroups, 0);
    while (true) {
        double amp = 1.0;
        std::size_t idx = 0;
        for (std::size_t g = 0; g < ngroups; ++g) {
            const auto &term = terms[choice[g]];
            amp *= term.second;
            for (std::size_t t = 0; t < d; ++t) idx += term.first[t] * site_stride[p.groups[g][t]];
        }
        v[idx] += amp;
        std::size_t g = 0;
        while (g < ngroups && ++choice[g] == terms.size()) choice[g++] = 0;
        if (g == ngroups) break;
    }
    return v;
}

// single-site operator action on a flat tensor vector
inline CVec apply_site_operator(const CVec &v, const std::vector<std::size_t> &dims,
                                std::size_t site, const ComplexMatrix &op) {
    const std::size_t d = dims[site];
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("apply_site_operator: operator dimension mismatch");
    std::size_t stride = 1;
    for (std::size_t f = dims.size(); f-- > site + 1;) stride *= dims[f];
    const std::size_t block = stride * d;
    CVec out(v.size(), cplx(0.0, 0.0));
    for (std::size_t base = 0; base < v.size(); base += block)
        for (std::size_t r = 0; r < stride; ++r)
            for (std::size_t a = 0; a < d; ++a) {
                cplx acc = 0.0;
                for (std::size_t b = 0; b < d; ++b) acc += op(a, b) * v[base + b * stride + r];
                out[base + a * stride + r] = acc;
            }
    return out;
}

}  // namespace detail

// The d-party totally antisymmetric state.
inline MultiState singlet_state(std::size_t d) {
    if (d < 2) throw std::invalid_argument("singlet_state: d must be at least 2");
    return pure_state(detail::singlet_vec(d), std::vector<std::size_t>(d, d));
}

// Product of singlets placed on the groups of p, factors in site order.
inline MultiState grouped_singlet_state(const GroupPartition &p, std::size_t n, std::size_t d) {
    require_divisible(n, d, "grouped_singlet_state");
    detail::validate_partition(p, n, d, "grouped_singlet_state");
    return pure_state(detail::grouped_singlet_vec(p, n, d), std::vector<std::size_t>(n, d));
}

// Uniform superposition over all groupings, each tagged by an orthonormal
// reference ket: (1/sqrt(G)) sum_i |grouped singlets_i> (x) |i>. Factor order:
// the n probes, then the reference register of dimension G.
inline MultiState reference_probe(std::size_t n, std::size_t d) {
    require_divisible(n, d, "reference_probe");
    const auto parts = group_partitions(n, d);
    const std::size_t g = parts.size();
    std::size_t dim = 1;
    for (std::size_t k = 0; k < n; ++k) dim *= d;
    CVec v(dim * g, cplx(0.0, 0.0));
    const double scale = 1.0 / std::sqrt(static_cast<double>(g));
    for (std::size_t i = 0; i < g; ++i) {
        const CVec gv = detail::grouped_singlet_vec(parts[i], n, d);
        for (std::size_t x = 0; x < dim; ++x)
            if (gv[x] != cplx(0.0, 0.0)) v[x * g + i] = scale * gv[x];
    }
    std::vector<std::size_t> dims(n, d);
    dims.push_back(g);
    return pure_state(v, dims);
}

namespace detail {

struct BuiltProbe {
    CVec vec;                        // probe amplitudes on active sites (+ reference)
    std::vector<std::size_t> dims;   // active-site dims (+ reference)
    std::size_t active;              // number of interrogations that carry signal
    std::size_t ref_dim;             // 1 when no reference register
};

inline BuiltProbe build_probe(const ProbeKind &probe, std::size_t n, std::size_t d) {
    BuiltProbe b;
    switch (probe.kind) {
        case ProbeKind::Kind::classical: {
            if (probe.inputs.size() != n)
                throw std::invalid_argument("output_state: classical input count differs from n");
            std::size_t dim = 1, idx = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (probe.inputs[k] >= d)
                    throw std::invalid_argument("output_state: classical input value out of range");
                dim *= d;
                idx = idx * d + probe.inputs[k];
            }
            b.vec.assign(dim, cplx(0.0, 0.0));
            b.vec[idx] = 1.0;
            b.dims.assign(n, d);
            b.active = n;
            b.ref_dim = 1;
            return b;
        }
        case ProbeKind::Kind::coherent: {
            MultiState s = coherent_probe(n, d);
            b.vec = s.low_rank->vectors[0];
            b.dims = s.dims;
            b.active = n;
            b.ref_dim = 1;
            return b;
        }
        case ProbeKind::Kind::singlet: {
            // pad down: only d*floor(n/d) probes carry singlets, the rest are ignored
            const std::size_t active = d * (n / d);
            if (active == 0) throw std::invalid_argument("output_state: n < d leaves no singlet group");
            GroupPartition part;
            if (probe.partition) {
                part = *probe.partition;
            } else {
                for (std::size_t g = 0; g < active / d; ++g) {
                    std::vector<std::size_t> grp(d);
                    for (std::size_t t = 0; t < d; ++t) grp[t] = g * d + t;
                    part.groups.push_back(std::move(grp));
                }
            }
            validate_partition(part, active, d, "output_state");
            b.vec = grouped_singlet_vec(part, active, d);
            b.dims.assign(active, d);
            b.active = active;
            b.ref_dim = 1;
            return b;
        }
        case ProbeKind::Kind::reference: {
            MultiState s = reference_probe(n, d);
            b.vec = s.low_rank->vectors[0];
            b.dims = s.dims;
            b.active = n;
            b.ref_dim = s.dims.back();
            if (b.ref_dim == 1) b.dims.pop_back();  // a single grouping needs no tag register
            return b;
        }
    }
    throw std::logic_error("output_state: unknown probe kind");
}

// dense channel pipeline: feed each active probe through the hypothesis
// process, then reorder the interleaved outputs to B-block, C-block, [R]
inline MultiState run_pipeline(const HypothesisSpec &spec, const ComplexMatrix &param,
                               const BuiltProbe &probe) {
    const std::size_t n = probe.active;
    const Channel chan = hypothesis_channel(spec, param);
    MultiState state = pure_state(probe.vec, probe.dims);
    for (std::size_t k = 0; k < n; ++k) state = apply_channel(chan, state, {2 * k});

    std::vector<std::size_t> order;
    order.reserve(state.dims.size());
    for (std::size_t k = 0; k < n; ++k) order.push_back(2 * k);
    for (std::size_t k = 0; k < n; ++k) order.push_back(2 * k + 1);
    if (probe.ref_dim > 1) order.push_back(2 * n);

    MultiState out;
    out.rho = permute_factors(state.rho, state.dims, order);
    out.dims = permuted_dims(state.dims, order);
    return out;
}

// exact ensemble form of the output: parameter applied to the probe vector on
// the effect block, maximally mixed on the other block
inline WeightedVectors analytic_low_rank(const HypothesisSpec &spec, const ComplexMatrix &param,
                                         const BuiltProbe &probe) {
    const std::size_t n = probe.active;
    CVec w = probe.vec;
    for (std::size_t k = 0; k < n; ++k) w = apply_site_operator(w, probe.dims, k, param);

    std::size_t dn = 1;
    for (std::size_t k = 0; k < n; ++k) dn *= spec.d;
    const std::size_t g = probe.ref_dim;

    WeightedVectors lr;
    lr.weights.assign(dn, 1.0 / static_cast<double>(dn));
    lr.vectors.reserve(dn);
    for (std::size_t mix = 0; mix < dn; ++mix) {
        CVec v(dn * dn * g, cplx(0.0, 0.0));
        for (std::size_t e = 0; e < dn; ++e)
            for (std::size_t r = 0; r < g; ++r) {
                const cplx amp = w[e * g + r];
                if (amp == cplx(0.0, 0.0)) continue;
                const std::size_t b = spec.slot == EffectSlot::first ? e : mix;
                const std::size_t c = spec.slot == EffectSlot::first ? mix : e;
                v[(b * dn + c) * g + r] = amp;
            }
        lr.vectors.push_back(std::move(v));
    }
    return lr;
}

}  // namespace detail

// Output state after n interrogations, factors in canonical order B_1..B_n,
// C_1..C_n, [R]. A fixed dependence parameter is honored when the spec carries
// one; otherwise several parameters are drawn from the dependence family (all
// d! permutations when that is cheap, three independent samples otherwise) and
// the outputs must agree pairwise within 1e-9 (the executable meaning of an
// unknown dependence), else the probe is rejected as non-invariant.
inline MultiState output_state(const HypothesisSpec &spec, const ProbeKind &probe, std::size_t n,
                               Rng rng = Rng(0)) {
    if (spec.d < 2) throw std::invalid_argument("output_state: d must be at least 2");
    if (n < 1) throw std::invalid_argument("output_state: n must be positive");
    const detail::BuiltProbe built = detail::build_probe(probe, n, spec.d);

    std::vector<ComplexMatrix> params;
    if (spec.parameter) {
        params.push_back(*spec.parameter);
    } else if (spec.family == DependenceFamily::permutation && spec.d <= 3) {
        std::vector<std::size_t> perm(spec.d);
        std::iota(perm.begin(), perm.end(), std::size_t(0));
        do {
            params.push_back(permutation_unitary(perm));
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        for (std::uint64_t s = 0; s < 3; ++s) {
            Rng sub = rng.fork(s);
            params.push_back(sample_dependence(spec, sub));
        }
    }

    std::vector<MultiState> outs;
    outs.reserve(params.size());
    for (const auto &p : params) outs.push_back(detail::run_pipeline(spec, p, built));
    for (std::size_t a = 0; a < outs.size(); ++a)
        for (std::size_t b = a + 1; b < outs.size(); ++b) {
            ComplexMatrix diff = outs[a].rho - outs[b].rho;
            if (diff.frobenius_norm() > 1e-9)
                throw std::invalid_argument(
                    "output_state: probe is not invariant under the unknown dependence");
        }

    MultiState result = std::move(outs.front());
    result.low_rank = detail::analytic_low_rank(spec, params.front(), built);
    return result;
}

// Exact joint distribution of the 2n classical outcome symbols (b-block then
// c-block, site 0 most significant within each block).
struct ClassicalDistribution {
    std::size_t d = 0, n = 0;
    std::vector<Rational> p;
};

// Classical strategy under an unknown permutation dependence: uniform mixture
// over all d! permutations of the deterministic effect slot, product-uniform
// on the other slot. All probabilities exact rationals.
inline ClassicalDistribution classical_output_distribution(const std::vector<std::size_t> &inputs,
                                                           const HypothesisSpec &spec) {
    if (spec.family != DependenceFamily::permutation)
        throw std::invalid_argument("classical_output_distribution: dependence must be permutation");
    if (spec.parameter)
        throw std::invalid_argument("classical_output_distribution: parameter must be absent");
    const std::size_t d = spec.d, n = inputs.size();
    if (n == 0) throw std::invalid_argument("classical_output_distribution: empty input list");
    for (std::size_t a : inputs)
        if (a >= d) throw std::invalid_argument("classical_output_distribution: input out of range");

    std::size_t dn = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (dn > (std::size_t(1) << 20) / d)
            throw std::invalid_argument("classical_output_distribution: outcome space too large");
        dn *= d;
    }

    ClassicalDistribution dist;
    dist.d = d;
    dist.n = n;
    dist.p.assign(dn * dn, Rational(0));

    std::int64_t dfact = 1;
    for (std::size_t k = 2; k <= d; ++k) dfact *= static_cast<std::int64_t>(k);
    const Rational weight(1, dfact * static_cast<std::int64_t>(dn));

    std::vector<std::size_t> perm(d);
    for (std::size_t i = 0; i < d; ++i) perm[i] = i;
    do {
        std::size_t effect = 0;
        for (std::size_t k = 0; k < n; ++k) effect = effect * d + perm[inputs[k]];
        for (std::size_t other = 0; other < dn; ++other) {
            const std::size_t idx =
                spec.slot == EffectSlot::first ? effect * dn + other : other * dn + effect;
            dist.p[idx] += weight;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return dist;
}

}  // namespace qcausal
