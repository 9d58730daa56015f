#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace qcausal {

// Density matrix on a tensor product of factors. `low_rank`, when present, is
// an exact ensemble decomposition of rho kept alongside so discrimination can
// avoid ambient-dimension eigensolves.
struct MultiState {
    ComplexMatrix rho;
    std::vector<std::size_t> dims;
    std::optional<WeightedVectors> low_rank;

    std::size_t side() const {
        std::size_t s = 1;
        for (std::size_t d : dims) s *= d;
        return s;
    }
};

// Positivity is certified eagerly only up to this dimension; beyond it the
// eigensolve would dominate honest workloads, and callers certify explicitly
// where needed.
inline constexpr std::size_t kEagerPsdCheckLimit = 256;

inline MultiState make_state(ComplexMatrix rho, std::vector<std::size_t> dims) {
    const std::size_t side = detail::dims_product(dims);
    if (rho.rows() != side || rho.cols() != side)
        throw std::invalid_argument("make_state: dims do not match matrix size");
    if (!is_hermitian(rho)) throw std::invalid_argument("make_state: rho not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-10)
        throw std::invalid_argument("make_state: trace differs from one");
    if (side <= kEagerPsdCheckLimit && !is_positive_semidefinite(rho))
        throw std::invalid_argument("make_state: rho not positive semidefinite");
    return MultiState{std::move(rho), std::move(dims), std::nullopt};
}

inline MultiState pure_state(const CVec &vec, std::vector<std::size_t> dims) {
    if (vec.size() != detail::dims_product(dims))
        throw std::invalid_argument("pure_state: dims do not match vector length");
    if (std::abs(vec_norm(vec) - 1.0) > 1e-9)
        throw std::invalid_argument("pure_state: vector not normalized");
    MultiState s{outer(vec, vec), std::move(dims), WeightedVectors{{1.0}, {vec}}};
    return s;
}

// Kraus-form completely positive trace-preserving map between tensor spaces.
struct Channel {
    std::vector<ComplexMatrix> kraus;
    std::vector<std::size_t> in_dims, out_dims;

    std::size_t in_dim() const { return detail::dims_product(in_dims); }
    std::size_t out_dim() const { return detail::dims_product(out_dims); }
};

inline Channel make_channel(std::vector<ComplexMatrix> kraus, std::vector<std::size_t> in_dims,
                            std::vector<std::size_t> out_dims, double tol = 1e-10) {
    Channel c{std::move(kraus), std::move(in_dims), std::move(out_dims)};
    const std::size_t din = c.in_dim(), dout = c.out_dim();
    if (c.kraus.empty()) throw std::invalid_argument("make_channel: no Kraus operators");
    ComplexMatrix acc(din, din);
    for (const auto &k : c.kraus) {
        if (k.rows() != dout || k.cols() != din)
            throw std::invalid_argument("make_channel: Kraus operator shape mismatch");
        acc += k.dagger() * k;
    }
    acc -= ComplexMatrix::identity(din);
    if (acc.max_abs() > tol)
        throw std::invalid_argument("make_channel: Kraus operators not trace-preserving");
    return c;
}

inline Channel identity_channel(std::vector<std::size_t> dims) {
    const std::size_t d = detail::dims_product(dims);
    return Channel{{ComplexMatrix::identity(d)}, dims, dims};
}

inline Channel unitary_channel(const ComplexMatrix &u, std::vector<std::size_t> dims) {
    ComplexMatrix defect = u.dagger() * u - ComplexMatrix::identity(u.rows());
    if (u.rows() != u.cols() || defect.max_abs() > 1e-9)
        throw std::invalid_argument("unitary_channel: matrix not unitary");
    if (u.rows() != detail::dims_product(dims))
        throw std::invalid_argument("unitary_channel: dims mismatch");
    return Channel{{u}, dims, dims};
}

inline Channel unitary_channel(const ComplexMatrix &u) {
    return unitary_channel(u, {u.rows()});
}

// Complete discard: every input goes to the maximally mixed state.
inline Channel depolarizing_channel(std::size_t d) {
    if (d == 0) throw std::invalid_argument("depolarizing_channel: dimension must be positive");
    const double w = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<ComplexMatrix> ks;
    ks.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            ComplexMatrix k(d, d);
            k(i, j) = w;
            ks.push_back(std::move(k));
        }
    return make_channel(std::move(ks), {d}, {d});
}

// `second` after `first`; Kraus set is all pairwise products.
inline Channel compose(const Channel &second, const Channel &first) {
    if (first.out_dim() != second.in_dim())
        throw std::invalid_argument("compose: intermediate dimensions differ");
    std::vector<ComplexMatrix> ks;
    ks.reserve(first.kraus.size() * second.kraus.size());
    for (const auto &b : second.kraus)
        for (const auto &a : first.kraus) ks.push_back(b * a);
    return Channel{std::move(ks), first.in_dims, second.out_dims};
}

// Direct action on a (not necessarily normalized) operator.
inline ComplexMatrix channel_apply_matrix(const Channel &c, const ComplexMatrix &m) {
    if (m.rows() != c.in_dim() || m.cols() != c.in_dim())
        throw std::invalid_argument("channel_apply_matrix: operand dimension mismatch");
    ComplexMatrix out(c.out_dim(), c.out_dim());
    for (const auto &k : c.kraus) out += k * m * k.dagger();
    return out;
}

// Choi operator with the input factor first and left unnormalized:
// J = sum_ij |i><j| (x) C(|i><j|), so tr_out J = I_in for a TP map.
inline ComplexMatrix choi_of(const Channel &c) {
    const std::size_t din = c.in_dim(), dout = c.out_dim();
    ComplexMatrix j(din * dout, din * dout);
    for (const auto &k : c.kraus) {
        CVec v(din * dout);
        for (std::size_t i = 0; i < din; ++i)
            for (std::size_t o = 0; o < dout; ++o) v[i * dout + o] = k(o, i);
        for (std::size_t r = 0; r < v.size(); ++r) {
            if (v[r] == cplx(0.0, 0.0)) continue;
            for (std::size_t cc = 0; cc < v.size(); ++cc) j(r, cc) += v[r] * std::conj(v[cc]);
        }
    }
    return j;
}

// Positive semidefinite and trace-preserving test for a Choi operator in the
// input-first convention.
inline bool is_cptp(const ComplexMatrix &j, std::size_t din, std::size_t dout, double tol = 1e-9) {
    if (j.rows() != din * dout || j.cols() != j.rows()) return false;
    if (!is_hermitian(j, tol)) return false;
    if (!is_positive_semidefinite(j, tol)) return false;
    ComplexMatrix marg = partial_trace(j, {din, dout}, {0});
    marg -= ComplexMatrix::identity(din);
    return marg.max_abs() <= tol * static_cast<double>(dout);
}

// Kraus operators from a Choi operator via its eigendecomposition.
inline Channel channel_from_choi(const ComplexMatrix &j, std::vector<std::size_t> in_dims,
                                 std::vector<std::size_t> out_dims, double tol = 1e-9) {
    const std::size_t din = detail::dims_product(in_dims);
    const std::size_t dout = detail::dims_product(out_dims);
    if (!is_cptp(j, din, dout, tol))
        throw std::invalid_argument("channel_from_choi: operator is not a CPTP Choi matrix");
    const auto eig = hermitian_eig(j);
    const double cutoff = 1e-12 * std::max(1.0, eig.values.empty() ? 0.0 : eig.values.front());
    std::vector<ComplexMatrix> ks;
    for (std::size_t a = 0; a < eig.values.size(); ++a) {
        if (eig.values[a] <= cutoff) continue;
        const double w = std::sqrt(eig.values[a]);
        ComplexMatrix k(dout, din);
        for (std::size_t i = 0; i < din; ++i)
            for (std::size_t o = 0; o < dout; ++o) k(o, i) = w * eig.vectors(i * dout + o, a);
        ks.push_back(std::move(k));
    }
    return make_channel(std::move(ks), std::move(in_dims), std::move(out_dims), tol);
}

// Apply a channel to the listed factors (strictly increasing positions) of a
// composite state. The channel's output factors are spliced in at the position
// of the first consumed factor; all untouched factors keep their relative
// order. The identity channel therefore returns the state unchanged.
inline MultiState apply_channel(const Channel &c, const MultiState &s,
                                const std::vector<std::size_t> &factors) {
    const std::size_t nf = s.dims.size();
    if (factors.empty()) throw std::invalid_argument("apply_channel: no target factors");
    if (factors.size() != c.in_dims.size())
        throw std::invalid_argument("apply_channel: factor count differs from channel arity");
    for (std::size_t t = 0; t < factors.size(); ++t) {
        if (factors[t] >= nf) throw std::invalid_argument("apply_channel: factor index out of range");
        if (t > 0 && factors[t] <= factors[t - 1])
            throw std::invalid_argument("apply_channel: factors must be strictly increasing");
        if (s.dims[factors[t]] != c.in_dims[t])
            throw std::invalid_argument("apply_channel: factor dimension mismatch");
    }

    std::vector<bool> selected(nf, false);
    for (std::size_t f : factors) selected[f] = true;
    std::vector<std::size_t> rest;
    for (std::size_t f = 0; f < nf; ++f)
        if (!selected[f]) rest.push_back(f);

    // bring consumed factors to the front
    std::vector<std::size_t> front_order = factors;
    front_order.insert(front_order.end(), rest.begin(), rest.end());
    const ComplexMatrix rho_f = permute_factors(s.rho, s.dims, front_order);

    const std::size_t din = c.in_dim(), dout = c.out_dim();
    const std::size_t side = s.side();
    const std::size_t rdim = side / din;
    const std::size_t out_side = dout * rdim;

    ComplexMatrix out(out_side, out_side);
    for (const auto &k : c.kraus) {
        ComplexMatrix t(out_side, side);
        for (std::size_t o = 0; o < dout; ++o)
            for (std::size_t i = 0; i < din; ++i) {
                const cplx kv = k(o, i);
                if (kv == cplx(0.0, 0.0)) continue;
                for (std::size_t r = 0; r < rdim; ++r)
                    for (std::size_t col = 0; col < side; ++col)
                        t(o * rdim + r, col) += kv * rho_f(i * rdim + r, col);
            }
        for (std::size_t o = 0; o < dout; ++o)
            for (std::size_t i = 0; i < din; ++i) {
                const cplx kv = std::conj(k(o, i));
                if (kv == cplx(0.0, 0.0)) continue;
                for (std::size_t row = 0; row < out_side; ++row)
                    for (std::size_t r = 0; r < rdim; ++r)
                        out(row, o * rdim + r) += t(row, i * rdim + r) * kv;
            }
    }

    // front layout: out factors, then the untouched ones in original order
    std::vector<std::size_t> dims_front = c.out_dims;
    for (std::size_t f : rest) dims_front.push_back(s.dims[f]);

    // splice the out factors back at the position of the first consumed factor
    std::vector<std::size_t> final_order;
    std::vector<std::size_t> final_dims;
    std::size_t rest_rank = 0;
    for (std::size_t p = 0; p < nf; ++p) {
        if (p == factors.front()) {
            for (std::size_t o = 0; o < c.out_dims.size(); ++o) {
                final_order.push_back(o);
                final_dims.push_back(c.out_dims[o]);
            }
        }
        if (selected[p]) continue;
        final_order.push_back(c.out_dims.size() + rest_rank);
        final_dims.push_back(s.dims[p]);
        ++rest_rank;
    }

    ComplexMatrix rho_out = permute_factors(out, dims_front, final_order);
    return make_state(std::move(rho_out), std::move(final_dims));
}

// Haar-distributed unitary from QR of a Ginibre sample (Gram-Schmidt keeps the
// R diagonal positive, which is exactly the unbiased convention).
inline ComplexMatrix haar_unitary(std::size_t d, Rng &rng) {
    if (d == 0) throw std::invalid_argument("haar_unitary: dimension must be positive");
    std::vector<CVec> cols(d, CVec(d));
    for (auto &col : cols)
        for (auto &x : col) x = cplx(rng.gaussian(), rng.gaussian());
    std::vector<CVec> q;
    for (auto &col : cols) {
        CVec v = col;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto &b : q) {
                const cplx ov = vdot(b, v);
                for (std::size_t i = 0; i < d; ++i) v[i] -= ov * b[i];
            }
        const double nrm = vec_norm(v);
        if (nrm < 1e-12) throw std::runtime_error("haar_unitary: degenerate sample");
        for (auto &x : v) x /= nrm;
        q.push_back(std::move(v));
    }
    ComplexMatrix u(d, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) u(i, j) = q[j][i];
    return u;
}

inline std::vector<std::size_t> random_permutation(std::size_t d, Rng &rng) {
    std::vector<std::size_t> p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = i;
    for (std::size_t i = d; i-- > 1;) std::swap(p[i], p[rng.uniform_int(i + 1)]);
    return p;
}

// |i> -> |perm[i]>
inline ComplexMatrix permutation_unitary(const std::vector<std::size_t> &perm) {
    const std::size_t d = perm.size();
    std::vector<bool> seen(d, false);
    ComplexMatrix u(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        if (perm[i] >= d || seen[perm[i]])
            throw std::invalid_argument("permutation_unitary: not a permutation");
        seen[perm[i]] = true;
        u(perm[i], i) = 1.0;
    }
    return u;
}

enum class EffectSlot { first, second };
enum class DependenceFamily { permutation, unitary };

// One causal hypothesis: a single-use process taking one probe of dimension d
// to two output factors, acting by the dependence parameter on `slot` and
// discarding into the maximally mixed state on the other.
struct HypothesisSpec {
    std::size_t d = 2;
    EffectSlot slot = EffectSlot::first;
    DependenceFamily family = DependenceFamily::unitary;
    // fixed dependence parameter; when absent, operations that need one sample
    // it and must certify the result does not depend on the draw
    std::optional<ComplexMatrix> parameter;
};

inline ComplexMatrix sample_dependence(const HypothesisSpec &h, Rng &rng) {
    if (h.family == DependenceFamily::unitary) return haar_unitary(h.d, rng);
    return permutation_unitary(random_permutation(h.d, rng));
}

// The d^2 Kraus operators of the hypothesis process: the parameter acting into
// the effect slot tensored with a depolarizing discard into the other slot.
inline Channel hypothesis_channel(const HypothesisSpec &h, const ComplexMatrix &param) {
    const std::size_t d = h.d;
    if (param.rows() != d || param.cols() != d)
        throw std::invalid_argument("hypothesis_channel: parameter dimension mismatch");
    ComplexMatrix defect = param.dagger() * param - ComplexMatrix::identity(d);
    if (defect.max_abs() > 1e-9)
        throw std::invalid_argument("hypothesis_channel: parameter not unitary");
    const double w = 1.0 / static_cast<double>(d);
    std::vector<ComplexMatrix> ks;
    ks.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            ComplexMatrix k(d * d, d);
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) {
                    if (h.slot == EffectSlot::first)
                        k(b * d + i, a) = w * param(b, a);
                    else
                        k(i * d + b, a) = w * param(b, a);
                }
            ks.push_back(std::move(k));
        }
    return make_channel(std::move(ks), {d}, {d, d});
}

// Effective process A -> B obtained by feeding `aux` into the second input of
// a bipartite channel and discarding the second output. Rebuilt from its Choi
// operator, which is certified CPTP first.
inline Channel reduced_process(const Channel &c, const ComplexMatrix &aux) {
    if (c.in_dims.size() != 2 || c.out_dims.size() != 2)
        throw std::invalid_argument("reduced_process: channel must be bipartite in and out");
    const std::size_t da = c.in_dims[0], da2 = c.in_dims[1];
    const std::size_t db = c.out_dims[0], db2 = c.out_dims[1];
    if (aux.rows() != da2 || aux.cols() != da2)
        throw std::invalid_argument("reduced_process: aux state dimension mismatch");
    if (!is_hermitian(aux) || std::abs(aux.trace() - cplx(1.0, 0.0)) > 1e-9 ||
        !is_positive_semidefinite(aux))
        throw std::invalid_argument("reduced_process: aux is not a state");

    ComplexMatrix j(da * db, da * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t jj = 0; jj < da; ++jj) {
            ComplexMatrix e(da, da);
            e(i, jj) = 1.0;
            const ComplexMatrix x = channel_apply_matrix(c, kron(e, aux));
            const ComplexMatrix y = partial_trace(x, {db, db2}, {0});
            for (std::size_t o = 0; o < db; ++o)
                for (std::size_t o2 = 0; o2 < db; ++o2) j(i * db + o, jj * db + o2) = y(o, o2);
        }
    if (!is_cptp(j, da, db))
        throw std::invalid_argument("reduced_process: reduced map is not CPTP");
    return channel_from_choi(j, {da}, {db});
}

// Whether the channel sends every input to the same output state.
inline bool is_constant(const Channel &c, double tol = 1e-9) {
    const std::size_t din = c.in_dim();
    ComplexMatrix mixed(din, din);
    for (std::size_t i = 0; i < din; ++i) mixed(i, i) = 1.0 / static_cast<double>(din);
    const ComplexMatrix ref = channel_apply_matrix(c, mixed);

    double dev = 0.0;
    auto check = [&](const ComplexMatrix &st) {
        ComplexMatrix diff = channel_apply_matrix(c, st) - ref;
        dev = std::max(dev, diff.frobenius_norm());
    };
    // a Hermitian-spanning family of pure states
    for (std::size_t i = 0; i < din; ++i) {
        ComplexMatrix e(din, din);
        e(i, i) = 1.0;
        check(e);
    }
    for (std::size_t i = 0; i < din; ++i)
        for (std::size_t jj = i + 1; jj < din; ++jj) {
            CVec plus(din, cplx(0.0, 0.0)), plusi(din, cplx(0.0, 0.0));
            plus[i] = plus[jj] = 1.0 / std::sqrt(2.0);
            plusi[i] = 1.0 / std::sqrt(2.0);
            plusi[jj] = cplx(0.0, 1.0 / std::sqrt(2.0));
            check(outer(plus, plus));
            check(outer(plusi, plusi));
        }
    return dev <= tol;
}

enum class Reversibility { neither, faithful, reversible };

// Classify a candidate recovery r for channel c: faithful when r undoes c on
// its input space (r after c is the identity), reversible when additionally c
// undoes r on the output space.
inline Reversibility verify_reversible(const Channel &c, const Channel &r, double tol = 1e-9) {
    if (c.out_dim() != r.in_dim() || r.out_dim() != c.in_dim())
        throw std::invalid_argument("verify_reversible: dimensions not composable");
    const ComplexMatrix rc = choi_of(compose(r, c));
    const ComplexMatrix cr = choi_of(compose(c, r));
    const ComplexMatrix id_in = choi_of(identity_channel({c.in_dim()}));
    const ComplexMatrix id_out = choi_of(identity_channel({c.out_dim()}));
    const bool faithful = (rc - id_in).max_abs() <= tol * static_cast<double>(c.in_dim());
    const bool back = (cr - id_out).max_abs() <= tol * static_cast<double>(c.out_dim());
    if (faithful && back) return Reversibility::reversible;
    if (faithful) return Reversibility::faithful;
    return Reversibility::neither;
}

}  // namespace qcausal
