#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "complex_matrix.hpp"
#include "hermitian_eig.hpp"

namespace qcausal {

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

namespace detail {

inline std::size_t dims_product(const std::vector<std::size_t> &dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("tensor factor of dimension zero");
        if (p > (std::size_t(1) << 40) / d) throw std::invalid_argument("tensor space too large");
        p *= d;
    }
    return p;
}

inline std::vector<std::size_t> factor_strides(const std::vector<std::size_t> &dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t f = dims.size(); f-- > 1;) s[f - 1] = s[f] * dims[f];
    return s;
}

}  // namespace detail

// Trace out all factors not listed in `keep`. `dims` are the tensor factor
// dimensions of the square matrix m (row-major flattening, leftmost factor is
// most significant); `keep` must be strictly increasing. The kept factors
// retain their relative order.
inline ComplexMatrix partial_trace(const ComplexMatrix &m, const std::vector<std::size_t> &dims,
                                   const std::vector<std::size_t> &keep) {
    const std::size_t side = detail::dims_product(dims);
    if (m.rows() != side || m.cols() != side)
        throw std::invalid_argument("partial_trace: dims do not match matrix size");
    for (std::size_t k = 0; k < keep.size(); ++k) {
        if (keep[k] >= dims.size()) throw std::invalid_argument("partial_trace: keep index out of range");
        if (k > 0 && keep[k] <= keep[k - 1])
            throw std::invalid_argument("partial_trace: keep must be strictly increasing");
    }

    std::vector<bool> kept(dims.size(), false);
    for (std::size_t f : keep) kept[f] = true;
    const auto strides = detail::factor_strides(dims);

    std::size_t dkeep = 1, dtr = 1;
    for (std::size_t f = 0; f < dims.size(); ++f) (kept[f] ? dkeep : dtr) *= dims[f];

    // flat offsets contributed by the kept block and by the traced block
    std::vector<std::size_t> off_keep(dkeep, 0), off_tr(dtr, 0);
    {
        std::size_t nk = 1, nt = 1;
        for (std::size_t f = 0; f < dims.size(); ++f) {
            const std::size_t d = dims[f], st = strides[f];
            if (kept[f]) {
                for (std::size_t idx = nk * d; idx-- > 0;)
                    off_keep[idx] = off_keep[idx / d] + (idx % d) * st;
                nk *= d;
            } else {
                for (std::size_t idx = nt * d; idx-- > 0;)
                    off_tr[idx] = off_tr[idx / d] + (idx % d) * st;
                nt *= d;
            }
        }
    }

    ComplexMatrix out(dkeep, dkeep);
    for (std::size_t r = 0; r < dkeep; ++r)
        for (std::size_t c = 0; c < dkeep; ++c) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < dtr; ++t) acc += m(off_keep[r] + off_tr[t], off_keep[c] + off_tr[t]);
            out(r, c) = acc;
        }
    return out;
}

inline std::vector<std::size_t> permuted_dims(const std::vector<std::size_t> &dims,
                                              const std::vector<std::size_t> &new_order) {
    if (new_order.size() != dims.size())
        throw std::invalid_argument("permuted_dims: order length mismatch");
    std::vector<bool> seen(dims.size(), false);
    std::vector<std::size_t> out(dims.size());
    for (std::size_t j = 0; j < new_order.size(); ++j) {
        const std::size_t f = new_order[j];
        if (f >= dims.size() || seen[f]) throw std::invalid_argument("permuted_dims: not a permutation");
        seen[f] = true;
        out[j] = dims[f];
    }
    return out;
}

namespace detail {

// old flat index -> new flat index when factor j of the result is factor
// new_order[j] of the input
inline std::vector<std::size_t> permutation_index_map(const std::vector<std::size_t> &dims,
                                                      const std::vector<std::size_t> &new_order) {
    const std::size_t side = dims_product(dims);
    const auto new_dims = permuted_dims(dims, new_order);
    const auto old_strides = factor_strides(dims);
    const auto new_strides = factor_strides(new_dims);
    // new stride attributed back to the old factor position
    std::vector<std::size_t> stride_of_old(dims.size());
    for (std::size_t j = 0; j < new_order.size(); ++j) stride_of_old[new_order[j]] = new_strides[j];

    std::vector<std::size_t> map(side, 0);
    for (std::size_t flat = 0; flat < side; ++flat) {
        std::size_t rem = flat, tgt = 0;
        for (std::size_t f = 0; f < dims.size(); ++f) {
            const std::size_t digit = rem / old_strides[f];
            rem -= digit * old_strides[f];
            tgt += digit * stride_of_old[f];
        }
        map[flat] = tgt;
    }
    return map;
}

}  // namespace detail

// Relabel tensor factors of a square matrix: factor j of the result is factor
// new_order[j] of the input.
inline ComplexMatrix permute_factors(const ComplexMatrix &m, const std::vector<std::size_t> &dims,
                                     const std::vector<std::size_t> &new_order) {
    const std::size_t side = detail::dims_product(dims);
    if (m.rows() != side || m.cols() != side)
        throw std::invalid_argument("permute_factors: dims do not match matrix size");
    const auto map = detail::permutation_index_map(dims, new_order);
    ComplexMatrix out(side, side);
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c) out(map[r], map[c]) = m(r, c);
    return out;
}

inline CVec permute_factors_vec(const CVec &v, const std::vector<std::size_t> &dims,
                                const std::vector<std::size_t> &new_order) {
    const std::size_t side = detail::dims_product(dims);
    if (v.size() != side) throw std::invalid_argument("permute_factors_vec: dims mismatch");
    const auto map = detail::permutation_index_map(dims, new_order);
    CVec out(side);
    for (std::size_t k = 0; k < side; ++k) out[map[k]] = v[k];
    return out;
}

// Schatten-1 norm of a Hermitian matrix, via eigenvalues only.
inline double trace_norm(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("trace_norm: matrix not square");
    if (!is_hermitian(m)) throw std::invalid_argument("trace_norm: matrix not Hermitian");
    double s = 0.0;
    for (double l : hermitian_eigenvalues(m)) s += std::abs(l);
    return s;
}

// Ensemble form sum_i w_i |v_i><v_i| with w_i >= 0; the v_i need not be
// normalized or orthogonal.
struct WeightedVectors {
    std::vector<double> weights;
    std::vector<CVec> vectors;
};

// ||A - B||_1 for A, B given as weighted vector ensembles, computed inside the
// joint span: orthonormalize the combined vectors, project both operators onto
// that basis and diagonalize there. Exact (up to rounding) at cost cubic in
// the total rank instead of the ambient dimension.
inline double low_rank_trace_norm(const WeightedVectors &a, const WeightedVectors &b) {
    auto validate = [](const WeightedVectors &w, const char *who) {
        if (w.weights.size() != w.vectors.size())
            throw std::invalid_argument(std::string(who) + ": weight/vector count mismatch");
        for (double x : w.weights)
            if (x < 0.0) throw std::invalid_argument(std::string(who) + ": negative weight");
    };
    validate(a, "low_rank_trace_norm(a)");
    validate(b, "low_rank_trace_norm(b)");
    std::size_t ambient = 0;
    for (const auto *w : {&a, &b})
        for (const auto &v : w->vectors) {
            if (ambient == 0) ambient = v.size();
            if (v.size() != ambient)
                throw std::invalid_argument("low_rank_trace_norm: ambient dimension mismatch");
        }
    if (ambient == 0) return 0.0;

    // modified Gram-Schmidt with a second pass; near-dependent vectors drop out
    std::vector<CVec> basis;
    auto add_to_basis = [&](const CVec &v) {
        CVec c = v;
        const double orig = vec_norm(c);
        if (orig == 0.0) return;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto &q : basis) {
                const cplx ov = vdot(q, c);
                for (std::size_t k = 0; k < c.size(); ++k) c[k] -= ov * q[k];
            }
        const double rn = vec_norm(c);
        if (rn > 1e-12 * orig) {
            for (auto &x : c) x /= rn;
            basis.push_back(std::move(c));
        }
    };
    for (const auto &v : a.vectors) add_to_basis(v);
    for (const auto &v : b.vectors) add_to_basis(v);

    const std::size_t r = basis.size();
    if (r == 0) return 0.0;
    ComplexMatrix g(r, r);
    auto accumulate = [&](const WeightedVectors &w, double sign) {
        for (std::size_t i = 0; i < w.vectors.size(); ++i) {
            CVec coef(r);
            for (std::size_t q = 0; q < r; ++q) coef[q] = vdot(basis[q], w.vectors[i]);
            const double wi = sign * w.weights[i];
            for (std::size_t p = 0; p < r; ++p)
                for (std::size_t q = 0; q < r; ++q) g(p, q) += wi * coef[p] * std::conj(coef[q]);
        }
    };
    accumulate(a, 1.0);
    accumulate(b, -1.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j) {
            const cplx sym = 0.5 * (g(i, j) + std::conj(g(j, i)));
            g(i, j) = sym;
            g(j, i) = std::conj(sym);
        }

    double s = 0.0;
    for (double l : hermitian_eigenvalues(g)) s += std::abs(l);
    return s;
}

inline bool is_positive_semidefinite(const ComplexMatrix &m, double tol = 1e-10) {
    const auto ev = hermitian_eigenvalues(m);
    if (ev.empty()) return true;
    return ev.back() >= -tol * (1.0 + std::abs(ev.front()));
}

// Principal square root of a positive semidefinite matrix. Eigenvalues in
// [-tol, 0) are clamped to zero; anything more negative is rejected.
inline ComplexMatrix sqrt_psd(const ComplexMatrix &m, double tol = 1e-10) {
    auto eig = hermitian_eig(m);
    const double scale = eig.values.empty() ? 0.0 : std::abs(eig.values.front());
    const std::size_t n = m.rows();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double l = eig.values[k];
        if (l < -tol * (1.0 + scale)) throw std::invalid_argument("sqrt_psd: matrix not PSD");
        if (l < 0.0) l = 0.0;
        const double rl = std::sqrt(l);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = rl * eig.vectors(i, k);
            if (vi == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * std::conj(eig.vectors(j, k));
        }
    }
    return out;
}

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 between density
// matrices. Squared convention: two identical pure states give 1, orthogonal
// ones give 0.
inline double state_fidelity(const ComplexMatrix &rho, const ComplexMatrix &sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("state_fidelity: shape mismatch");
    if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-8 ||
        std::abs(sigma.trace() - cplx(1.0, 0.0)) > 1e-8)
        throw std::invalid_argument("state_fidelity: states must have unit trace");
    const ComplexMatrix root = sqrt_psd(rho);
    ComplexMatrix inner = root * sigma * root;
    for (std::size_t i = 0; i < inner.rows(); ++i)
        for (std::size_t j = i; j < inner.cols(); ++j) {
            const cplx sym = 0.5 * (inner(i, j) + std::conj(inner(j, i)));
            inner(i, j) = sym;
            inner(j, i) = std::conj(sym);
        }
    double t = 0.0;
    for (double l : hermitian_eigenvalues(inner)) t += std::sqrt(std::max(l, 0.0));
    return t * t;
}

}  // namespace qcausal
