#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "complex_matrix.hpp"

namespace qcausal {

// Full spectral decomposition of a Hermitian matrix. Eigenvalues descending,
// eigenvectors in the columns of `vectors` (same order).
struct EigenDecomposition {
    std::vector<double> values;
    ComplexMatrix vectors;
};

namespace detail {

// Unitary reduction A = Q T' Q† to complex tridiagonal T' via Householder
// reflectors acting on trailing rows/columns, followed by a diagonal phase
// similarity making the tridiagonal real symmetric. On return d holds the
// diagonal, e the subdiagonal (e[k] between k and k+1, e[n-1] = 0), and, when
// z is non-null, *z the accumulated unitary with A = Z T Z†.
inline void householder_tridiag(ComplexMatrix a, std::vector<double> &d, std::vector<double> &e,
                                ComplexMatrix *z) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (n == 0) return;
    if (n == 1) {
        d[0] = a(0, 0).real();
        if (z) *z = ComplexMatrix::identity(1);
        return;
    }

    std::vector<CVec> vs(n);      // reflector vectors, vs[k] spans rows k+1..n-1
    std::vector<double> taus(n, 0.0);
    CVec f(n, cplx(0.0, 0.0));    // complex subdiagonal before phase removal

    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;  // length of the column tail
        double xnorm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) xnorm2 += std::norm(a(k + 1 + i, k));
        const double sigma = std::sqrt(xnorm2);
        if (sigma == 0.0) {
            f[k] = 0.0;
            continue;
        }
        const cplx alpha = a(k + 1, k);
        const double aal = std::abs(alpha);
        const cplx phase = aal > 0.0 ? alpha / aal : cplx(1.0, 0.0);
        const cplx beta = -phase * sigma;

        // the reflector is scale free, so build it from the column tail
        // divided by sigma; otherwise vnorm2 underflows on the denormal
        // residue left behind once the rank is exhausted and tau overflows
        CVec v(m);
        v[0] = alpha / sigma + phase;
        for (std::size_t i = 1; i < m; ++i) v[i] = a(k + 1 + i, k) / sigma;
        double vnorm2 = 0.0;
        for (const auto &x : v) vnorm2 += std::norm(x);
        const double tau = 2.0 / vnorm2;

        // Hermitian rank-2 update of the trailing block S <- H S H with
        // H = I - tau v v†:  p = tau S v,  q = p - (tau/2)(v†p) v,
        // S <- S - q v† - v q†.
        CVec p(m, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += a(k + 1 + i, k + 1 + j) * v[j];
            p[i] = tau * acc;
        }
        cplx vp = 0.0;
        for (std::size_t i = 0; i < m; ++i) vp += std::conj(v[i]) * p[i];
        const cplx kk = 0.5 * tau * vp;
        CVec q(m);
        for (std::size_t i = 0; i < m; ++i) q[i] = p[i] - kk * v[i];
        for (std::size_t i = 0; i < m; ++i) {
            const cplx qi = q[i], vi = v[i];
            for (std::size_t j = 0; j <= i; ++j) {
                const cplx val = a(k + 1 + i, k + 1 + j) - qi * std::conj(v[j]) - vi * std::conj(q[j]);
                a(k + 1 + i, k + 1 + j) = val;
                a(k + 1 + j, k + 1 + i) = std::conj(val);
            }
        }

        f[k] = beta;
        vs[k] = std::move(v);
        taus[k] = tau;
    }
    f[n - 2] = a(n - 1, n - 2);

    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();

    // Phase similarity: diag(theta)† T' diag(theta) is real with
    // theta[k+1] = theta[k] f[k]/|f[k]|.
    CVec theta(n, cplx(1.0, 0.0));
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double m = std::abs(f[k]);
        e[k] = m;
        theta[k + 1] = m > 0.0 ? theta[k] * (f[k] / m) : theta[k];
    }

    if (z) {
        ComplexMatrix zz = ComplexMatrix::identity(n);
        for (std::size_t kk2 = n - 2; kk2-- > 0;) {
            const std::size_t k = kk2;
            if (taus[k] == 0.0) continue;
            const CVec &v = vs[k];
            const std::size_t m = v.size();
            for (std::size_t c = 0; c < n; ++c) {
                cplx w = 0.0;
                for (std::size_t i = 0; i < m; ++i) w += std::conj(v[i]) * zz(k + 1 + i, c);
                w *= taus[k];
                for (std::size_t i = 0; i < m; ++i) zz(k + 1 + i, c) -= v[i] * w;
            }
        }
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) zz(r, c) *= theta[c];
        *z = std::move(zz);
    }
}

// Implicit-shift QL on a real symmetric tridiagonal. Rotations are optionally
// accumulated into the columns of *z. Off-diagonals below 1e-14 of the local
// scale count as converged.
inline void tridiag_ql(std::vector<double> &d, std::vector<double> &e, ComplexMatrix *z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    e[n - 1] = 0.0;
    // absolute negligibility floor; without it, zero diagonal neighbors (large
    // null spaces) leave the relative test unreachable
    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(d[i]) + std::abs(e[i]));
    const double floor_tol = 1e-14 * anorm;
    for (std::size_t l = 0; l < n; ++l) {
        std::size_t iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-14 * dd || std::abs(e[m]) <= floor_tol) break;
            }
            if (m != l) {
                if (iter++ == 64) throw std::runtime_error("hermitian_eig: QL did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t ii = m; ii-- > l;) {
                    const std::size_t i = ii;
                    double fv = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(fv, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = fv / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (std::size_t row = 0; row < z->rows(); ++row) {
                            const cplx t = (*z)(row, i + 1);
                            (*z)(row, i + 1) = s * (*z)(row, i) + c * t;
                            (*z)(row, i) = c * (*z)(row, i) - s * t;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

inline void check_hermitian_input(const ComplexMatrix &m, const char *who) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(who) + ": matrix not square");
    if (!is_hermitian(m))
        throw std::invalid_argument(std::string(who) + ": matrix not Hermitian");
}

}  // namespace detail

// Eigenvalues only, descending. Skips eigenvector accumulation, which is the
// dominant cost at large dimension.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix &m) {
    detail::check_hermitian_input(m, "hermitian_eigenvalues");
    std::vector<double> d, e;
    detail::householder_tridiag(m, d, e, nullptr);
    detail::tridiag_ql(d, e, nullptr);
    std::sort(d.begin(), d.end(), std::greater<double>());
    return d;
}

// Householder tridiagonalization + implicit-shift QL with accumulated
// transforms. Throws std::invalid_argument for non-Hermitian input.
inline EigenDecomposition hermitian_eig(const ComplexMatrix &m) {
    detail::check_hermitian_input(m, "hermitian_eig");
    const std::size_t n = m.rows();
    std::vector<double> d, e;
    ComplexMatrix z;
    detail::householder_tridiag(m, d, e, &z);
    detail::tridiag_ql(d, e, &z);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = z(i, order[j]);
    }
    return out;
}

}  // namespace qcausal
