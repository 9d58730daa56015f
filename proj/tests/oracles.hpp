#pragma once

// Reference implementations kept deliberately independent of the library's
// algorithms: plain index arithmetic and textbook recursions only. Anything
// the library computes cleverly is re-derived here the slow way.

#include <cstddef>
#include <map>
#include <vector>

#include "qcausal/combinat.hpp"
#include "qcausal/complex_matrix.hpp"
#include "qcausal/hermitian_eig.hpp"

namespace oracles {

using qcausal::BigInt;
using qcausal::ComplexMatrix;
using qcausal::cplx;

inline ComplexMatrix kron_oracle(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i1 = 0; i1 < a.rows(); ++i1)
        for (std::size_t j1 = 0; j1 < a.cols(); ++j1)
            for (std::size_t i2 = 0; i2 < b.rows(); ++i2)
                for (std::size_t j2 = 0; j2 < b.cols(); ++j2)
                    c(i1 * b.rows() + i2, j1 * b.cols() + j2) = a(i1, j1) * b(i2, j2);
    return c;
}

// partial trace by brute-force digit decomposition of every index pair
inline ComplexMatrix partial_trace_oracle(const ComplexMatrix &m,
                                          const std::vector<std::size_t> &dims,
                                          const std::vector<std::size_t> &keep) {
    const std::size_t nf = dims.size();
    std::vector<bool> kept(nf, false);
    for (std::size_t k : keep) kept[k] = true;

    std::size_t keep_dim = 1, tr_dim = 1, full = 1;
    for (std::size_t f = 0; f < nf; ++f) {
        full *= dims[f];
        (kept[f] ? keep_dim : tr_dim) *= dims[f];
    }

    auto digits = [&](std::size_t idx) {
        std::vector<std::size_t> dg(nf);
        for (std::size_t f = nf; f-- > 0;) {
            dg[f] = idx % dims[f];
            idx /= dims[f];
        }
        return dg;
    };
    auto keep_index = [&](const std::vector<std::size_t> &dg) {
        std::size_t idx = 0;
        for (std::size_t f = 0; f < nf; ++f)
            if (kept[f]) idx = idx * dims[f] + dg[f];
        return idx;
    };

    ComplexMatrix out(keep_dim, keep_dim);
    for (std::size_t r = 0; r < full; ++r) {
        const auto dr = digits(r);
        for (std::size_t c = 0; c < full; ++c) {
            const auto dc = digits(c);
            bool diag = true;
            for (std::size_t f = 0; f < nf; ++f)
                if (!kept[f] && dr[f] != dc[f]) diag = false;
            if (diag) out(keep_index(dr), keep_index(dc)) += m(r, c);
        }
    }
    (void)tr_dim;
    return out;
}

// Standard-tableaux count of the d-row rectangular shape with n boxes, by
// growing the diagram one box at a time. Independent of any product formula.
inline BigInt syt_rectangle_oracle(std::size_t n, std::size_t d) {
    const std::size_t w = n / d;
    std::map<std::vector<std::size_t>, BigInt> f;
    f[std::vector<std::size_t>(d, 0)] = 1;
    for (std::size_t box = 0; box < n; ++box) {
        std::map<std::vector<std::size_t>, BigInt> nx;
        for (const auto &[shape, cnt] : f)
            for (std::size_t row = 0; row < d; ++row) {
                if (shape[row] >= w) continue;
                if (row > 0 && shape[row] >= shape[row - 1]) continue;
                auto grown = shape;
                ++grown[row];
                nx[grown] += cnt;
            }
        f.swap(nx);
    }
    const auto it = f.find(std::vector<std::size_t>(d, w));
    return it == f.end() ? BigInt(0) : it->second;
}

// SRM success for equal-prior pure states straight from the Gram matrix:
// (1/k) sum_i ((G^1/2)_ii)^2.
inline double srm_success_from_gram(const ComplexMatrix &gram) {
    const std::size_t k = gram.rows();
    const auto eig = qcausal::hermitian_eig(gram);
    double success = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        cplx diag = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            const double lam = eig.values[a] > 0.0 ? eig.values[a] : 0.0;
            diag += std::sqrt(lam) * eig.vectors(i, a) * std::conj(eig.vectors(i, a));
        }
        success += std::norm(diag);
    }
    return success / static_cast<double>(k);
}

}  // namespace oracles
