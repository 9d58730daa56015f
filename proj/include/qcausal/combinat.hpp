#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hermitian_eig.hpp"

namespace qcausal {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial_big(std::size_t n) {
    BigInt f = 1;
    for (std::size_t k = 2; k <= n; ++k) f *= k;
    return f;
}

inline void require_divisible(std::size_t n, std::size_t d, const char *who) {
    if (d < 2) throw std::invalid_argument(std::string(who) + ": d must be at least 2");
    if (n == 0 || n % d != 0)
        throw std::invalid_argument(std::string(who) + ": n must be a positive multiple of d");
}

// Number of copies of the trivial representation in the n-fold collective
// action of the d-dimensional unitary group: exact product form
// n! * prod_{i=1..d} (d-i)! / (n/d + d - i)!.
// At d = 2 these are the Catalan numbers C(n/2).
inline BigInt multiplicity(std::size_t n, std::size_t d) {
    require_divisible(n, d, "multiplicity");
    BigInt num = factorial_big(n);
    BigInt den = 1;
    for (std::size_t i = 1; i <= d; ++i) {
        num *= factorial_big(d - i);
        den *= factorial_big(n / d + d - i);
    }
    if (num % den != 0) throw std::logic_error("multiplicity: non-integer result");
    return num / den;
}

// log2 of the same count, safe far beyond what fits in a double.
inline double multiplicity_log2(std::size_t n, std::size_t d) {
    require_divisible(n, d, "multiplicity_log2");
    double s = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::size_t i = 1; i <= d; ++i) {
        s += std::lgamma(static_cast<double>(d - i) + 1.0);
        s -= std::lgamma(static_cast<double>(n / d + d - i) + 1.0);
    }
    return s / std::log(2.0);
}

// Partition of sites {0..n-1} into unordered groups of size d, canonical form:
// each group ascending, groups ordered by first element.
struct GroupPartition {
    std::vector<std::vector<std::size_t>> groups;
};

inline BigInt group_partition_count(std::size_t n, std::size_t d) {
    require_divisible(n, d, "group_partition_count");
    BigInt c = factorial_big(n) / (factorial_big(n / d) );
    BigInt q = factorial_big(d);
    BigInt qq = 1;
    for (std::size_t g = 0; g < n / d; ++g) qq *= q;
    if (c % qq != 0) throw std::logic_error("group_partition_count: non-integer result");
    return c / qq;
}

namespace detail {

inline void enumerate_partitions(std::vector<bool> &used, std::vector<std::vector<std::size_t>> &acc,
                                 std::size_t d, std::vector<GroupPartition> &out) {
    const std::size_t n = used.size();
    std::size_t anchor = n;
    for (std::size_t i = 0; i < n; ++i)
        if (!used[i]) {
            anchor = i;
            break;
        }
    if (anchor == n) {
        out.push_back(GroupPartition{acc});
        return;
    }
    used[anchor] = true;
    std::vector<std::size_t> free;
    for (std::size_t i = anchor + 1; i < n; ++i)
        if (!used[i]) free.push_back(i);
    // choose d-1 partners for the anchor, in lexicographic order
    std::vector<std::size_t> pick(d - 1);
    auto rec = [&](auto &&self, std::size_t start, std::size_t depth) -> void {
        if (depth == d - 1) {
            std::vector<std::size_t> group{anchor};
            group.insert(group.end(), pick.begin(), pick.end());
            for (std::size_t p : pick) used[p] = true;
            acc.push_back(group);
            enumerate_partitions(used, acc, d, out);
            acc.pop_back();
            for (std::size_t p : pick) used[p] = false;
            return;
        }
        for (std::size_t k = start; k < free.size(); ++k) {
            pick[depth] = free[k];
            self(self, k + 1, depth + 1);
        }
    };
    if (d == 1) {
        acc.push_back({anchor});
        enumerate_partitions(used, acc, d, out);
        acc.pop_back();
    } else {
        rec(rec, 0, 0);
    }
    used[anchor] = false;
}

}  // namespace detail

// All partitions of n sites into groups of size d, canonical order. Guarded:
// the count grows like n!/((d!)^(n/d) (n/d)!), so n is capped where the count
// would exceed 1e6.
inline std::vector<GroupPartition> group_partitions(std::size_t n, std::size_t d) {
    require_divisible(n, d, "group_partitions");
    if (group_partition_count(n, d) > 1000000)
        throw std::invalid_argument("group_partitions: too many partitions to enumerate");
    std::vector<GroupPartition> out;
    std::vector<bool> used(n, false);
    std::vector<std::vector<std::size_t>> acc;
    detail::enumerate_partitions(used, acc, d, out);
    return out;
}

// Integer partitions of n into at most `max_parts` parts, each part listed
// descending. These index the input multiplicity patterns of symbol strings
// up to relabeling.
inline std::vector<std::vector<std::size_t>> count_partitions(std::size_t n, std::size_t max_parts) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto &&self, std::size_t remaining, std::size_t max_part) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        if (cur.size() == max_parts) return;
        for (std::size_t p = std::min(remaining, max_part); p >= 1; --p) {
            cur.push_back(p);
            self(self, remaining - p, p);
            cur.pop_back();
        }
    };
    rec(rec, n, n);
    return out;
}

// Dimension of the subspace of (C^d)^(x n) invariant under every collective
// unitary U^(x n). A vector is invariant iff every collective su(d) generator
// annihilates it, so the count is the null-space dimension of
// M = sum_g (G_g^coll)^2 over a traceless Hermitian generating set: the
// off-diagonal pairs X_ij = E_ij + E_ji, Y_ij = -i(E_ij - E_ji) and the Cartan
// differences H_k = E_kk - E_(k+1)(k+1). M is PSD, so the null space is read
// off the spectrum. Equals multiplicity(n, d) when d divides n, else 0.
inline std::size_t invariant_subspace_dim(std::size_t n, std::size_t d) {
    if (d < 2 || n == 0) throw std::invalid_argument("invariant_subspace_dim: need d >= 2, n >= 1");
    double dim_check = std::pow(static_cast<double>(d), static_cast<double>(n));
    if (dim_check > 4096.0) throw std::invalid_argument("invariant_subspace_dim: d^n exceeds 4096");
    std::size_t dim = 1;
    for (std::size_t k = 0; k < n; ++k) dim *= d;

    // digits of each basis string, site 0 most significant
    auto digit = [&](std::size_t idx, std::size_t site) {
        for (std::size_t k = n - 1; k > site; --k) idx /= d;
        return idx % d;
    };
    std::vector<std::size_t> site_stride(n, 1);
    for (std::size_t k = n; k-- > 1;) site_stride[k - 1] = site_stride[k] * d;

    struct Action {
        std::size_t from, to;
        cplx coeff;
    };
    std::vector<std::vector<Action>> gens;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            gens.push_back({{j, i, cplx(1.0, 0.0)}, {i, j, cplx(1.0, 0.0)}});
            gens.push_back({{j, i, cplx(0.0, -1.0)}, {i, j, cplx(0.0, 1.0)}});
        }
    for (std::size_t k = 0; k + 1 < d; ++k)
        gens.push_back({{k, k, cplx(1.0, 0.0)}, {k + 1, k + 1, cplx(-1.0, 0.0)}});

    ComplexMatrix m(dim, dim);
    std::vector<std::vector<std::pair<std::size_t, cplx>>> images(dim);
    for (const auto &gen : gens) {
        // sparse collective image G|a> = sum over sites of the one-site action
        for (std::size_t a = 0; a < dim; ++a) {
            auto &img = images[a];
            img.clear();
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t ak = digit(a, k);
                for (const auto &act : gen)
                    if (act.from == ak)
                        img.emplace_back(a - act.from * site_stride[k] + act.to * site_stride[k],
                                         act.coeff);
            }
            std::sort(img.begin(), img.end(),
                      [](const auto &x, const auto &y) { return x.first < y.first; });
            std::size_t w = 0;
            for (std::size_t r = 0; r < img.size();) {
                cplx c = img[r].second;
                std::size_t r2 = r + 1;
                while (r2 < img.size() && img[r2].first == img[r].first) c += img[r2++].second;
                if (c != cplx(0.0, 0.0)) img[w++] = {img[r].first, c};
                r = r2;
            }
            img.resize(w);
        }
        // (G^2)(a,b) = <G a | G b>, an inner product of sparse image lists
        for (std::size_t a = 0; a < dim; ++a) {
            if (images[a].empty()) continue;
            for (std::size_t b = a; b < dim; ++b) {
                if (images[b].empty()) continue;
                std::size_t p = 0, q = 0;
                cplx s = 0.0;
                while (p < images[a].size() && q < images[b].size()) {
                    if (images[a][p].first == images[b][q].first) {
                        s += std::conj(images[a][p].second) * images[b][q].second;
                        ++p;
                        ++q;
                    } else if (images[a][p].first < images[b][q].first) {
                        ++p;
                    } else {
                        ++q;
                    }
                }
                if (s != cplx(0.0, 0.0)) {
                    m(a, b) += s;
                    if (b != a) m(b, a) += std::conj(s);
                }
            }
        }
    }

    const auto ev = hermitian_eigenvalues(m);
    const double scale = ev.empty() ? 1.0 : std::max(1.0, ev.front());
    std::size_t count = 0;
    for (double l : ev)
        if (std::abs(l) <= 1e-9 * scale) ++count;
    return count;
}

}  // namespace qcausal
