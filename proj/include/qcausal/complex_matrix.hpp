#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcausal {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Dense row-major complex matrix. Small-dimension workhorse for the whole
// library; no expression templates, no views, just contiguous storage.
class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        if (rows != 0 && cols > (std::size_t(1) << 26) / rows)
            throw std::invalid_argument("ComplexMatrix: allocation over 2^26 entries refused");
        a_.assign(rows * cols, cplx(0.0, 0.0));
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx &operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx &operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    cplx *data() { return a_.data(); }
    const cplx *data() const { return a_.data(); }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        require_same_shape(o, "operator+=");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        require_same_shape(o, "operator-=");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    ComplexMatrix &operator*=(const cplx &s) {
        for (auto &v : a_) v *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, const cplx &s) { return a *= s; }
    friend ComplexMatrix operator*(const cplx &s, ComplexMatrix a) { return a *= s; }

    // Matrix product with the usual ikj loop order.
    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("matmul: inner dimensions differ");
        ComplexMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                const cplx *brow = b.a_.data() + k * b.cols_;
                cplx *crow = c.a_.data() + i * b.cols_;
                for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    // Conjugate transpose.
    ComplexMatrix dagger() const {
        ComplexMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    cplx trace() const {
        if (rows_ != cols_) throw std::invalid_argument("trace: matrix not square");
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto &v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto &v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    // Matrix-vector product.
    CVec apply(const CVec &x) const {
        if (x.size() != cols_) throw std::invalid_argument("apply: vector length mismatch");
        CVec y(rows_, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < rows_; ++i) {
            cplx acc = 0.0;
            const cplx *row = a_.data() + i * cols_;
            for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        return y;
    }

private:
    void require_same_shape(const ComplexMatrix &o, const char *op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string(op) + ": shape mismatch");
    }

    std::size_t rows_, cols_;
    CVec a_;
};

// max_ij |M_ij - conj(M_ji)| relative hermiticity defect.
inline double hermiticity_defect(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermiticity_defect: not square");
    double dev = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
    return dev;
}

inline bool is_hermitian(const ComplexMatrix &m, double tol = 1e-10) {
    return hermiticity_defect(m) <= tol * (1.0 + m.max_abs());
}

// <u|v> with conjugation on the first argument.
inline cplx vdot(const CVec &u, const CVec &v) {
    if (u.size() != v.size()) throw std::invalid_argument("vdot: length mismatch");
    cplx s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += std::conj(u[k]) * v[k];
    return s;
}

inline double vec_norm(const CVec &v) {
    double s = 0.0;
    for (const auto &x : v) s += std::norm(x);
    return std::sqrt(s);
}

// |u><v|
inline ComplexMatrix outer(const CVec &u, const CVec &v) {
    ComplexMatrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
    return m;
}

inline CVec kron_vec(const CVec &a, const CVec &b) {
    CVec out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return out;
}

}  // namespace qcausal
