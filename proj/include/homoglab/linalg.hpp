#pragma once

// Small dense vectors and symmetric matrices for spatial dimensions 2..4.
// Everything here is value-typed and allocation-free; the PDE solvers keep
// their own flat arrays and only use these types at API boundaries.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace homoglab {

inline constexpr int kMaxDim = 4;
inline constexpr double kPi = 3.14159265358979323846;

struct Vec {
    std::array<double, kMaxDim> x{};
    int d = 2;

    Vec() = default;
    explicit Vec(int dim) : d(dim) {}
    Vec(double a, double b) : d(2) { x[0] = a; x[1] = b; }
    Vec(double a, double b, double c) : d(3) { x[0] = a; x[1] = b; x[2] = c; }

    double& operator[](int i) { return x[static_cast<size_t>(i)]; }
    double operator[](int i) const { return x[static_cast<size_t>(i)]; }

    Vec operator+(const Vec& o) const {
        Vec r(d);
        for (int i = 0; i < d; ++i) r[i] = x[size_t(i)] + o[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r(d);
        for (int i = 0; i < d; ++i) r[i] = x[size_t(i)] - o[i];
        return r;
    }
    Vec operator*(double s) const {
        Vec r(d);
        for (int i = 0; i < d; ++i) r[i] = x[size_t(i)] * s;
        return r;
    }
    double dot(const Vec& o) const {
        double s = 0;
        for (int i = 0; i < d; ++i) s += x[size_t(i)] * o[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

// Dense d x d matrix, row major. Symmetry is a convention of the callers,
// not enforced by the type; sym-only helpers state it in their names.
struct Mat {
    std::array<double, kMaxDim * kMaxDim> a{};
    int d = 2;

    Mat() = default;
    explicit Mat(int dim) : d(dim) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i * kMaxDim + j)]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i * kMaxDim + j)]; }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat diag(const Vec& v) {
        Mat m(v.d);
        for (int i = 0; i < v.d; ++i) m(i, i) = v[i];
        return m;
    }

    Mat operator+(const Mat& o) const {
        Mat r(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r(i, j) = (*this)(i, j) + o(i, j);
        return r;
    }
    Mat operator-(const Mat& o) const {
        Mat r(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r(i, j) = (*this)(i, j) - o(i, j);
        return r;
    }
    Mat operator*(double s) const {
        Mat r(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r(i, j) = (*this)(i, j) * s;
        return r;
    }
    Mat operator*(const Mat& o) const {
        Mat r(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0;
                for (int k = 0; k < d; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }
    Vec operator*(const Vec& v) const {
        Vec r(d);
        for (int i = 0; i < d; ++i) {
            double s = 0;
            for (int j = 0; j < d; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }
    Mat transposed() const {
        Mat r(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    double max_abs() const {
        double m = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }
    double frobenius() const {
        double s = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }
    double quad(const Vec& v) const {  // v^T A v
        double s = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += v[i] * (*this)(i, j) * v[j];
        return s;
    }
};

struct SymEig {
    Vec values;   // ascending
    Mat vectors;  // columns are eigenvectors
};

// Cyclic Jacobi rotations; fine for d <= 4 and symmetric input.
inline SymEig sym_eigen(const Mat& A) {
    const int d = A.d;
    Mat M = A, V = Mat::identity(d);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += M(p, q) * M(p, q);
        if (off < 1e-300) break;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                if (std::abs(M(p, q)) < 1e-300) continue;
                const double theta = (M(q, q) - M(p, p)) / (2.0 * M(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double mkp = M(k, p), mkq = M(k, q);
                    M(k, p) = c * mkp - s * mkq;
                    M(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < d; ++k) {
                    const double mpk = M(p, k), mqk = M(q, k);
                    M(p, k) = c * mpk - s * mqk;
                    M(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    SymEig e;
    e.values = Vec(d);
    e.vectors = Mat(d);
    std::array<int, kMaxDim> order{};
    for (int i = 0; i < d; ++i) order[size_t(i)] = i;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (M(order[size_t(j)], order[size_t(j)]) < M(order[size_t(i)], order[size_t(i)]))
                std::swap(order[size_t(i)], order[size_t(j)]);
    for (int i = 0; i < d; ++i) {
        e.values[i] = M(order[size_t(i)], order[size_t(i)]);
        for (int k = 0; k < d; ++k) e.vectors(k, i) = V(k, order[size_t(i)]);
    }
    return e;
}

// f(A) = V f(diag) V^T for symmetric A.
inline Mat sym_apply(const Mat& A, double (*f)(double)) {
    const SymEig e = sym_eigen(A);
    Mat r(A.d);
    for (int i = 0; i < A.d; ++i)
        for (int j = 0; j < A.d; ++j) {
            double s = 0;
            for (int k = 0; k < A.d; ++k)
                s += e.vectors(i, k) * f(e.values[k]) * e.vectors(j, k);
            r(i, j) = s;
        }
    return r;
}

inline Mat sym_inverse_sqrt(const Mat& A) {
    return sym_apply(A, +[](double x) {
        if (x <= 0.0) throw std::domain_error("sym_inverse_sqrt: matrix not positive definite");
        return 1.0 / std::sqrt(x);
    });
}

inline Mat sym_inverse(const Mat& A) {
    return sym_apply(A, +[](double x) {
        if (x == 0.0) throw std::domain_error("sym_inverse: singular matrix");
        return 1.0 / x;
    });
}

inline double det(const Mat& A) {
    const int d = A.d;
    if (d == 2) return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    if (d == 3)
        return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
               A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
               A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
    // d == 4 via cofactor expansion on the first row
    double s = 0;
    for (int j = 0; j < d; ++j) {
        Mat m(3);
        for (int r = 1, mr = 0; r < d; ++r, ++mr)
            for (int c = 0, mc = 0; c < d; ++c) {
                if (c == j) continue;
                m(mr, mc++) = A(r, c);
            }
        s += ((j % 2 == 0) ? 1.0 : -1.0) * A(0, j) * det(m);
    }
    return s;
}

}  // namespace homoglab
