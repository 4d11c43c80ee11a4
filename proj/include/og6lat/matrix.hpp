// Exact integer/rational matrix kernel: Bareiss determinants, Hermite and
// Smith normal forms with transforms, integer kernels, rational inverses.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace og6lat {

using Int = mpz_class;
using Rat = mpq_class;

struct MathError : std::runtime_error {
    explicit MathError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw MathError(what);
}

template <typename T>
struct Mat {
    int r = 0, c = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(int rows, int cols) : r(rows), c(cols), a(static_cast<size_t>(rows) * cols) {}
    Mat(int rows, int cols, std::vector<T> vals) : r(rows), c(cols), a(std::move(vals)) {
        require(a.size() == static_cast<size_t>(r) * c, "matrix: bad initializer size");
    }

    T& operator()(int i, int j) { return a[static_cast<size_t>(i) * c + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * c + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    Mat transposed() const {
        Mat m(c, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    bool operator==(const Mat& o) const { return r == o.r && c == o.c && a == o.a; }

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < c; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }
    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < r; ++k) std::swap((*this)(k, i), (*this)(k, j));
    }
    // row[i] += f * row[j]
    void add_row(int i, int j, const T& f) {
        for (int k = 0; k < c; ++k) (*this)(i, k) += f * (*this)(j, k);
    }
    void add_col(int i, int j, const T& f) {
        for (int k = 0; k < r; ++k) (*this)(k, i) += f * (*this)(k, j);
    }
    void negate_row(int i) {
        for (int k = 0; k < c; ++k) (*this)(i, k) = -(*this)(i, k);
    }
    void negate_col(int i) {
        for (int k = 0; k < r; ++k) (*this)(k, i) = -(*this)(k, i);
    }
};

using ZMat = Mat<Int>;
using QMat = Mat<Rat>;

template <typename T>
Mat<T> mul(const Mat<T>& x, const Mat<T>& y) {
    require(x.c == y.r, "mul: shape mismatch");
    Mat<T> z(x.r, y.c);
    for (int i = 0; i < x.r; ++i)
        for (int k = 0; k < x.c; ++k) {
            const T& v = x(i, k);
            if (v == 0) continue;
            for (int j = 0; j < y.c; ++j) z(i, j) += v * y(k, j);
        }
    return z;
}

template <typename T>
std::vector<T> mul_vec(const Mat<T>& x, const std::vector<T>& v) {
    require(x.c == (int)v.size(), "mul_vec: shape mismatch");
    std::vector<T> out(x.r);
    for (int i = 0; i < x.r; ++i)
        for (int j = 0; j < x.c; ++j) out[i] += x(i, j) * v[j];
    return out;
}

inline QMat to_q(const ZMat& m) {
    QMat q(m.r, m.c);
    for (size_t i = 0; i < m.a.size(); ++i) q.a[i] = Rat(m.a[i]);
    return q;
}

// Exact integer cast; throws on non-integral entries.
inline ZMat to_z(const QMat& m) {
    ZMat z(m.r, m.c);
    for (size_t i = 0; i < m.a.size(); ++i) {
        require(m.a[i].get_den() == 1, "to_z: non-integral entry");
        z.a[i] = m.a[i].get_num();
    }
    return z;
}

// Fraction-free Gaussian elimination (Bareiss).
inline Int det(const ZMat& m0) {
    require(m0.r == m0.c, "det: square matrix required");
    int n = m0.r;
    if (n == 0) return 1;
    ZMat m = m0;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (m(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Int t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
        prev = m(k, k);
    }
    return sign > 0 ? m(n - 1, n - 1) : -m(n - 1, n - 1);
}

// Row Hermite normal form. Returns H; if U is given, fills U with a
// unimodular matrix such that U * A = H. Pivot entries positive, entries
// above a pivot reduced into [0, pivot).
inline ZMat hnf_rows(const ZMat& A, ZMat* U = nullptr) {
    ZMat h = A;
    ZMat u = ZMat::identity(A.r);
    int row = 0;
    for (int col = 0; col < h.c && row < h.r; ++col) {
        // gcd chain down the column
        while (true) {
            int p = -1;
            for (int i = row; i < h.r; ++i)
                if (h(i, col) != 0 && (p < 0 || abs(h(i, col)) < abs(h(p, col)))) p = i;
            if (p < 0) break;
            h.swap_rows(row, p);
            u.swap_rows(row, p);
            bool clean = true;
            for (int i = row + 1; i < h.r; ++i) {
                if (h(i, col) == 0) continue;
                Int q = h(i, col) / h(row, col);  // truncated division is fine here
                if (q != 0) {
                    h.add_row(i, row, -q);
                    u.add_row(i, row, -q);
                }
                if (h(i, col) != 0) clean = false;
            }
            if (clean) break;
        }
        if (h(row, col) == 0) continue;
        if (h(row, col) < 0) {
            h.negate_row(row);
            u.negate_row(row);
        }
        for (int i = 0; i < row; ++i) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), h(i, col).get_mpz_t(), h(row, col).get_mpz_t());
            if (q != 0) {
                h.add_row(i, row, -q);
                u.add_row(i, row, -q);
            }
        }
        ++row;
    }
    if (U) *U = u;
    return h;
}

inline int rank_z(const ZMat& A) {
    ZMat h = hnf_rows(A);
    int rk = 0;
    for (int i = 0; i < h.r; ++i)
        for (int j = 0; j < h.c; ++j)
            if (h(i, j) != 0) { ++rk; break; }
    return rk;
}

// Basis (rows) of the left kernel {x : x A = 0}. Always saturated.
inline ZMat left_kernel(const ZMat& A) {
    ZMat U;
    ZMat h = hnf_rows(A, &U);
    std::vector<int> zero_rows;
    for (int i = 0; i < h.r; ++i) {
        bool z = true;
        for (int j = 0; j < h.c; ++j)
            if (h(i, j) != 0) { z = false; break; }
        if (z) zero_rows.push_back(i);
    }
    ZMat k((int)zero_rows.size(), A.r);
    for (int i = 0; i < k.r; ++i)
        for (int j = 0; j < A.r; ++j) k(i, j) = U(zero_rows[i], j);
    return k;
}

struct SnfResult {
    ZMat d, u, v;  // u * a * v = d, diag divisibility chain
};

inline SnfResult snf(const ZMat& A) {
    ZMat d = A;
    ZMat u = ZMat::identity(A.r);
    ZMat v = ZMat::identity(A.c);
    int n = std::min(A.r, A.c);
    for (int t = 0; t < n; ++t) {
        while (true) {
            int pi = -1, pj = -1;
            for (int i = t; i < d.r; ++i)
                for (int j = t; j < d.c; ++j)
                    if (d(i, j) != 0 &&
                        (pi < 0 || abs(d(i, j)) < abs(d(pi, pj)))) { pi = i; pj = j; }
            if (pi < 0) { pi = t; pj = t; }
            if (d(pi, pj) == 0) goto done_pivot;
            d.swap_rows(t, pi); u.swap_rows(t, pi);
            d.swap_cols(t, pj); v.swap_cols(t, pj);
            bool dirty = false;
            for (int i = t + 1; i < d.r; ++i)
                if (d(i, t) != 0) {
                    Int q = d(i, t) / d(t, t);
                    d.add_row(i, t, -q); u.add_row(i, t, -q);
                    if (d(i, t) != 0) dirty = true;
                }
            for (int j = t + 1; j < d.c; ++j)
                if (d(t, j) != 0) {
                    Int q = d(t, j) / d(t, t);
                    d.add_col(j, t, -q); v.add_col(j, t, -q);
                    if (d(t, j) != 0) dirty = true;
                }
            if (dirty) continue;
            // divisibility sweep over the trailing block
            bool fixed = true;
            for (int i = t + 1; i < d.r && fixed; ++i)
                for (int j = t + 1; j < d.c && fixed; ++j)
                    if (d(i, j) % d(t, t) != 0) {
                        d.add_row(t, i, 1);
                        u.add_row(t, i, 1);
                        fixed = false;
                    }
            if (fixed) break;
        }
        if (d(t, t) < 0) { d.negate_row(t); u.negate_row(t); }
    }
done_pivot:
    return {d, u, v};
}

inline QMat q_identity(int n) { return QMat::identity(n); }

inline QMat q_inverse(const QMat& m0) {
    require(m0.r == m0.c, "q_inverse: square matrix required");
    int n = m0.r;
    QMat m = m0;
    QMat inv = QMat::identity(n);
    for (int k = 0; k < n; ++k) {
        int p = -1;
        for (int i = k; i < n; ++i)
            if (m(i, k) != 0) { p = i; break; }
        require(p >= 0, "q_inverse: singular matrix");
        m.swap_rows(k, p);
        inv.swap_rows(k, p);
        Rat piv = m(k, k);
        for (int j = 0; j < n; ++j) { m(k, j) /= piv; inv(k, j) /= piv; }
        for (int i = 0; i < n; ++i) {
            if (i == k || m(i, k) == 0) continue;
            Rat f = m(i, k);
            for (int j = 0; j < n; ++j) {
                m(i, j) -= f * m(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

// Solve x * A = b over Q (x row vector); A square invertible.
inline std::vector<Rat> solve_left(const QMat& A, const std::vector<Rat>& b) {
    QMat inv = q_inverse(A);
    std::vector<Rat> x(A.r);
    for (int j = 0; j < A.r; ++j)
        for (int i = 0; i < (int)b.size(); ++i) x[j] += b[i] * inv(i, j);
    return x;
}

inline bool lex_less(const ZMat& a, const ZMat& b) {
    if (a.r != b.r) return a.r < b.r;
    if (a.c != b.c) return a.c < b.c;
    for (size_t i = 0; i < a.a.size(); ++i)
        if (a.a[i] != b.a[i]) return a.a[i] < b.a[i];
    return false;
}

inline std::string to_string(const ZMat& m) {
    std::string s = "[";
    for (int i = 0; i < m.r; ++i) {
        s += "[";
        for (int j = 0; j < m.c; ++j) {
            s += m(i, j).get_str();
            if (j + 1 < m.c) s += ",";
        }
        s += "]";
        if (i + 1 < m.r) s += ",";
    }
    return s + "]";
}

// Canonical representatives: value of x mod m in [0, m).
inline Int mod_pos(const Int& x, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return r;
}

// q mod 2Z into [0,2); b mod Z into [0,1).
inline Rat rat_mod(const Rat& x, int modulus) {
    Rat m(modulus);
    Rat q = x / m;
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    Rat res = x - Rat(fl) * m;
    res.canonicalize();
    return res;
}

}  // namespace og6lat
