// Even integral lattices given by Gram matrices: construction, invariants,
// sublattice calculus and short-vector enumeration. All arithmetic exact.
#pragma once

#include <og6lat/matrix.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace og6lat {

struct LatticeError : MathError {
    enum class Kind { NotSymmetric, OddDiagonal, Degenerate, BadArgument };
    Kind kind;
    LatticeError(Kind k, const std::string& what) : MathError(what), kind(k) {}
};

struct Signature {
    int plus = 0, minus = 0;
    bool operator==(const Signature&) const = default;
};

class Lattice {
public:
    explicit Lattice(ZMat gram) : gram_(std::move(gram)) {
        if (gram_.r != gram_.c)
            throw LatticeError(LatticeError::Kind::BadArgument, "gram matrix must be square");
        for (int i = 0; i < gram_.r; ++i)
            for (int j = i + 1; j < gram_.c; ++j)
                if (gram_(i, j) != gram_(j, i))
                    throw LatticeError(LatticeError::Kind::NotSymmetric, "gram matrix not symmetric");
        for (int i = 0; i < gram_.r; ++i)
            if (mod_pos(gram_(i, i), 2) != 0)
                throw LatticeError(LatticeError::Kind::OddDiagonal,
                                   "odd diagonal entry: lattice is not even");
        det_ = og6lat::det(gram_);
        if (gram_.r > 0 && det_ == 0)
            throw LatticeError(LatticeError::Kind::Degenerate, "degenerate gram matrix");
        sig_ = compute_signature();
    }

    static Lattice zero() { return Lattice(ZMat(0, 0)); }

    const ZMat& gram() const { return gram_; }
    int rank() const { return gram_.r; }
    const Int& det() const { return det_; }
    Int abs_det() const { return abs(det_); }
    Signature signature() const { return sig_; }
    bool is_negative_definite() const { return sig_.plus == 0; }
    bool is_positive_definite() const { return sig_.minus == 0; }
    bool is_definite() const { return sig_.plus == 0 || sig_.minus == 0; }

    Int inner(const std::vector<Int>& x, const std::vector<Int>& y) const {
        require((int)x.size() == rank() && (int)y.size() == rank(), "inner: bad vector length");
        Int s = 0;
        for (int i = 0; i < rank(); ++i) {
            if (x[i] == 0) continue;
            for (int j = 0; j < rank(); ++j) s += x[i] * gram_(i, j) * y[j];
        }
        return s;
    }
    Int norm(const std::vector<Int>& x) const { return inner(x, x); }

    bool operator==(const Lattice& o) const { return gram_ == o.gram_; }

private:
    Signature compute_signature() const {
        // symmetric congruence diagonalization over Q
        QMat m = to_q(gram_);
        int n = m.r;
        Signature s;
        std::vector<bool> used(n, false);
        for (int step = 0; step < n; ++step) {
            int p = -1;
            for (int i = 0; i < n; ++i)
                if (!used[i] && m(i, i) != 0) { p = i; break; }
            if (p < 0) {
                // all remaining diagonal entries vanish; mix in an off-diagonal
                int a = -1, b = -1;
                for (int i = 0; i < n && a < 0; ++i) {
                    if (used[i]) continue;
                    for (int j = 0; j < n; ++j)
                        if (!used[j] && j != i && m(i, j) != 0) { a = i; b = j; break; }
                }
                require(a >= 0, "signature: unexpected degeneracy");
                for (int k = 0; k < n; ++k) m(a, k) += m(b, k);
                for (int k = 0; k < n; ++k) m(k, a) += m(k, b);
                p = a;
            }
            used[p] = true;
            if (m(p, p) > 0) ++s.plus; else ++s.minus;
            for (int i = 0; i < n; ++i) {
                if (used[i] || m(i, p) == 0) continue;
                Rat f = m(i, p) / m(p, p);
                for (int k = 0; k < n; ++k) m(i, k) -= f * m(p, k);
                for (int k = 0; k < n; ++k) m(k, i) -= f * m(k, p);
            }
        }
        return s;
    }

    ZMat gram_;
    Int det_;
    Signature sig_;
};

inline Lattice make_lattice(const ZMat& gram) { return Lattice(gram); }

inline Lattice make_lattice(int n, std::vector<int> entries) {
    ZMat g(n, n);
    require((int)entries.size() == n * n, "make_lattice: bad entry count");
    for (int i = 0; i < n * n; ++i) g.a[i] = entries[i];
    return Lattice(g);
}

// --- standard lattices (ADE negative definite) ---

inline Lattice lat_U() { return make_lattice(2, {0, 1, 1, 0}); }

inline Lattice lat_rank1(const Int& m) {
    require(m != 0 && mod_pos(m, 2) == 0, "rank1: even nonzero value required");
    ZMat g(1, 1);
    g(0, 0) = m;
    return Lattice(g);
}

inline Lattice lat_A(int n) {
    require(n >= 1, "A(n): n >= 1 required");
    ZMat g(n, n);
    for (int i = 0; i < n; ++i) {
        g(i, i) = -2;
        if (i + 1 < n) { g(i, i + 1) = 1; g(i + 1, i) = 1; }
    }
    return Lattice(g);
}

inline Lattice lat_D(int n) {
    require(n >= 4, "D(n): n >= 4 required");
    ZMat g(n, n);
    for (int i = 0; i < n; ++i) g(i, i) = -2;
    for (int i = 0; i + 1 < n - 1; ++i) { g(i, i + 1) = 1; g(i + 1, i) = 1; }
    g(n - 3, n - 1) = 1;
    g(n - 1, n - 3) = 1;
    return Lattice(g);
}

inline Lattice lat_E(int n) {
    require(n >= 6 && n <= 8, "E(n): n in {6,7,8} required");
    ZMat g(n, n);
    for (int i = 0; i < n; ++i) g(i, i) = -2;
    // chain 0-1-...-(n-2), node n-1 attached to node 2
    for (int i = 0; i + 1 < n - 1; ++i) { g(i, i + 1) = 1; g(i + 1, i) = 1; }
    g(2, n - 1) = 1;
    g(n - 1, 2) = 1;
    return Lattice(g);
}

inline Lattice rescale(const Lattice& L, const Int& n) {
    require(n != 0, "rescale: n must be nonzero");
    ZMat g = L.gram();
    for (auto& x : g.a) x *= n;
    return Lattice(g);
}

inline Lattice direct_sum(const std::vector<Lattice>& parts) {
    require(!parts.empty(), "direct_sum: empty sequence");
    int n = 0;
    for (auto& p : parts) n += p.rank();
    ZMat g(n, n);
    int off = 0;
    for (auto& p : parts) {
        for (int i = 0; i < p.rank(); ++i)
            for (int j = 0; j < p.rank(); ++j) g(off + i, off + j) = p.gram()(i, j);
        off += p.rank();
    }
    return Lattice(g);
}

inline Lattice lat_btA() {
    return make_lattice(4, {-2, 1, -1, -1,
                            1, -2, 1, 1,
                            -1, 1, -2, 0,
                            -1, 1, 0, -4});
}

inline Lattice lat_bL() {
    return direct_sum({lat_U(), lat_U(), lat_U(), lat_rank1(-2), lat_rank1(-2)});
}
inline Lattice lat_bLambda() {
    return direct_sum({lat_U(), lat_U(), lat_U(), lat_U(), lat_U()});
}
inline Lattice lat_bR() { return direct_sum({lat_rank1(2), lat_rank1(2)}); }

// --- vectors and sublattices (rows of a basis matrix, ambient coordinates) ---

inline Int divisibility(const Lattice& L, const std::vector<Int>& v) {
    bool nonzero = false;
    for (auto& x : v)
        if (x != 0) { nonzero = true; break; }
    require(nonzero, "divisibility: zero vector");
    Int g = 0;
    for (int i = 0; i < L.rank(); ++i) {
        Int s = 0;
        for (int j = 0; j < L.rank(); ++j) s += L.gram()(i, j) * v[j];
        g = gcd(g, s);
    }
    return abs(g);
}

// Saturation of the row span of S inside Z^n.
inline ZMat saturation(const Lattice& L, const ZMat& S) {
    require(S.c == L.rank(), "saturation: ambient rank mismatch");
    require(rank_z(S) == S.r, "saturation: dependent rows");
    // x in sat(S)  <=>  x . y = 0 (dot) for every y in the dot-kernel of S
    ZMat K = left_kernel(S.transposed());  // rows y with S y^T = 0
    if (K.r == 0) return ZMat::identity(L.rank());
    ZMat sat = left_kernel(K.transposed());
    return hnf_rows(sat);
}

inline bool is_primitive(const Lattice& L, const ZMat& S) {
    ZMat sat = saturation(L, S);
    return sat == hnf_rows(S);
}

// Gram of a sublattice given by basis rows.
inline ZMat restricted_gram(const Lattice& L, const ZMat& S) {
    return mul(mul(S, L.gram()), S.transposed());
}

struct Sublattice {
    ZMat basis;      // rows, ambient coordinates
    Lattice lattice; // Gram of the restriction
};

inline Sublattice orthogonal_complement(const Lattice& L, const ZMat& S) {
    require(S.c == L.rank(), "complement: ambient rank mismatch");
    if (S.r == 0) return {ZMat::identity(L.rank()), L};
    require(is_primitive(L, S), "complement: sublattice not primitive");
    {
        Int d = og6lat::det(restricted_gram(L, S));
        if (d == 0)
            throw LatticeError(LatticeError::Kind::Degenerate,
                               "complement: degenerate (isotropic) sublattice");
    }
    ZMat B = left_kernel(mul(L.gram(), S.transposed()));
    ZMat g = restricted_gram(L, B);
    if (B.r > 0 && og6lat::det(g) == 0)
        throw LatticeError(LatticeError::Kind::Degenerate,
                           "complement: degenerate restriction");
    return {B, Lattice(g)};
}

// --- short vectors on negative definite lattices ---

namespace detail {

// LDL^T data for a positive definite rational matrix.
struct Ldl {
    std::vector<Rat> d;
    QMat u;  // unit upper: u(i,j) for j > i
};

inline Ldl ldl(const QMat& p0) {
    int n = p0.r;
    QMat m = p0;
    Ldl out;
    out.d.resize(n);
    out.u = QMat::identity(n);
    for (int i = 0; i < n; ++i) {
        out.d[i] = m(i, i);
        require(out.d[i] > 0, "ldl: matrix not positive definite");
        for (int j = i + 1; j < n; ++j) out.u(i, j) = m(i, j) / m(i, i);
        for (int k = i + 1; k < n; ++k)
            for (int l = k; l < n; ++l) m(k, l) -= m(i, k) * m(i, l) / m(i, i);
        for (int k = i + 1; k < n; ++k)
            for (int l = i + 1; l < k; ++l) m(k, l) = m(l, k);
    }
    return out;
}

inline void short_rec(const Ldl& f, int t, std::vector<Int>& x, const Rat& remaining,
                      std::vector<std::vector<Int>>& out) {
    if (t < 0) {
        bool nz = false;
        for (auto& c : x)
            if (c != 0) { nz = true; break; }
        if (nz) out.push_back(x);
        return;
    }
    Rat c = 0;  // offset sum_{j>t} u(t,j) x_j
    for (int j = t + 1; j < (int)x.size(); ++j)
        if (x[j] != 0) c += f.u(t, j) * Rat(x[j]);
    // scan integers around -c while d_t (x+c)^2 <= remaining
    Int center;
    {
        Rat mc = -c;
        mpz_fdiv_q(center.get_mpz_t(), mc.get_num_mpz_t(), mc.get_den_mpz_t());
    }
    for (Int xv = center;; --xv) {
        Rat s = Rat(xv) + c;
        Rat used = f.d[t] * s * s;
        if (used > remaining) break;
        x[t] = xv;
        short_rec(f, t - 1, x, remaining - used, out);
    }
    for (Int xv = center + 1;; ++xv) {
        Rat s = Rat(xv) + c;
        Rat used = f.d[t] * s * s;
        if (used > remaining) break;
        x[t] = xv;
        short_rec(f, t - 1, x, remaining - used, out);
    }
    x[t] = 0;
}

}  // namespace detail

// All nonzero vectors v with v^2 in `norms` (negative even integers), both signs,
// in lexicographic coordinate order.
inline std::vector<std::vector<Int>> short_vectors(const Lattice& L, const std::set<Int>& norms) {
    require(L.is_negative_definite() && L.rank() > 0,
            "short_vectors: negative definite lattice required");
    Int bound = 0;
    for (auto& n : norms) {
        require(n < 0 && mod_pos(n, 2) == 0, "short_vectors: norms must be negative even");
        Int m = -n;
        if (m > bound) bound = m;
    }
    if (bound == 0) return {};
    QMat p = to_q(L.gram());
    for (auto& x : p.a) x = -x;
    detail::Ldl f = detail::ldl(p);
    std::vector<Int> x(L.rank(), 0);
    std::vector<std::vector<Int>> all;
    detail::short_rec(f, L.rank() - 1, x, Rat(bound), all);
    std::vector<std::vector<Int>> out;
    for (auto& v : all)
        if (norms.count(L.norm(v))) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::vector<Int>> root_vectors(const Lattice& L) {
    return short_vectors(L, {Int(-2)});
}

// --- symbolic lattice expressions ---
// grammar:  expr := term ('+' term)* ; term := [int] atom [ '(' int ')' ]
//           atom := 'U' | 'A'n | 'D'n | 'E'n | 'btA' | '[' int ']'

struct ParseError : MathError {
    size_t position;
    ParseError(size_t pos, const std::string& what)
        : MathError(what + " at position " + std::to_string(pos)), position(pos) {}
};

namespace detail {

struct Parser {
    std::string s;
    size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }
    // accepts ASCII '-' and UTF-8 minus sign
    bool eat_minus() {
        skip();
        if (i < s.size() && s[i] == '-') { ++i; return true; }
        if (i + 2 < s.size() + 1 && s.compare(i, 3, "−") == 0) { i += 3; return true; }
        return false;
    }
    std::optional<Int> integer() {
        skip();
        bool neg = eat_minus();
        size_t start = i;
        std::string digits;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) digits += s[i++];
        if (digits.empty()) {
            if (neg) throw ParseError(start, "expected digits after sign");
            return std::nullopt;
        }
        Int v(digits);
        return neg ? Int(-v) : v;
    }

    Lattice atom() {
        skip();
        if (i >= s.size()) throw ParseError(i, "expected lattice atom");
        if (s.compare(i, 3, "btA") == 0) { i += 3; return lat_btA(); }
        char c = s[i];
        if (c == 'U') { ++i; return lat_U(); }
        if (c == 'A' || c == 'D' || c == 'E') {
            ++i;
            auto n = integer();
            if (!n) throw ParseError(i, "expected index after series letter");
            int k = (int)n->get_si();
            try {
                if (c == 'A') return lat_A(k);
                if (c == 'D') return lat_D(k);
                return lat_E(k);
            } catch (const MathError& e) {
                throw ParseError(i, e.what());
            }
        }
        if (c == '[') {
            ++i;
            auto n = integer();
            if (!n) throw ParseError(i, "expected integer in [m]");
            if (!eat(']')) throw ParseError(i, "expected ']'");
            try {
                return lat_rank1(*n);
            } catch (const MathError& e) {
                throw ParseError(i, e.what());
            }
        }
        throw ParseError(i, "unrecognized lattice atom");
    }

    Lattice term() {
        skip();
        Int count = 1;
        if (i < s.size() && std::isdigit((unsigned char)s[i])) {
            count = *integer();
            if (count < 1) throw ParseError(i, "repetition count must be positive");
        }
        Lattice base = atom();
        skip();
        if (i < s.size() && s[i] == '(') {
            ++i;
            auto n = integer();
            if (!n) throw ParseError(i, "expected integer rescale factor");
            if (!eat(')')) throw ParseError(i, "expected ')'");
            try {
                base = rescale(base, *n);
            } catch (const MathError& e) {
                throw ParseError(i, e.what());
            }
        }
        std::vector<Lattice> reps((size_t)count.get_ui(), base);
        return direct_sum(reps);
    }

    Lattice expr() {
        Lattice acc = term();
        while (true) {
            skip();
            if (eat('+')) {
                Lattice t = term();
                acc = direct_sum({acc, t});
            } else {
                break;
            }
        }
        skip();
        if (i != s.size()) throw ParseError(i, "trailing input");
        return acc;
    }
};

}  // namespace detail

inline Lattice parse_lattice(const std::string& text) {
    detail::Parser p{text};
    return p.expr();
}

}  // namespace og6lat
