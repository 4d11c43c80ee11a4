// Finite quadratic forms (discriminant forms): evaluation, subgroups,
// isomorphism testing, orthogonal groups, gluing-graph quotients.
#pragma once

#include <og6lat/lattice.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace og6lat {

using FqfElem = std::vector<Int>;

// Finite abelian group with Q/2Z-valued quadratic form; generators g_i of
// orders d_1 | d_2 | ... ; qm diagonal holds q(g_i) mod 2Z, off-diagonal
// b(g_i,g_j) mod Z.
struct Fqf {
    std::vector<Int> orders;
    QMat qm;

    Fqf() : qm(0, 0) {}
    Fqf(std::vector<Int> ords, QMat m) : orders(std::move(ords)), qm(std::move(m)) {
        require((int)orders.size() == qm.r && qm.r == qm.c, "fqf: shape mismatch");
        for (int i = 0; i < qm.r; ++i) {
            qm(i, i) = rat_mod(qm(i, i), 2);
            for (int j = 0; j < qm.c; ++j) {
                if (i != j) qm(i, j) = rat_mod(qm(i, j), 1);
                require(i == j || qm(i, j) == rat_mod(qm(j, i), 1), "fqf: q-matrix not symmetric");
            }
        }
        for (int i = 0; i < ngen(); ++i) {
            require(orders[i] > 1, "fqf: trivial generator");
            Rat dq = Rat(orders[i] * orders[i]) * qm(i, i);
            require(dq.get_den() == 1 && mod_pos(dq.get_num(), 2) == 0,
                    "fqf: q not well-defined on generator");
            for (int j = 0; j < ngen(); ++j) {
                if (i == j) continue;
                Rat db = Rat(orders[i]) * qm(i, j);
                require(db.get_den() == 1, "fqf: b not well-defined");
            }
        }
        for (size_t i = 1; i < orders.size(); ++i)
            require(orders[i] % orders[i - 1] == 0, "fqf: orders must form a divisor chain");
    }

    static Fqf trivial() { return Fqf(); }

    int ngen() const { return (int)orders.size(); }
    Int size() const {
        Int s = 1;
        for (auto& d : orders) s *= d;
        return s;
    }

    FqfElem reduce(FqfElem x) const {
        for (int i = 0; i < ngen(); ++i) x[i] = mod_pos(x[i], orders[i]);
        return x;
    }
    FqfElem zero() const { return FqfElem(ngen(), 0); }
    bool is_zero(const FqfElem& x) const {
        for (auto& c : x)
            if (c != 0) return false;
        return true;
    }
    FqfElem add(const FqfElem& x, const FqfElem& y) const {
        FqfElem z(ngen());
        for (int i = 0; i < ngen(); ++i) z[i] = mod_pos(x[i] + y[i], orders[i]);
        return z;
    }
    FqfElem neg(const FqfElem& x) const {
        FqfElem z(ngen());
        for (int i = 0; i < ngen(); ++i) z[i] = mod_pos(-x[i], orders[i]);
        return z;
    }
    FqfElem scale(const Int& c, const FqfElem& x) const {
        FqfElem z(ngen());
        for (int i = 0; i < ngen(); ++i) z[i] = mod_pos(c * x[i], orders[i]);
        return z;
    }

    Rat q(const FqfElem& x) const {
        Rat v = 0;
        for (int i = 0; i < ngen(); ++i) {
            if (x[i] == 0) continue;
            v += Rat(x[i] * x[i]) * qm(i, i);
            for (int j = i + 1; j < ngen(); ++j)
                if (x[j] != 0) v += Rat(2 * x[i] * x[j]) * qm(i, j);
        }
        return rat_mod(v, 2);
    }
    Rat b(const FqfElem& x, const FqfElem& y) const {
        Rat v = 0;
        for (int i = 0; i < ngen(); ++i) {
            if (x[i] == 0) continue;
            for (int j = 0; j < ngen(); ++j) {
                if (y[j] == 0) continue;
                // b(g_i,g_i) = q(g_i) mod Z
                Rat bij = (i == j) ? rat_mod(qm(i, i), 1) : qm(i, j);
                v += Rat(x[i] * y[j]) * bij;
            }
        }
        return rat_mod(v, 1);
    }

    Int elem_order(const FqfElem& x) const {
        Int o = 1;
        for (int i = 0; i < ngen(); ++i) {
            if (x[i] == 0) continue;
            Int d = orders[i] / gcd(orders[i], x[i]);
            o = lcm(o, d);
        }
        return o;
    }

    long index_of(const FqfElem& x) const {
        long idx = 0;
        for (int i = 0; i < ngen(); ++i) idx = idx * orders[i].get_si() + x[i].get_si();
        return idx;
    }
    FqfElem elem_at(long idx) const {
        FqfElem x(ngen());
        for (int i = ngen() - 1; i >= 0; --i) {
            long d = orders[i].get_si();
            x[i] = idx % d;
            idx /= d;
        }
        return x;
    }

    std::vector<FqfElem> elements(long budget = 65536) const {
        require(size() <= budget, "fqf: element enumeration budget exceeded");
        long n = size().get_si();
        std::vector<FqfElem> out;
        out.reserve(n);
        for (long i = 0; i < n; ++i) out.push_back(elem_at(i));
        return out;
    }

    std::multiset<Rat> value_multiset(long budget = 65536) const {
        std::multiset<Rat> vs;
        for (auto& e : elements(budget)) vs.insert(q(e));
        return vs;
    }

    int length() const { return ngen(); }
    int p_length(const Int& p) const {
        int c = 0;
        for (auto& d : orders)
            if (d % p == 0) ++c;
        return c;
    }
    // parity delta: 1 iff some order-2 element has square +-1/2
    int parity() const {
        std::vector<int> idx;
        for (int i = 0; i < ngen(); ++i)
            if (mod_pos(orders[i], 2) == 0) idx.push_back(i);
        long cnt = 1L << idx.size();
        for (long mask = 1; mask < cnt; ++mask) {
            FqfElem x = zero();
            for (size_t t = 0; t < idx.size(); ++t)
                if (mask & (1L << t)) x[idx[t]] = orders[idx[t]] / 2;
            Rat v = q(x);
            if (v == Rat(1, 2) || v == Rat(3, 2)) return 1;
        }
        return 0;
    }
};

inline Fqf fqf_negate(const Fqf& f) {
    QMat m = f.qm;
    for (auto& x : m.a) x = -x;
    return Fqf(f.orders, m);
}

inline Fqf fqf_direct_sum(const Fqf& a, const Fqf& b) {
    std::vector<Int> ords;
    int n = a.ngen() + b.ngen();
    QMat m(n, n);
    for (int i = 0; i < a.ngen(); ++i)
        for (int j = 0; j < a.ngen(); ++j) m(i, j) = a.qm(i, j);
    for (int i = 0; i < b.ngen(); ++i)
        for (int j = 0; j < b.ngen(); ++j) m(a.ngen() + i, a.ngen() + j) = b.qm(i, j);
    ords.insert(ords.end(), a.orders.begin(), a.orders.end());
    ords.insert(ords.end(), b.orders.begin(), b.orders.end());
    // restore divisor chain by sorting generators (they stay orthogonal blocks)
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(),
                     [&](int x, int y) { return ords[x] < ords[y]; });
    // sorting alone does not produce a divisor chain in general; rebuild via
    // the subgroup machinery would be overkill -- instead relax the chain
    // requirement by SNF-normalizing below when needed.
    std::vector<Int> oo(n);
    QMat mm(n, n);
    for (int i = 0; i < n; ++i) {
        oo[i] = ords[perm[i]];
        for (int j = 0; j < n; ++j) mm(i, j) = m(perm[i], perm[j]);
    }
    // If the sorted orders already form a chain, done. Otherwise normalize
    // through the generic quotient construction (identity relations).
    bool chain = true;
    for (int i = 1; i < n; ++i)
        if (oo[i] % oo[i - 1] != 0) { chain = false; break; }
    if (chain) return Fqf(oo, mm);
    // normalize: treat as quotient of Z^n by diag(oo) with SNF
    ZMat rel(n, n);
    for (int i = 0; i < n; ++i) rel(i, i) = oo[i];
    SnfResult s = snf(rel);
    // new generators: rows of v^{-T}? use the standard quotient recipe below
    // (shared with subgroup_basis); here delegate to it.
    // Build a temporary Fqf without the chain requirement is impossible, so
    // construct via explicit element arithmetic:
    // new_gen_j = sum_i (Vinv)(j,i) * e_i with order D_jj.
    QMat vq = to_q(s.v);
    QMat vinv = q_inverse(vq);
    std::vector<Int> ords2;
    std::vector<std::vector<Int>> gens;
    for (int j = 0; j < n; ++j) {
        if (s.d(j, j) <= 1) continue;
        ords2.push_back(s.d(j, j));
        std::vector<Int> g(n);
        for (int i = 0; i < n; ++i) {
            require(vinv(j, i).get_den() == 1, "fqf_direct_sum: non-integral generator");
            g[i] = vinv(j, i).get_num();
        }
        gens.push_back(g);
    }
    int k = (int)ords2.size();
    QMat qm2(k, k);
    // evaluate q/b in the (oo, mm) presentation via ad-hoc lambdas
    auto evq = [&](const std::vector<Int>& x) {
        Rat v = 0;
        for (int i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            v += Rat(x[i] * x[i]) * mm(i, i);
            for (int j2 = i + 1; j2 < n; ++j2)
                if (x[j2] != 0) v += Rat(2 * x[i] * x[j2]) * mm(i, j2);
        }
        return rat_mod(v, 2);
    };
    auto evb = [&](const std::vector<Int>& x, const std::vector<Int>& y) {
        Rat v = 0;
        for (int i = 0; i < n; ++i)
            for (int j2 = 0; j2 < n; ++j2) {
                if (x[i] == 0 || y[j2] == 0) continue;
                Rat bij = (i == j2) ? rat_mod(mm(i, i), 1) : mm(i, j2);
                v += Rat(x[i] * y[j2]) * bij;
            }
        return rat_mod(v, 1);
    };
    for (int i = 0; i < k; ++i) {
        qm2(i, i) = evq(gens[i]);
        for (int j = i + 1; j < k; ++j) {
            qm2(i, j) = evb(gens[i], gens[j]);
            qm2(j, i) = qm2(i, j);
        }
    }
    return Fqf(ords2, qm2);
}

// --- discriminant group of a lattice ---

struct DiscGroup {
    Fqf q;
    QMat gens;  // rows: generator vectors in L^dual, ambient rational coordinates
    ZMat umat;  // SNF transform used for projection
    std::vector<Int> all_divisors;
    std::vector<int> kept;  // indices with divisor > 1
};

inline DiscGroup discriminant_group(const Lattice& L) {
    int n = L.rank();
    DiscGroup out;
    if (n == 0) {
        out.q = Fqf::trivial();
        out.gens = QMat(0, 0);
        out.umat = ZMat(0, 0);
        return out;
    }
    SnfResult s = snf(L.gram());
    out.umat = s.u;
    QMat ginv = q_inverse(to_q(L.gram()));
    QMat uinv = q_inverse(to_q(s.u));
    QMat winv = mul(ginv, uinv);  // columns are generator vectors
    std::vector<Int> ords;
    for (int i = 0; i < n; ++i) {
        out.all_divisors.push_back(s.d(i, i));
        if (s.d(i, i) > 1) {
            out.kept.push_back(i);
            ords.push_back(s.d(i, i));
        }
    }
    int k = (int)ords.size();
    out.gens = QMat(k, n);
    for (int t = 0; t < k; ++t)
        for (int j = 0; j < n; ++j) out.gens(t, j) = winv(j, out.kept[t]);
    QMat qm(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            Rat v = 0;
            for (int a = 0; a < n; ++a)
                for (int b2 = 0; b2 < n; ++b2)
                    v += out.gens(i, a) * Rat(L.gram()(a, b2)) * out.gens(j, b2);
            qm(i, j) = (i == j) ? rat_mod(v, 2) : rat_mod(v, 1);
        }
    out.q = Fqf(ords, qm);
    require(out.q.size() == L.abs_det(), "discriminant group order mismatch");
    return out;
}

// Class of a rational vector r in L^dual (row, ambient coords) inside the
// discriminant group.
inline FqfElem disc_project(const Lattice& L, const DiscGroup& D, const std::vector<Rat>& r) {
    int n = L.rank();
    std::vector<Rat> gr(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gr[i] += Rat(L.gram()(i, j)) * r[j];
    for (auto& x : gr) require(x.get_den() == 1, "disc_project: vector not in dual lattice");
    std::vector<Int> y(n);
    for (int i = 0; i < n; ++i) {
        Int s = 0;
        for (int j = 0; j < n; ++j) s += D.umat(i, j) * gr[j].get_num();
        y[i] = s;
    }
    FqfElem e(D.kept.size());
    for (size_t t = 0; t < D.kept.size(); ++t)
        e[t] = mod_pos(y[D.kept[t]], D.q.orders[t]);
    return e;
}

inline Fqf fqf_of(const Lattice& L) { return discriminant_group(L).q; }

// --- maps between forms ---

struct FqfMap {
    ZMat img;  // row i = image of generator i, coordinates in the target
};

inline FqfElem apply_map(const Fqf& src, const Fqf& tgt, const FqfMap& f, const FqfElem& x) {
    FqfElem y = tgt.zero();
    for (int i = 0; i < src.ngen(); ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < tgt.ngen(); ++j)
            y[j] = mod_pos(y[j] + x[i] * f.img(i, j), tgt.orders[j]);
    }
    return y;
}

inline FqfMap compose(const Fqf& a, const Fqf& b, const Fqf& c, const FqfMap& f /*a->b*/,
                      const FqfMap& g /*b->c*/) {
    ZMat m(a.ngen(), c.ngen());
    for (int i = 0; i < a.ngen(); ++i) {
        FqfElem gi(a.ngen(), 0);
        gi[i] = 1;
        FqfElem y = apply_map(b, c, g, apply_map(a, b, f, gi));
        for (int j = 0; j < c.ngen(); ++j) m(i, j) = y[j];
    }
    return {m};
}

inline bool map_is_identity(const Fqf& f, const FqfMap& m) {
    for (int i = 0; i < f.ngen(); ++i) {
        FqfElem gi(f.ngen(), 0);
        gi[i] = 1;
        FqfElem y = apply_map(f, f, m, gi);
        if (y != gi) return false;
    }
    return true;
}

// --- subgroups ---

// Subgroup of an fqf represented by the integer lattice
// diag(orders) Z^k <= span <= Z^k of generator coordinates.
struct FqfSubgroup {
    ZMat hnf;  // full-rank k x k HNF basis of the lattice
};

inline FqfSubgroup subgroup_from_gens(const Fqf& f, const ZMat& gens) {
    int k = f.ngen();
    ZMat stack(gens.r + k, k);
    for (int i = 0; i < gens.r; ++i)
        for (int j = 0; j < k; ++j) stack(i, j) = gens(i, j);
    for (int i = 0; i < k; ++i) stack(gens.r + i, i) = f.orders[i];
    ZMat h = hnf_rows(stack);
    ZMat out(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out(i, j) = h(i, j);
    return {out};
}

inline FqfSubgroup subgroup_trivial(const Fqf& f) {
    return subgroup_from_gens(f, ZMat(0, f.ngen()));
}
inline FqfSubgroup subgroup_full(const Fqf& f) {
    return {ZMat::identity(f.ngen())};
}

inline Int subgroup_order(const Fqf& f, const FqfSubgroup& s) {
    Int num = f.size();
    Int den = 1;
    for (int i = 0; i < s.hnf.r; ++i) den *= s.hnf(i, i);
    require(den != 0 && num % den == 0, "subgroup_order: bad lattice");
    return num / den;
}

inline bool subgroup_contains(const Fqf& f, const FqfSubgroup& s, const FqfElem& x) {
    // back-substitution against the upper-triangular HNF basis
    std::vector<Int> v(x.begin(), x.end());
    int k = f.ngen();
    for (int i = k - 1; i >= 0; --i) {
        if (v[i] == 0) continue;
        if (s.hnf(i, i) == 0) return false;
        if (v[i] % s.hnf(i, i) != 0) return false;
        Int c = v[i] / s.hnf(i, i);
        for (int j = 0; j <= i; ++j) v[j] -= c * s.hnf(i, j);
    }
    for (auto& t : v)
        if (t != 0) return false;
    return true;
}

inline bool subgroup_equal(const FqfSubgroup& a, const FqfSubgroup& b) {
    return a.hnf == b.hnf;
}

// Independent generators (with orders) of a subgroup.
struct SubgroupBasis {
    std::vector<Int> orders;
    std::vector<FqfElem> gens;
};

inline SubgroupBasis subgroup_basis(const Fqf& f, const FqfSubgroup& s) {
    int k = f.ngen();
    SubgroupBasis out;
    if (k == 0) return out;
    // S = rowspan(B) / diag(m) Z^k; express diag(m) in basis B
    QMat binv = q_inverse(to_q(s.hnf));
    ZMat c(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            Rat v = Rat(f.orders[i]) * binv(i, j);
            require(v.get_den() == 1, "subgroup_basis: non-integral relation");
            c(i, j) = v.get_num();
        }
    SnfResult sn = snf(c);
    QMat vinv = q_inverse(to_q(sn.v));
    for (int j = 0; j < k; ++j) {
        Int d = sn.d(j, j);
        if (d <= 1) continue;
        // generator in B-coordinates: row j of v^{-1}; lift to ambient coords
        FqfElem g(k, 0);
        for (int t = 0; t < k; ++t) {
            require(vinv(j, t).get_den() == 1, "subgroup_basis: non-integral generator");
            Int coef = vinv(j, t).get_num();
            for (int a = 0; a < k; ++a) g[a] += coef * s.hnf(t, a);
        }
        out.orders.push_back(d);
        out.gens.push_back(f.reduce(g));
    }
    // ascending orders for determinism
    std::vector<int> perm(out.orders.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = (int)i;
    std::stable_sort(perm.begin(), perm.end(),
                     [&](int a, int b2) { return out.orders[a] < out.orders[b2]; });
    SubgroupBasis sorted;
    for (int p : perm) {
        sorted.orders.push_back(out.orders[p]);
        sorted.gens.push_back(out.gens[p]);
    }
    return sorted;
}

// The form restricted to a subgroup, as a standalone Fqf (orders normalized).
inline Fqf subgroup_form(const Fqf& f, const FqfSubgroup& s) {
    SubgroupBasis b = subgroup_basis(f, s);
    // normalize into divisor chain via SNF of diag(orders) relations if needed
    int k = (int)b.orders.size();
    QMat qm(k, k);
    for (int i = 0; i < k; ++i) {
        qm(i, i) = f.q(b.gens[i]);
        for (int j = i + 1; j < k; ++j) {
            qm(i, j) = f.b(b.gens[i], b.gens[j]);
            qm(j, i) = qm(i, j);
        }
    }
    // SNF divisors already form a chain
    for (int i = 1; i < k; ++i)
        require(b.orders[i] % b.orders[i - 1] == 0, "subgroup_form: broken divisor chain");
    return Fqf(b.orders, qm);
}

// Orthogonal complement of a subgroup with respect to b.
inline FqfSubgroup subgroup_orthogonal(const Fqf& f, const FqfSubgroup& s) {
    SubgroupBasis sb = subgroup_basis(f, s);
    int k = f.ngen();
    int t = (int)sb.gens.size();
    if (t == 0) return subgroup_full(f);
    // constraints: for each generator g_t: b(x, g_t) integral
    // coefficients c[t][j] = M_t * b(e_j, g_t) with M_t = common denominator
    std::vector<Int> mods(t);
    ZMat cmat(t, k);
    for (int a = 0; a < t; ++a) {
        std::vector<Rat> row(k);
        Int den = 1;
        for (int j = 0; j < k; ++j) {
            FqfElem ej(k, 0);
            ej[j] = 1;
            row[j] = f.b(ej, sb.gens[a]);
            den = lcm(den, Int(row[j].get_den()));
        }
        mods[a] = den;
        for (int j = 0; j < k; ++j) {
            Rat v = row[j] * Rat(den);
            cmat(a, j) = v.get_num();
        }
    }
    // solve { x : c x^T = diag(mods) y for some y }
    ZMat big(k + t, t);
    for (int j = 0; j < k; ++j)
        for (int a = 0; a < t; ++a) big(j, a) = cmat(a, j);
    for (int a = 0; a < t; ++a) big(k + a, a) = -mods[a];
    ZMat ker = left_kernel(big);
    ZMat gens(ker.r, k);
    for (int i = 0; i < ker.r; ++i)
        for (int j = 0; j < k; ++j) gens(i, j) = ker(i, j);
    return subgroup_from_gens(f, gens);
}

// All subgroups (element-index representation), ascending canonical order.
inline std::vector<FqfSubgroup> subgroups(const Fqf& f, long budget = 4096) {
    require(f.size() <= budget, "subgroups: budget exceeded");
    long n = f.size().get_si();
    std::vector<FqfElem> elems;
    for (long i = 0; i < n; ++i) elems.push_back(f.elem_at(i));
    std::set<std::vector<long>> seen;
    std::vector<std::vector<long>> queue;
    std::vector<long> triv = {0};
    seen.insert(triv);
    queue.push_back(triv);
    for (size_t head = 0; head < queue.size(); ++head) {
        std::vector<long> cur = queue[head];
        std::set<long> curset(cur.begin(), cur.end());
        for (long e = 1; e < n; ++e) {
            if (curset.count(e)) continue;
            // closure = cur + multiples of e
            std::set<long> nxt;
            FqfElem base = elems[e];
            Int ord = f.elem_order(base);
            for (long s : cur) {
                FqfElem acc = elems[s];
                for (Int j = 0; j < ord; ++j) {
                    FqfElem v = f.add(elems[s], f.scale(j, base));
                    nxt.insert(f.index_of(v));
                }
            }
            std::vector<long> key(nxt.begin(), nxt.end());
            if (seen.insert(key).second) queue.push_back(key);
        }
    }
    std::sort(queue.begin(), queue.end(), [](const auto& a, const auto& b2) {
        if (a.size() != b2.size()) return a.size() < b2.size();
        return a < b2;
    });
    std::vector<FqfSubgroup> out;
    for (auto& q : queue) {
        ZMat g((int)q.size(), f.ngen());
        for (size_t i = 0; i < q.size(); ++i) {
            FqfElem e = f.elem_at(q[i]);
            for (int j = 0; j < f.ngen(); ++j) g((int)i, j) = e[j];
        }
        out.push_back(subgroup_from_gens(f, g));
    }
    // HNF keys are unique per subgroup; dedup and sort canonically
    std::sort(out.begin(), out.end(),
              [](const FqfSubgroup& a, const FqfSubgroup& b2) { return lex_less(a.hnf, b2.hnf); });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const FqfSubgroup& a, const FqfSubgroup& b2) {
                              return a.hnf == b2.hnf;
                          }),
              out.end());
    return out;
}

// --- isometries between forms and subgroups ---

namespace detail {

// Enumerate group monomorphisms of (orders,gens) of src-subgroup into tgt with
// q(f x) = sign * q(x); collects images of the subgroup basis.
inline void hom_backtrack(const Fqf& tgt, const std::vector<Int>& sorders,
                          const std::vector<Rat>& sq, const std::vector<std::vector<Rat>>& sb,
                          int pos, std::vector<FqfElem>& chosen, int sign,
                          const std::vector<std::vector<FqfElem>>& candidates,
                          const std::function<bool(const std::vector<FqfElem>&)>& emit) {
    if (pos == (int)sorders.size()) {
        if (!emit(chosen)) return;
        return;
    }
    for (const FqfElem& y : candidates[pos]) {
        bool ok = true;
        for (int j = 0; j < pos && ok; ++j) {
            Rat want = rat_mod(Rat(sign) * sb[j][pos], 1);
            if (tgt.b(chosen[j], y) != want) ok = false;
        }
        if (!ok) continue;
        chosen.push_back(y);
        hom_backtrack(tgt, sorders, sq, sb, pos + 1, chosen, sign, candidates, emit);
        chosen.pop_back();
    }
}

}  // namespace detail

// Enumerate isometries (sign=+1) or anti-isometries (sign=-1) from a subgroup
// S <= src into tgt (injective, q(fx) = sign q(x)). Calls emit for each; stop
// when emit returns false.
inline void enumerate_subgroup_isometries(
    const Fqf& src, const FqfSubgroup& S, const Fqf& tgt, int sign,
    const std::function<bool(const SubgroupBasis&, const std::vector<FqfElem>&)>& emit,
    long budget = 65536) {
    SubgroupBasis sb = subgroup_basis(src, S);
    int t = (int)sb.orders.size();
    if (t == 0) {
        emit(sb, {});
        return;
    }
    require(tgt.size() <= budget, "enumerate_subgroup_isometries: budget exceeded");
    std::vector<Rat> sq(t);
    std::vector<std::vector<Rat>> sbl(t, std::vector<Rat>(t));
    for (int i = 0; i < t; ++i) {
        sq[i] = src.q(sb.gens[i]);
        for (int j = 0; j < t; ++j) sbl[i][j] = src.b(sb.gens[i], sb.gens[j]);
    }
    // candidate buckets per position
    long n = tgt.size().get_si();
    std::vector<std::vector<FqfElem>> cand(t);
    for (long e = 0; e < n; ++e) {
        FqfElem y = tgt.elem_at(e);
        Int oy = tgt.elem_order(y);
        Rat qy = tgt.q(y);
        for (int i = 0; i < t; ++i) {
            if (oy != sb.orders[i]) continue;
            Rat want = rat_mod(Rat(sign) * sq[i], 2);
            if (qy == want) cand[i].push_back(y);
        }
    }
    Int sorder = 1;
    for (auto& o : sb.orders) sorder *= o;
    std::vector<FqfElem> chosen;
    bool stop = false;
    std::function<bool(const std::vector<FqfElem>&)> check =
        [&](const std::vector<FqfElem>& imgs) -> bool {
        if (stop) return false;
        // injectivity: image subgroup order must equal |S|
        ZMat g(t, tgt.ngen());
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < tgt.ngen(); ++j) g(i, j) = imgs[i][j];
        FqfSubgroup im = subgroup_from_gens(tgt, g);
        if (subgroup_order(tgt, im) != sorder) return true;
        if (!emit(sb, imgs)) { stop = true; return false; }
        return true;
    };
    detail::hom_backtrack(tgt, sb.orders, sq, sbl, 0, chosen, sign, cand, check);
}

// Full orthogonal group as maps on the standard generators.
inline std::vector<FqfMap> orthogonal_group(const Fqf& f, long budget = 16384) {
    require(f.size() <= budget, "orthogonal_group: budget exceeded");
    std::vector<FqfMap> out;
    enumerate_subgroup_isometries(
        f, subgroup_full(f), f, +1,
        [&](const SubgroupBasis& sb, const std::vector<FqfElem>& imgs) {
            // images of subgroup basis -> express on standard generators
            // subgroup_full basis == standard generators in ascending order
            ZMat m(f.ngen(), f.ngen());
            for (int i = 0; i < f.ngen(); ++i) {
                // the full-subgroup basis is the standard generator list
                FqfElem ei(f.ngen(), 0);
                ei[i] = 1;
                int src_idx = -1;
                for (size_t t = 0; t < sb.gens.size(); ++t)
                    if (sb.gens[t] == ei) { src_idx = (int)t; break; }
                require(src_idx >= 0, "orthogonal_group: unexpected subgroup basis");
                for (int j = 0; j < f.ngen(); ++j) m(i, j) = imgs[src_idx][j];
            }
            out.push_back({m});
            return true;
        },
        budget);
    // identity first, deterministic order after
    std::sort(out.begin(), out.end(),
              [](const FqfMap& a, const FqfMap& b2) { return lex_less(a.img, b2.img); });
    std::stable_partition(out.begin(), out.end(),
                          [&](const FqfMap& m) { return map_is_identity(f, m); });
    return out;
}

inline std::optional<FqfMap> fqf_isomorphism(const Fqf& a, const Fqf& b, long budget = 16384) {
    if (a.orders != b.orders) return std::nullopt;
    if (a.ngen() == 0) return FqfMap{ZMat(0, 0)};
    require(a.size() <= budget, "fqf_isomorphism: budget exceeded");
    if (a.value_multiset() != b.value_multiset()) return std::nullopt;
    std::optional<FqfMap> found;
    enumerate_subgroup_isometries(
        a, subgroup_full(a), b, +1,
        [&](const SubgroupBasis& sb, const std::vector<FqfElem>& imgs) {
            ZMat m(a.ngen(), b.ngen());
            for (int i = 0; i < a.ngen(); ++i) {
                FqfElem ei(a.ngen(), 0);
                ei[i] = 1;
                int idx = -1;
                for (size_t t = 0; t < sb.gens.size(); ++t)
                    if (sb.gens[t] == ei) { idx = (int)t; break; }
                require(idx >= 0, "fqf_isomorphism: unexpected subgroup basis");
                for (int j = 0; j < b.ngen(); ++j) m(i, j) = imgs[idx][j];
            }
            found = FqfMap{m};
            return false;
        },
        budget);
    return found;
}

inline bool fqf_isomorphic(const Fqf& a, const Fqf& b, long budget = 16384) {
    return fqf_isomorphism(a, b, budget).has_value();
}

// Orbit representatives of subgroups under a set of automorphisms.
inline std::vector<FqfSubgroup> orbit_representatives(const Fqf& f,
                                                      const std::vector<FqfSubgroup>& subs,
                                                      const std::vector<FqfMap>& aut) {
    auto key = [](const FqfSubgroup& s) { return s.hnf; };
    std::set<std::string> used;
    auto tostr = [&](const ZMat& m) { return to_string(m); };
    std::vector<FqfSubgroup> reps;
    for (auto& s : subs) {
        if (used.count(tostr(key(s)))) continue;
        // compute orbit
        std::vector<FqfSubgroup> orbit{s};
        std::set<std::string> os{tostr(key(s))};
        for (size_t h = 0; h < orbit.size(); ++h) {
            SubgroupBasis sb = subgroup_basis(f, orbit[h]);
            for (auto& g : aut) {
                ZMat gi((int)sb.gens.size(), f.ngen());
                for (size_t i = 0; i < sb.gens.size(); ++i) {
                    FqfElem y = apply_map(f, f, g, sb.gens[i]);
                    for (int j = 0; j < f.ngen(); ++j) gi((int)i, j) = y[j];
                }
                FqfSubgroup t = subgroup_from_gens(f, gi);
                if (os.insert(tostr(key(t))).second) orbit.push_back(t);
            }
        }
        // representative: lexicographically minimal HNF in the orbit
        FqfSubgroup rep = orbit[0];
        for (auto& t : orbit)
            if (lex_less(t.hnf, rep.hnf)) rep = t;
        reps.push_back(rep);
        for (auto& t : orbit) used.insert(tostr(key(t)));
    }
    std::sort(reps.begin(), reps.end(),
              [](const FqfSubgroup& a, const FqfSubgroup& b2) { return lex_less(a.hnf, b2.hnf); });
    return reps;
}

// --- graph quotient (gluing) ---

// gamma maps the subgroup generated by h_gens (rows, qM coords) onto its image
// in qN; gamma_imgs row t = image of h_gens row t. Requires q_N(gamma x) = -q_M(x).
inline Fqf graph_quotient(const Fqf& qM, const Fqf& qN, const ZMat& h_gens,
                          const ZMat& gamma_imgs) {
    require(h_gens.r == gamma_imgs.r, "graph_quotient: generator/image count mismatch");
    require(h_gens.c == qM.ngen() && gamma_imgs.c == qN.ngen(),
            "graph_quotient: coordinate shape mismatch");
    int t = h_gens.r;
    // well-definedness: relations of h_gens must map to relations
    {
        int k = qM.ngen();
        ZMat stack(t + k, k);
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < k; ++j) stack(i, j) = h_gens(i, j);
        for (int i = 0; i < k; ++i) stack(t + i, i) = qM.orders[i];
        ZMat ker = left_kernel(stack);  // rows (c | y)
        for (int r = 0; r < ker.r; ++r) {
            FqfElem img = qN.zero();
            for (int i = 0; i < t; ++i) {
                FqfElem gi(gamma_imgs.c);
                for (int j = 0; j < gamma_imgs.c; ++j) gi[j] = gamma_imgs(i, j);
                img = qN.add(img, qN.scale(ker(r, i), gi));
            }
            require(qN.is_zero(img), "graph_quotient: gamma not well-defined");
        }
    }
    // anti-isometry on generators (suffices by bilinearity)
    for (int i = 0; i < t; ++i) {
        FqfElem hi(qM.ngen()), gi(qN.ngen());
        for (int j = 0; j < qM.ngen(); ++j) hi[j] = h_gens(i, j);
        for (int j = 0; j < qN.ngen(); ++j) gi[j] = gamma_imgs(i, j);
        hi = qM.reduce(hi);
        gi = qN.reduce(gi);
        require(qN.q(gi) == rat_mod(-qM.q(hi), 2), "graph_quotient: gamma is not an anti-isometry");
        for (int i2 = 0; i2 < i; ++i2) {
            FqfElem hi2(qM.ngen()), gi2(qN.ngen());
            for (int j = 0; j < qM.ngen(); ++j) hi2[j] = h_gens(i2, j);
            for (int j = 0; j < qN.ngen(); ++j) gi2[j] = gamma_imgs(i2, j);
            require(qN.b(gi, qN.reduce(gi2)) == rat_mod(-qM.b(hi, qM.reduce(hi2)), 1),
                    "graph_quotient: gamma is not an anti-isometry (bilinear)");
        }
    }
    // ambient group qM + qN without reordering generators
    std::vector<Int> aords;
    aords.insert(aords.end(), qM.orders.begin(), qM.orders.end());
    aords.insert(aords.end(), qN.orders.begin(), qN.orders.end());
    int k = (int)aords.size();
    auto amb_q = [&](const std::vector<Int>& x) {
        FqfElem xm(qM.ngen()), xn(qN.ngen());
        for (int i = 0; i < qM.ngen(); ++i) xm[i] = x[i];
        for (int i = 0; i < qN.ngen(); ++i) xn[i] = x[qM.ngen() + i];
        return rat_mod(qM.q(qM.reduce(xm)) + qN.q(qN.reduce(xn)), 2);
    };
    auto amb_b = [&](const std::vector<Int>& x, const std::vector<Int>& y) {
        FqfElem xm(qM.ngen()), xn(qN.ngen()), ym(qM.ngen()), yn(qN.ngen());
        for (int i = 0; i < qM.ngen(); ++i) { xm[i] = x[i]; ym[i] = y[i]; }
        for (int i = 0; i < qN.ngen(); ++i) { xn[i] = x[qM.ngen() + i]; yn[i] = y[qM.ngen() + i]; }
        return rat_mod(qM.b(qM.reduce(xm), qM.reduce(ym)) + qN.b(qN.reduce(xn), qN.reduce(yn)), 1);
    };
    // graph lattice
    ZMat graph(t, k);
    for (int i = 0; i < t; ++i) {
        for (int j = 0; j < qM.ngen(); ++j) graph(i, j) = h_gens(i, j);
        for (int j = 0; j < qN.ngen(); ++j) graph(i, qM.ngen() + j) = gamma_imgs(i, j);
    }
    // isotropy of the graph (q on generators + pairwise b already checked)
    // orthogonal complement as integer lattice
    std::vector<Int> mods(t);
    ZMat cmat(t, k);
    for (int a = 0; a < t; ++a) {
        Int den = 1;
        std::vector<Rat> row(k);
        std::vector<Int> ga(k);
        for (int j = 0; j < k; ++j) ga[j] = graph(a, j);
        for (int j = 0; j < k; ++j) {
            std::vector<Int> ej(k, 0);
            ej[j] = 1;
            row[j] = amb_b(ej, ga);
            den = lcm(den, Int(row[j].get_den()));
        }
        mods[a] = den;
        for (int j = 0; j < k; ++j) { Rat scaled = row[j] * Rat(den); cmat(a, j) = scaled.get_num(); }
    }
    ZMat big(k + t, t);
    for (int j = 0; j < k; ++j)
        for (int a = 0; a < t; ++a) big(j, a) = cmat(a, j);
    for (int a = 0; a < t; ++a) big(k + a, a) = -mods[a];
    ZMat ker = left_kernel(big);
    ZMat perp_gens(ker.r + k, k);
    for (int i = 0; i < ker.r; ++i)
        for (int j = 0; j < k; ++j) perp_gens(i, j) = ker(i, j);
    for (int i = 0; i < k; ++i) perp_gens(ker.r + i, i) = aords[i];
    ZMat bp = hnf_rows(perp_gens);
    ZMat bperp(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) bperp(i, j) = bp(i, j);
    // gamma lattice inside perp
    ZMat gl(t + k, k);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < k; ++j) gl(i, j) = graph(i, j);
    for (int i = 0; i < k; ++i) gl(t + i, i) = aords[i];
    ZMat bg = hnf_rows(gl);
    ZMat bgam(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) bgam(i, j) = bg(i, j);
    // isotropy of Gamma: q vanishes on its basis, b pairwise integral
    for (int i = 0; i < k; ++i) {
        std::vector<Int> gi(k);
        for (int j = 0; j < k; ++j) gi[j] = bgam(i, j);
        require(amb_q(gi) == 0, "graph_quotient: graph not isotropic");
    }
    // express Gamma basis in perp basis
    QMat pinv = q_inverse(to_q(bperp));
    ZMat c = to_z(mul(to_q(bgam), pinv));
    SnfResult sn = snf(c);
    QMat vinv = q_inverse(to_q(sn.v));
    std::vector<Int> qords;
    std::vector<std::vector<Int>> qgens;  // ambient integer coords
    for (int j = 0; j < k; ++j) {
        Int d = sn.d(j, j);
        if (d <= 1) continue;
        qords.push_back(d);
        std::vector<Int> g(k, 0);
        for (int tcol = 0; tcol < k; ++tcol) {
            require(vinv(j, tcol).get_den() == 1, "graph_quotient: non-integral generator");
            Int coef = vinv(j, tcol).get_num();
            for (int a = 0; a < k; ++a) g[a] += coef * bperp(tcol, a);
        }
        qgens.push_back(g);
    }
    int kk = (int)qords.size();
    QMat qm(kk, kk);
    for (int i = 0; i < kk; ++i) {
        qm(i, i) = amb_q(qgens[i]);
        for (int j = i + 1; j < kk; ++j) {
            qm(i, j) = amb_b(qgens[i], qgens[j]);
            qm(j, i) = qm(i, j);
        }
    }
    // ascending divisor chain from SNF is automatic
    return Fqf(qords, qm);
}

// Gauss-sum signature of a nondegenerate form, mod 8.
inline int fqf_signature(const Fqf& f, long budget = 65536) {
    if (f.ngen() == 0) return 0;
    long n = f.size().get_si();
    require(n <= budget, "fqf_signature: budget exceeded");
    long double re = 0, im = 0;
    for (long i = 0; i < n; ++i) {
        Rat v = f.q(f.elem_at(i));
        long double ang = (long double)M_PI * v.get_d();
        re += cosl(ang);
        im += sinl(ang);
    }
    long double mag = sqrtl((long double)n);
    long double theta = atan2l(im, re);  // = 2 pi sigma / 8
    long double sig = theta * 4.0L / (long double)M_PI;
    long s = (long)llroundl(sig);
    // sanity: magnitude must match sqrt(|A|)
    long double got = sqrtl(re * re + im * im);
    require(fabsl(got - mag) < 1e-6L * mag + 1e-6L, "fqf_signature: degenerate form");
    require(fabsl(sig - (long double)s) < 1e-6L, "fqf_signature: non-integral signature");
    return (int)((s % 8 + 8) % 8);
}

}  // namespace og6lat
