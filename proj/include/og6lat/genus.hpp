// Genera of even lattices: genus symbols via signature + discriminant form,
// exhaustive enumeration of definite even lattices by reduced Gram scan,
// m-elementary lists, existence of lattices with prescribed invariants
// through local (p-adic) Jordan symbols, and model construction.
#pragma once

#include <og6lat/isometry.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

namespace og6lat {

struct GenusSymbol {
    Signature sig;
    Fqf q;
};

inline GenusSymbol genus_of(const Lattice& L) { return {L.signature(), fqf_of(L)}; }

inline bool same_genus(const Lattice& a, const Lattice& b) {
    if (!(a.signature() == b.signature())) return false;
    return fqf_isomorphic(fqf_of(a), fqf_of(b));
}

// --- reduced Gram scan for definite even lattices ---

namespace detail {

using i64 = long long;
using i128 = __int128;

inline i128 det_small(const std::vector<i64>& m, int n) {
    // Bareiss on a copy
    std::vector<i128> a(n * n);
    for (int i = 0; i < n * n; ++i) a[i] = m[i];
    i128 prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a[k * n + k] == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (a[i * n + k] != 0) { p = i; break; }
            if (p < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
        prev = a[k * n + k];
    }
    i128 d = a[(n - 1) * n + (n - 1)];
    return sign > 0 ? d : -d;
}

inline i128 leading_minor(const std::vector<i64>& g, int rank, int k) {
    std::vector<i64> sub(k * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub[i * k + j] = g[i * rank + j];
    return det_small(sub, k);
}

// Enumerate positive definite even Gram matrices in the Minkowski superset
// (sorted even diagonal, 2|b_ij| <= d_i, column sign canonicalized), calling
// emit for each matrix with 0 < det <= det_bound.
inline void scan_reduced(int rank, const Int& det_bound,
                         const std::function<void(const std::vector<i64>&, const Int&)>& emit) {
    require(rank >= 1 && rank <= 5, "scan_reduced: rank budget");
    // van der Waerden: prod(d_i) <= (4/3)^{r(r-1)/2} * det for Minkowski-reduced
    int e = rank * (rank - 1) / 2;
    Int num = det_bound;
    for (int i = 0; i < e; ++i) num *= 4;
    Int den = 1;
    for (int i = 0; i < e; ++i) den *= 3;
    Int prod_bound_z = num / den;
    require(prod_bound_z.fits_slong_p(), "scan_reduced: bound too large");
    i64 prod_bound = prod_bound_z.get_si();
    i64 dbound = det_bound.get_si();

    std::vector<i64> diag(rank);
    std::vector<i64> g(rank * rank, 0);

    // positions of off-diagonal entries in fill order (column-major)
    std::vector<std::pair<int, int>> pos;
    for (int j = 1; j < rank; ++j)
        for (int i = 0; i < j; ++i) pos.emplace_back(i, j);

    std::function<void()> fill_off = [&]() {
        std::function<void(size_t)> rec = [&](size_t t) {
            if (t == pos.size()) {
                i128 d = det_small(g, rank);
                if (d > 0 && d <= (i128)dbound) {
                    Int dz = (long)(i64)d;
                    emit(g, dz);
                }
                return;
            }
            auto [i, j] = pos[t];
            i64 lim = diag[i] / 2;
            bool column_end = (i == j - 1);
            for (i64 b = -lim; b <= lim; ++b) {
                // sign canonicalization: first nonzero entry of column j positive
                if (b < 0) {
                    bool earlier_nonzero = false;
                    for (int i2 = 0; i2 < i; ++i2)
                        if (g[i2 * rank + j] != 0) earlier_nonzero = true;
                    if (!earlier_nonzero) continue;
                }
                g[i * rank + j] = b;
                g[j * rank + i] = b;
                if (column_end) {
                    // positivity prune once a leading block is complete
                    i128 minor = leading_minor(g, rank, j + 1);
                    if (minor <= 0) continue;
                }
                rec(t + 1);
            }
            g[i * rank + j] = 0;
            g[j * rank + i] = 0;
        };
        rec(0);
    };

    std::function<void(int, i64, i64)> diag_rec = [&](int k, i64 prev, i64 prod) {
        if (k == rank) {
            for (int i = 0; i < rank; ++i)
                for (int j = 0; j < rank; ++j) g[i * rank + j] = (i == j) ? diag[i] : 0;
            if (rank == 1) {
                if (diag[0] <= dbound) emit(g, Int((long)diag[0]));
            } else {
                fill_off();
            }
            return;
        }
        int remaining = rank - k;
        for (i64 d = prev;; d += 2) {
            // smallest possible continuation: all later diagonal entries >= d
            i128 est = prod;
            bool fits = true;
            for (int i = 0; i < remaining; ++i) {
                est *= d;
                if (est > (i128)prod_bound) { fits = false; break; }
            }
            if (!fits) break;
            diag[k] = d;
            diag_rec(k + 1, d, prod * d);
        }
    };
    diag_rec(0, 2, 1);
}

}  // namespace detail

// Invariant profile used to pre-bucket isometry classes.
inline std::vector<long> vector_count_profile(const Lattice& L, int max_norm = 8) {
    Lattice neg = L.is_negative_definite() ? L : rescale(L, -1);
    std::set<Int> norms;
    for (int v = 2; v <= max_norm; v += 2) norms.insert(Int(-v));
    auto vecs = short_vectors(neg, norms);
    std::vector<long> profile(max_norm / 2, 0);
    for (auto& v : vecs) {
        Int nn = -neg.norm(v);
        long idx = nn.get_si() / 2 - 1;
        profile[idx] += 1;
    }
    return profile;
}

// All isometry classes of definite even lattices of the given rank with
// 0 < |det| and det_pred(|det|) true and |det| <= det_bound. Canonical order:
// (|det|, lexicographically minimal scanned Gram). Cached per key.
inline const std::vector<Lattice>& enumerate_definite_even(
    int rank, const Int& det_bound, bool negative, const std::string& filter_key = "all",
    const std::function<bool(const Int&)>& det_pred = [](const Int&) { return true; }) {
    require(rank >= 0 && rank <= 5, "enumerate_definite_even: rank budget exceeded");
    require((rank <= 3 && det_bound <= 4608) || det_bound <= 1100,
            "enumerate_definite_even: determinant budget exceeded");
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<std::vector<Lattice>>> cache;
    std::string key = std::to_string(rank) + "|" + det_bound.get_str() + "|" +
                      (negative ? "n" : "p") + "|" + filter_key;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto out = std::make_unique<std::vector<Lattice>>();
    if (rank == 0) {
        std::lock_guard<std::mutex> lock(mu);
        auto [it, ins] = cache.emplace(key, std::move(out));
        return *it->second;
    }
    // classes[det-string][profile] -> list of canonical (minimal) grams
    struct Class {
        ZMat min_gram;              // canonical positive gram (lex-min encountered)
        Lattice pos_lattice;        // a representative
        std::vector<long> profile;
    };
    std::map<Int, std::vector<Class>> by_det;
    detail::scan_reduced(rank, det_bound, [&](const std::vector<detail::i64>& g, const Int& d) {
        if (!det_pred(d)) return;
        ZMat gz(rank, rank);
        for (int i = 0; i < rank * rank; ++i) gz.a[i] = (long)g[i];
        Lattice cand(gz);
        auto profile = vector_count_profile(cand);
        auto& bucket = by_det[d];
        for (auto& cls : bucket) {
            if (cls.profile != profile) continue;
            if (isometric(cls.pos_lattice, cand)) {
                if (lex_less(gz, cls.min_gram)) cls.min_gram = gz;
                return;
            }
        }
        bucket.push_back({gz, cand, profile});
    });
    for (auto& [d, bucket] : by_det) {
        std::sort(bucket.begin(), bucket.end(),
                  [](const Class& a, const Class& b) { return lex_less(a.min_gram, b.min_gram); });
        for (auto& cls : bucket) {
            ZMat g = cls.min_gram;
            if (negative)
                for (auto& x : g.a) x = -x;
            out->push_back(Lattice(g));
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    auto [it, ins] = cache.emplace(key, std::move(out));
    return *it->second;
}

inline bool is_m_elementary(const Lattice& L, const Int& m) {
    Fqf q = fqf_of(L);
    if (q.ngen() == 0) return true;
    return m % q.orders.back() == 0;
}

// Negative definite even m-elementary lattices up to isometry, rank 1..max_rank,
// |det| <= det_bound; even ranks only when m is odd.
inline std::vector<Lattice> enumerate_m_elementary(const Int& m, int max_rank,
                                                   const Int& det_bound,
                                                   bool even_rank_only = false) {
    std::vector<Lattice> out;
    Int mr = 1;
    for (int r = 1; r <= max_rank; ++r) {
        mr *= m;
        if (even_rank_only && r % 2 == 1) continue;
        Int bound = det_bound < mr ? det_bound : mr;
        if (bound < 1) continue;
        Int mcopy = mr;
        auto pred = [mcopy](const Int& d) { return mcopy % d == 0; };
        const auto& all = enumerate_definite_even(r, bound, true, "div-m^r=" + mcopy.get_str(), pred);
        for (const auto& L : all)
            if (is_m_elementary(L, m)) out.push_back(L);
    }
    return out;
}

// Existence conditions for an involution on an even unimodular lattice of
// signature (l+,l-) with coinvariant lattice of signature (t+,t-), length a,
// parity delta. Implemented literally as the eight numbered conditions.
inline bool involution_coinvariant_exists(int lp, int lm, int tp, int tm, int a, int delta) {
    require(lp >= 0 && lm >= 0 && tp >= 0 && tm >= 0 && a >= 0, "nonnegative arguments required");
    require(delta == 0 || delta == 1, "delta must be 0 or 1");
    require((lp - lm) % 8 == 0, "unimodular even signature required");
    auto mod8 = [](int x) { return ((x % 8) + 8) % 8; };
    if (!(tp <= lp && tm <= lm)) return false;                                     // (1)
    if (!(a <= std::min(tp + tm, lp + lm - tp - tm))) return false;                // (2)
    if ((tp + tm + a) % 2 != 0) return false;                                      // (3)
    if (delta == 0 && mod8(tp - tm) % 4 != 0) return false;                        // (4)
    if (a == 0 && !(delta == 0 && mod8(tp - tm) == 0)) return false;               // (5)
    if (a == 1 && !(mod8(tp - tm) == 1 || mod8(tp - tm) == 7)) return false;       // (6)
    if (a == 2 && mod8(tp - tm) == 4 && delta != 0) return false;                  // (7)
    if (delta == 0 && (a == tp + tm || a == lp + lm - tp - tm) && mod8(tp - tm) != 0)
        return false;                                                              // (8)
    return true;
}

// --- local genus symbols and existence with prescribed invariants ---

namespace detail {

inline int legendre(const Int& a, const Int& p) {
    return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

// p-part of a form as a standalone Fqf (p | some order).
inline Fqf fqf_p_part(const Fqf& q, const Int& p) {
    std::vector<Int> ords;
    std::vector<FqfElem> gens;
    for (int i = 0; i < q.ngen(); ++i) {
        Int d = q.orders[i];
        Int pk = 1;
        while (d % p == 0) { d /= p; pk *= p; }
        if (pk == 1) continue;
        FqfElem g = q.zero();
        g[i] = d;  // cofactor: element of order p^k
        ords.push_back(pk);
        gens.push_back(g);
    }
    int k = (int)ords.size();
    QMat m(k, k);
    for (int i = 0; i < k; ++i) {
        m(i, i) = q.q(gens[i]);
        for (int j = i + 1; j < k; ++j) {
            m(i, j) = q.b(gens[i], gens[j]);
            m(j, i) = m(i, j);
        }
    }
    return Fqf(ords, m);
}

inline std::vector<Int> prime_divisors(Int n) {
    std::vector<Int> ps;
    n = abs(n);
    for (Int p = 2; p * p <= n; p += 1)
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) ps.push_back(n);
    return ps;
}

// Diagonalization of the p-part of a form for odd p: returns per-scale
// (rank, eps) data. Element-level Gram-Schmidt.
struct OddLocalData {
    std::map<int, std::pair<int, int>> scales;  // scale -> (rank, eps)
    int ell = 0;
    int excess = 0;  // p-excess of the scale>=1 part, mod 8
};

inline OddLocalData odd_local_data(const Fqf& q, const Int& p) {
    Fqf qp = fqf_p_part(q, p);
    OddLocalData out;
    if (qp.ngen() == 0) return out;
    require(qp.size() <= 65536, "odd_local_data: budget exceeded");
    // iteratively split off diagonal generators inside the shrinking subgroup
    FqfSubgroup cur = subgroup_full(qp);
    std::map<int, std::vector<Int>> units;  // scale -> unit numerators
    while (subgroup_order(qp, cur) > 1) {
        SubgroupBasis sb = subgroup_basis(qp, cur);
        // enumerate subgroup elements; find max order element with exact pairing
        Int maxord = 1;
        for (auto& o : sb.orders)
            if (o > maxord) maxord = o;
        // candidates of maximal order
        std::optional<FqfElem> pick;
        std::optional<FqfElem> gmax;
        // enumerate elements of cur via coefficients over basis
        std::vector<Int> idx(sb.orders.size(), 0);
        auto next = [&]() {
            size_t i = 0;
            while (i < idx.size() && idx[i] == sb.orders[i] - 1) { idx[i] = 0; ++i; }
            if (i == idx.size()) return false;
            idx[i] += 1;
            return true;
        };
        std::vector<FqfElem> elems;
        do {
            FqfElem e = qp.zero();
            for (size_t i = 0; i < idx.size(); ++i)
                e = qp.add(e, qp.scale(idx[i], sb.gens[i]));
            elems.push_back(e);
        } while (next());
        for (auto& e : elems) {
            if (qp.elem_order(e) != maxord) continue;
            if (!gmax) gmax = e;
            Rat bb = qp.b(e, e);
            if (Int(bb.get_den()) == maxord) { pick = e; break; }
        }
        if (!pick) {
            // pair gmax with some partner of exact pairing
            require(gmax.has_value(), "odd_local_data: no maximal-order element");
            std::optional<FqfElem> partner;
            for (auto& e : elems) {
                if (qp.elem_order(e) != maxord) continue;
                Rat bb = qp.b(*gmax, e);
                if (Int(bb.get_den()) == maxord) { partner = e; break; }
            }
            require(partner.has_value(), "odd_local_data: degenerate p-part");
            pick = qp.add(*gmax, *partner);
            require(qp.elem_order(*pick) == maxord &&
                        Int(qp.b(*pick, *pick).get_den()) == maxord,
                    "odd_local_data: gram-schmidt failed");
        }
        // record block
        int scale = 0;
        Int t = maxord;
        while (t % p == 0) { t /= p; ++scale; }
        Rat val = qp.q(*pick);  // denominator exactly maxord (odd)
        require(Int(val.get_den()) == maxord, "odd_local_data: unexpected q denominator");
        units[scale].push_back(val.get_num());
        // shrink: elements of cur orthogonal to pick
        {
            SubgroupBasis cb = subgroup_basis(qp, cur);
            // express constraint on coefficient vector over cb
            int tt = (int)cb.gens.size();
            Int den = 1;
            std::vector<Rat> row(tt);
            for (int i = 0; i < tt; ++i) {
                row[i] = qp.b(cb.gens[i], *pick);
                den = lcm(den, Int(row[i].get_den()));
            }
            ZMat big(tt + 1, 1);
            for (int i = 0; i < tt; ++i) {
                Rat scaled = row[i] * Rat(den);
                big(i, 0) = scaled.get_num();
            }
            big(tt, 0) = -den;
            ZMat ker2 = left_kernel(big);
            // rows (c | y): element = sum c_i cb.gens[i]
            ZMat gens(ker2.r + tt, qp.ngen());
            int rows = 0;
            for (int i = 0; i < ker2.r; ++i) {
                FqfElem e = qp.zero();
                for (int j = 0; j < tt; ++j) e = qp.add(e, qp.scale(ker2(i, j), cb.gens[j]));
                for (int j = 0; j < qp.ngen(); ++j) gens(rows, j) = e[j];
                ++rows;
            }
            // also relations: order*gen always in subgroup lattice
            ZMat gg(rows, qp.ngen());
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < qp.ngen(); ++j) gg(i, j) = gens(i, j);
            cur = subgroup_from_gens(qp, gg);
        }
    }
    for (auto& [scale, us] : units) {
        int eps = 1;
        for (auto& u : us) {
            int l = legendre(u, p);
            require(l != 0, "odd_local_data: non-unit");
            eps *= l;
        }
        out.scales[scale] = {(int)us.size(), eps};
        out.ell += (int)us.size();
        Int pk = 1;
        for (int i = 0; i < scale; ++i) pk *= p;
        Int contrib = Int((long)us.size()) * (pk - 1);
        out.excess = (int)((out.excess + contrib.get_si()) % 8);
        if (scale % 2 == 1 && eps == -1) out.excess = (out.excess + 4) % 8;
    }
    out.excess = ((out.excess % 8) + 8) % 8;
    return out;
}

// 2-adic elementary blocks.
inline Fqf block_odd2(int k, int a) {
    Int o = 1;
    for (int i = 0; i < k; ++i) o *= 2;
    QMat m(1, 1);
    m(0, 0) = Rat(a) / Rat(o);
    return Fqf({o}, m);
}
inline Fqf block_u2(int k) {
    Int o = 1;
    for (int i = 0; i < k; ++i) o *= 2;
    QMat m(2, 2);
    m(0, 1) = Rat(1) / Rat(o);
    m(1, 0) = m(0, 1);
    return Fqf({o, o}, m);
}
inline Fqf block_v2(int k) {
    Int o = 1, o2 = 2;
    for (int i = 0; i < k; ++i) { o *= 2; o2 *= 2; }
    // inverse of 3 modulo 2^{k+1}
    Int inv3 = 0;
    for (Int c = 1; c < o2; ++c)
        if (mod_pos(c * 3, o2) == 1) { inv3 = c; break; }
    QMat m(2, 2);
    m(0, 0) = Rat(mod_pos(2 * inv3, o2)) / Rat(o);
    m(1, 1) = m(0, 0);
    m(0, 1) = Rat(mod_pos(-inv3, o)) / Rat(o);
    m(1, 0) = m(0, 1);
    return Fqf({o, o}, m);
}

struct TwoAdicCombo {
    int det_unit = 1;  // mod 8 (odd part of scale>=1 block determinants)
    int oddity = 0;    // mod 8
};

// Enumerate 2-adic Jordan possibilities of the scale>=1 part matching q2.
inline std::vector<TwoAdicCombo> two_adic_combos(const Fqf& q2) {
    std::vector<TwoAdicCombo> result;
    // scale ranks forced by elementary divisors
    std::map<int, int> ranks;
    for (auto& d : q2.orders) {
        int k = 0;
        Int t = d;
        while (t % 2 == 0) { t /= 2; ++k; }
        require(t == 1, "two_adic_combos: not a 2-group");
        ranks[k] += 1;
    }
    if (ranks.empty()) {
        result.push_back({1, 0});
        return result;
    }
    // per-scale choices: multiset of pieces
    struct ScaleChoice {
        std::vector<int> odd_units;  // values in {1,3,5,7}
        int u_blocks = 0, v_blocks = 0;
    };
    std::map<int, std::vector<ScaleChoice>> per_scale;
    for (auto& [k, r] : ranks) {
        std::vector<ScaleChoice>& list = per_scale[k];
        for (int even_pairs = 0; 2 * even_pairs <= r; ++even_pairs) {
            int odd_count = r - 2 * even_pairs;
            // unordered multisets of odd units
            std::vector<std::vector<int>> unit_sets;
            std::function<void(int, int, std::vector<int>&)> gen = [&](int left, int minu,
                                                                       std::vector<int>& acc) {
                if (left == 0) {
                    unit_sets.push_back(acc);
                    return;
                }
                for (int u = minu; u <= 7; u += 2) {
                    acc.push_back(u);
                    gen(left - 1, u, acc);
                    acc.pop_back();
                }
            };
            std::vector<int> acc;
            gen(odd_count, 1, acc);
            for (auto& us : unit_sets)
                for (int v = 0; v <= even_pairs; ++v)
                    list.push_back({us, even_pairs - v, v});
        }
    }
    // cartesian product over scales; build candidate form and match
    std::vector<int> scales;
    for (auto& [k, r] : ranks) scales.push_back(k);
    auto q2_values = q2.value_multiset();
    std::vector<ScaleChoice const*> current(scales.size());
    std::function<void(size_t)> rec = [&](size_t si) {
        if (si == scales.size()) {
            Fqf cand = Fqf::trivial();
            int det_unit = 1, oddity = 0;
            for (size_t t = 0; t < scales.size(); ++t) {
                int k = scales[t];
                const ScaleChoice& ch = *current[t];
                for (int u : ch.odd_units) {
                    cand = fqf_direct_sum(cand, block_odd2(k, u));
                    det_unit = (det_unit * u) % 8;
                    oddity = (oddity + u) % 8;
                    if (k % 2 == 1 && (u % 8 == 3 || u % 8 == 5)) oddity = (oddity + 4) % 8;
                }
                for (int i = 0; i < ch.u_blocks; ++i) {
                    cand = fqf_direct_sum(cand, block_u2(k));
                    det_unit = (det_unit * 7) % 8;
                }
                for (int i = 0; i < ch.v_blocks; ++i) {
                    cand = fqf_direct_sum(cand, block_v2(k));
                    det_unit = (det_unit * 3) % 8;
                    if (k % 2 == 1) oddity = (oddity + 4) % 8;
                }
            }
            if (cand.orders != q2.orders) return;
            if (cand.value_multiset() != q2_values) return;
            if (!fqf_isomorphic(cand, q2)) return;
            result.push_back({det_unit, oddity});
            return;
        }
        for (const auto& ch : per_scale[scales[si]]) {
            current[si] = &ch;
            rec(si + 1);
        }
    };
    rec(0);
    // dedup
    std::sort(result.begin(), result.end(), [](const TwoAdicCombo& a, const TwoAdicCombo& b) {
        return std::tie(a.det_unit, a.oddity) < std::tie(b.det_unit, b.oddity);
    });
    result.erase(std::unique(result.begin(), result.end(),
                             [](const TwoAdicCombo& a, const TwoAdicCombo& b) {
                                 return a.det_unit == b.det_unit && a.oddity == b.oddity;
                             }),
                 result.end());
    return result;
}

}  // namespace detail

// Does an even lattice with signature (sp, sm) and discriminant form q exist?
inline bool exists_even_lattice(int sp, int sm, const Fqf& q) {
    require(sp >= 0 && sm >= 0, "exists_even_lattice: signature must be nonnegative");
    int n = sp + sm;
    if (n == 0) return q.ngen() == 0;
    Int dq = q.size();
    Int d = dq;
    if (sm % 2 == 1) d = -d;

    // odd primes
    int odd_excess_total = 0;
    for (const Int& p : detail::prime_divisors(dq)) {
        if (p == 2) continue;
        detail::OddLocalData loc = detail::odd_local_data(q, p);
        if (n < loc.ell) return false;
        int rank0 = n - loc.ell;
        // p-valuation and unit class of the determinant at p
        Int unit = abs(d);
        int v = 0;
        while (unit % p == 0) { unit /= p; ++v; }
        Int sunit = d < 0 ? Int(-unit) : unit;
        int want = detail::legendre(sunit, p);
        int have = 1;
        for (auto& [k, re] : loc.scales) have *= re.second;
        if (rank0 == 0 && want != have) return false;
        odd_excess_total = (odd_excess_total + loc.excess) % 8;
    }

    // p = 2
    Fqf q2 = detail::fqf_p_part(q, 2);
    int ell2 = q2.ngen();
    if (n < ell2) return false;
    int rank0 = n - ell2;
    if (rank0 % 2 != 0) return false;  // scale-0 part of an even lattice is even type
    Int unit2 = abs(d);
    while (unit2 % 2 == 0) unit2 /= 2;
    if (d < 0) unit2 = -unit2;
    int want2 = (int)mod_pos(unit2, 8).get_si();
    int target_oddity = ((sp - sm + odd_excess_total) % 8 + 8) % 8;
    for (const auto& combo : detail::two_adic_combos(q2)) {
        if (combo.oddity != target_oddity) continue;
        // achievable scale-0 det classes
        std::vector<int> scale0;
        if (rank0 == 0)
            scale0 = {1};
        else {
            int base = 1;
            for (int i = 0; i < rank0 / 2; ++i) base = (base * 7) % 8;
            scale0 = {base, (base * 3) % 8};
        }
        for (int s0 : scale0)
            if ((combo.det_unit * s0) % 8 == want2) return true;
    }
    return false;
}

inline bool exists_in_genus(const GenusSymbol& g) {
    return exists_even_lattice(g.sig.plus, g.sig.minus, g.q);
}

// All definite lattices in a genus (empty when the genus is empty).
inline std::vector<Lattice> enumerate_in_genus_definite(const GenusSymbol& g) {
    require(g.sig.plus == 0 || g.sig.minus == 0, "enumerate_in_genus_definite: definite only");
    int rank = g.sig.plus + g.sig.minus;
    if (rank == 0) return {Lattice::zero()};
    Int d = g.q.size();
    auto pred = [d](const Int& x) { return x == d; };
    const auto& all = enumerate_definite_even(rank, d, g.sig.plus == 0,
                                              "det=" + d.get_str(), pred);
    std::vector<Lattice> out;
    for (const auto& L : all)
        if (fqf_isomorphic(fqf_of(L), g.q)) out.push_back(L);
    return out;
}

// A model lattice with the given invariants: definite genera by enumeration,
// indefinite ones by assembling hyperbolic-style cores with definite parts.
inline std::optional<Lattice> build_model(int sp, int sm, const Fqf& q);

namespace detail {

inline std::vector<Lattice> core_blocks() {
    std::vector<Lattice> out;
    for (int n : {1, 2, 3, 4, 5, 6, 8}) {
        ZMat g(2, 2);
        g(0, 1) = n;
        g(1, 0) = n;
        out.push_back(Lattice(g));  // U(n)
        for (int m2 = 1; m2 < n; ++m2) {
            ZMat t(2, 2);
            t(0, 1) = n;
            t(1, 0) = n;
            t(1, 1) = 2 * m2;
            out.push_back(Lattice(t));  // twisted isotropic block
        }
    }
    return out;
}

}  // namespace detail

inline std::optional<Lattice> build_model(int sp, int sm, const Fqf& q) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<std::optional<Lattice>>> cache;
    std::string key = std::to_string(sp) + "," + std::to_string(sm) + "|";
    for (auto& o : q.orders) key += o.get_str() + ",";
    key += "|";
    for (auto& v : q.qm.a) key += v.get_str() + ";";
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    std::optional<Lattice> model;
    if (!exists_even_lattice(sp, sm, q)) {
        model = std::nullopt;
    } else if (sp == 0 && sm == 0) {
        model = Lattice::zero();
    } else if (sp == 0 || sm == 0) {
        auto all = enumerate_in_genus_definite({{sp, sm}, q});
        require(!all.empty(), "build_model: definite genus exists but enumeration is empty");
        model = all.front();
    } else {
        Int dq = q.size();
        static const std::vector<Lattice> cores = detail::core_blocks();
        int maxcores = std::min(sp, sm);
        // choose `a` rank-2 indefinite cores, then fill both definite sides
        std::function<std::optional<Lattice>(int, int, int, Int, std::vector<Lattice>&)> pick =
            [&](int a, int start, int todo, Int det_left,
                std::vector<Lattice>& acc) -> std::optional<Lattice> {
            if (todo == 0) {
                int p_left = sp - a, m_left = sm - a;
                if (det_left <= 0) return std::nullopt;
                for (Int dp = 1; dp <= det_left; ++dp) {
                    if (det_left % dp != 0) continue;
                    Int dm = det_left / dp;
                    std::vector<Lattice> pos_opts, neg_opts;
                    if (p_left == 0) {
                        if (dp != 1) continue;
                        pos_opts.push_back(Lattice::zero());
                    } else {
                        auto predp = [dp](const Int& x) { return x == dp; };
                        for (auto& P : enumerate_definite_even(p_left, dp, false,
                                                               "det=" + dp.get_str(), predp))
                            pos_opts.push_back(P);
                    }
                    if (m_left == 0) {
                        if (dm != 1) continue;
                        neg_opts.push_back(Lattice::zero());
                    } else {
                        auto predm = [dm](const Int& x) { return x == dm; };
                        for (auto& N : enumerate_definite_even(m_left, dm, true,
                                                               "det=" + dm.get_str(), predm))
                            neg_opts.push_back(N);
                    }
                    for (auto& P : pos_opts)
                        for (auto& N : neg_opts) {
                            std::vector<Lattice> sum = acc;
                            if (P.rank()) sum.push_back(P);
                            if (N.rank()) sum.push_back(N);
                            if (sum.empty()) continue;
                            Lattice cand = direct_sum(sum);
                            if (!(cand.signature() == Signature{sp, sm})) continue;
                            if (cand.abs_det() != dq) continue;
                            if (fqf_isomorphic(fqf_of(cand), q)) return cand;
                        }
                }
                return std::nullopt;
            }
            for (int ci = start; ci < (int)cores.size(); ++ci) {
                Int cd = cores[ci].abs_det();
                if (det_left % cd != 0) continue;
                acc.push_back(cores[ci]);
                auto got = pick(a, ci, todo - 1, det_left / cd, acc);
                acc.pop_back();
                if (got) return got;
            }
            return std::nullopt;
        };
        // a = 0 covers mixed sums of purely definite parts, e.g. [2] + 2[-2]
        for (int a = maxcores; a >= 0 && !model; --a) {
            std::vector<Lattice> acc;
            model = pick(a, 0, a, dq, acc);
        }
        require(model.has_value(),
                "build_model: genus exists but catalog construction failed");
    }
    std::lock_guard<std::mutex> lock(mu);
    auto [it, ins] = cache.emplace(key, std::make_unique<std::optional<Lattice>>(model));
    return *it->second;
}

}  // namespace og6lat
