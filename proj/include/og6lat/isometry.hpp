// Isometries of lattices: full orthogonal groups of definite lattices by
// backtracking over short vectors, isometry/embedding tests, invariant and
// coinvariant sublattices, discriminant actions, spinor norms, gluing.
#pragma once

#include <og6lat/fqf.hpp>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

namespace og6lat {

// Matrix acts on coordinates; column j holds the image of basis vector j.
struct Isometry {
    ZMat mat;

    bool operator==(const Isometry& o) const { return mat == o.mat; }
};

inline bool is_isometry_of(const Lattice& L, const ZMat& a) {
    if (a.r != L.rank() || a.c != L.rank()) return false;
    return mul(mul(a.transposed(), L.gram()), a) == L.gram();
}

inline Isometry identity_isometry(const Lattice& L) {
    return {ZMat::identity(L.rank())};
}

namespace detail {

// vectors of each required norm on a definite lattice
inline std::map<Int, std::vector<std::vector<Int>>> norm_buckets(const Lattice& L,
                                                                 const std::set<Int>& norms) {
    Lattice neg = L.is_negative_definite() ? L : rescale(L, -1);
    std::set<Int> wanted;
    for (auto& n : norms) wanted.insert(L.is_negative_definite() ? n : Int(-n));
    auto vecs = short_vectors(neg, wanted);
    std::map<Int, std::vector<std::vector<Int>>> out;
    for (auto& v : vecs) {
        Int n = L.norm(v);
        out[n].push_back(v);
    }
    return out;
}

struct MapSearch {
    const Lattice* src;
    const Lattice* tgt;
    std::vector<int> order;                       // source basis positions, search order
    std::vector<const std::vector<std::vector<Int>>*> cand;  // candidates per position
    std::function<bool(const ZMat&)> emit;        // return false to stop

    bool run() {
        std::vector<const std::vector<Int>*> chosen(order.size(), nullptr);
        return rec(0, chosen);
    }

    bool rec(size_t pos, std::vector<const std::vector<Int>*>& chosen) {
        if (pos == order.size()) {
            ZMat a(tgt->rank(), src->rank());
            for (size_t t = 0; t < order.size(); ++t)
                for (int i = 0; i < tgt->rank(); ++i) a(i, order[t]) = (*chosen[t])[i];
            return emit(a);
        }
        int j = order[pos];
        for (const auto& w : *cand[pos]) {
            bool ok = true;
            for (size_t t = 0; t < pos && ok; ++t) {
                if (tgt->inner(w, *chosen[t]) != src->gram()(j, order[t])) ok = false;
            }
            if (!ok) continue;
            chosen[pos] = &w;
            if (!rec(pos + 1, chosen)) return false;
        }
        return true;
    }
};

}  // namespace detail

// Enumerate all isometries src -> tgt between definite lattices of equal rank
// (emit returns false to stop early).
inline void enumerate_isometries(const Lattice& src, const Lattice& tgt,
                                 const std::function<bool(const ZMat&)>& emit) {
    require(src.is_definite() && tgt.is_definite(), "enumerate_isometries: definite required");
    if (src.rank() != tgt.rank() || src.det() != tgt.det() ||
        !(src.signature() == tgt.signature()))
        return;
    if (src.rank() == 0) {
        emit(ZMat(0, 0));
        return;
    }
    std::set<Int> norms;
    for (int i = 0; i < src.rank(); ++i) norms.insert(src.gram()(i, i));
    auto buckets = detail::norm_buckets(tgt, norms);
    for (auto& n : norms)
        if (!buckets.count(n)) return;
    detail::MapSearch s;
    s.src = &src;
    s.tgt = &tgt;
    std::vector<int> order(src.rank());
    for (int i = 0; i < src.rank(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return buckets[src.gram()(a, a)].size() < buckets[src.gram()(b, b)].size();
    });
    s.order = order;
    for (int j : order) s.cand.push_back(&buckets[src.gram()(j, j)]);
    s.emit = emit;
    s.run();
}

inline bool isometric(const Lattice& a, const Lattice& b) {
    if (a.rank() != b.rank() || a.det() != b.det() || !(a.signature() == b.signature()))
        return false;
    if (a.rank() == 0) return true;
    if (a.gram() == b.gram()) return true;
    require(a.is_definite() && b.is_definite(), "isometric: definite lattices required");
    bool found = false;
    enumerate_isometries(a, b, [&](const ZMat&) {
        found = true;
        return false;
    });
    return found;
}

// Full orthogonal group of a definite lattice (cached).
inline const std::vector<Isometry>& isometry_group(const Lattice& L) {
    require(L.is_definite(), "isometry_group: definite lattice required");
    require(L.rank() <= 6, "isometry_group: rank budget exceeded");
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<std::vector<Isometry>>> cache;
    std::string key = to_string(L.gram());
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto group = std::make_unique<std::vector<Isometry>>();
    if (L.rank() == 0) {
        group->push_back({ZMat(0, 0)});
    } else {
        enumerate_isometries(L, L, [&](const ZMat& a) {
            group->push_back({a});
            return true;
        });
        std::sort(group->begin(), group->end(),
                  [](const Isometry& x, const Isometry& y) { return lex_less(x.mat, y.mat); });
        ZMat id = ZMat::identity(L.rank());
        std::stable_partition(group->begin(), group->end(),
                              [&](const Isometry& g) { return g.mat == id; });
    }
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(key, std::move(group));
    return *it->second;
}

// First primitive embedding of definite C into definite N found, as a basis
// matrix (rows = images of C's basis in N's coordinates); nullopt if none.
inline std::optional<ZMat> find_primitive_embedding_definite(const Lattice& C, const Lattice& N) {
    if (C.rank() > N.rank()) return std::nullopt;
    if (C.rank() == 0) return ZMat(0, N.rank());
    require(C.is_definite() && N.is_definite(), "embedding search: definite required");
    if (!((C.is_negative_definite() && N.is_negative_definite()) ||
          (C.is_positive_definite() && N.is_positive_definite())))
        return std::nullopt;
    std::set<Int> norms;
    for (int i = 0; i < C.rank(); ++i) norms.insert(C.gram()(i, i));
    auto buckets = detail::norm_buckets(N, norms);
    for (auto& n : norms)
        if (!buckets.count(n)) return std::nullopt;
    detail::MapSearch s;
    s.src = &C;
    s.tgt = &N;
    std::vector<int> order(C.rank());
    for (int i = 0; i < C.rank(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return buckets[C.gram()(a, a)].size() < buckets[C.gram()(b, b)].size();
    });
    s.order = order;
    for (int j : order) s.cand.push_back(&buckets[C.gram()(j, j)]);
    std::optional<ZMat> found;
    s.emit = [&](const ZMat& a) {
        // rows of basis matrix = columns of a
        ZMat basis(C.rank(), N.rank());
        for (int t = 0; t < C.rank(); ++t)
            for (int i = 0; i < N.rank(); ++i) basis(t, i) = a(i, t);
        if (!is_primitive(N, basis)) return true;  // keep searching
        found = basis;
        return false;
    };
    s.run();
    return found;
}

inline bool exists_primitive_embedding_definite(const Lattice& C, const Lattice& N) {
    return find_primitive_embedding_definite(C, N).has_value();
}

// --- orders, invariant/coinvariant ---

inline int order_of(const Lattice& L, const Isometry& g, int cap = 240) {
    require(is_isometry_of(L, g.mat), "order_of: not an isometry");
    ZMat id = ZMat::identity(L.rank());
    ZMat p = g.mat;
    for (int k = 1; k <= cap; ++k) {
        if (p == id) return k;
        p = mul(p, g.mat);
    }
    throw MathError("order_of: cap exceeded (order > " + std::to_string(cap) + ")");
}

inline ZMat invariant_sublattice(const Lattice& L, const std::vector<Isometry>& gens) {
    int n = L.rank();
    if (gens.empty()) return ZMat::identity(n);
    ZMat stacked(n, n * (int)gens.size());
    for (size_t t = 0; t < gens.size(); ++t) {
        ZMat d = gens[t].mat;
        for (int i = 0; i < n; ++i) d(i, i) -= 1;
        // rows x with x (A - I)^T = 0, i.e. (A - I) x^T = 0
        ZMat dt = d.transposed();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) stacked(i, (int)t * n + j) = dt(i, j);
    }
    return left_kernel(stacked);
}

inline ZMat invariant_sublattice(const Lattice& L, const Isometry& g) {
    return invariant_sublattice(L, std::vector<Isometry>{g});
}

inline Sublattice coinvariant_sublattice(const Lattice& L, const std::vector<Isometry>& gens) {
    ZMat inv = invariant_sublattice(L, gens);
    return orthogonal_complement(L, inv);
}

inline Sublattice coinvariant_sublattice(const Lattice& L, const Isometry& g) {
    return coinvariant_sublattice(L, std::vector<Isometry>{g});
}

// --- discriminant action ---

inline FqfMap disc_action(const Lattice& L, const DiscGroup& D, const Isometry& g) {
    int k = D.q.ngen();
    ZMat m(k, k);
    for (int t = 0; t < k; ++t) {
        std::vector<Rat> w(L.rank());
        for (int j = 0; j < L.rank(); ++j) w[j] = D.gens(t, j);
        // image of row vector w under the isometry: w A^T
        std::vector<Rat> img(L.rank());
        for (int i = 0; i < L.rank(); ++i)
            for (int j = 0; j < L.rank(); ++j) img[i] += w[j] * Rat(g.mat(i, j));
        FqfElem e = disc_project(L, D, img);
        for (int j = 0; j < k; ++j) m(t, j) = e[j];
    }
    FqfMap f{m};
    // sanity: the action preserves q
    for (int t = 0; t < k; ++t) {
        FqfElem gi(k, 0);
        gi[t] = 1;
        require(D.q.q(apply_map(D.q, D.q, f, gi)) == D.q.qm(t, t),
                "disc_action: q not preserved");
    }
    return f;
}

enum class DiscScope { Full, PPart, Subgroup };

struct DiscTrivialityQuery {
    DiscScope scope = DiscScope::Full;
    Int p = 0;           // for PPart
    ZMat subgroup_gens;  // for Subgroup (rows in disc coords)
};

inline bool is_disc_trivial(const Lattice& L, const DiscGroup& D, const Isometry& g,
                            const DiscTrivialityQuery& query = {}) {
    FqfMap f = disc_action(L, D, g);
    const Fqf& q = D.q;
    auto fixes = [&](const FqfElem& e) { return apply_map(q, q, f, e) == q.reduce(e); };
    switch (query.scope) {
        case DiscScope::Full: {
            for (int t = 0; t < q.ngen(); ++t) {
                FqfElem gi(q.ngen(), 0);
                gi[t] = 1;
                if (!fixes(gi)) return false;
            }
            return true;
        }
        case DiscScope::PPart: {
            for (int t = 0; t < q.ngen(); ++t) {
                Int d = q.orders[t];
                Int pk = 1;
                while (d % query.p == 0) { d /= query.p; pk *= query.p; }
                if (pk == 1) continue;
                FqfElem gi(q.ngen(), 0);
                gi[t] = d;  // element of order p^k
                if (!fixes(gi)) return false;
            }
            return true;
        }
        case DiscScope::Subgroup: {
            for (int r = 0; r < query.subgroup_gens.r; ++r) {
                FqfElem e(q.ngen());
                for (int j = 0; j < q.ngen(); ++j) e[j] = query.subgroup_gens(r, j);
                if (!fixes(e)) return false;
            }
            return true;
        }
    }
    return false;
}

// --- spinor norm ---

// Convention: +1 on reflections in vectors of negative square.
inline int spinor_norm(const Lattice& L, const Isometry& g) {
    require(is_isometry_of(L, g.mat), "spinor_norm: not an isometry");
    int n = L.rank();
    QMat G = to_q(L.gram());
    QMat B = to_q(g.mat);
    QMat id = QMat::identity(n);
    int spin = 1;

    auto norm_of = [&](const std::vector<Rat>& v) {
        Rat s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += v[i] * G(i, j) * v[j];
        return s;
    };
    auto reflect = [&](const std::vector<Rat>& v) {
        // B <- rho_v * B ; accumulate spinor sign
        Rat vv = norm_of(v);
        std::vector<Rat> gv(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) gv[i] += G(i, j) * v[j];
        QMat rho = QMat::identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) rho(i, j) -= Rat(2) * v[i] * gv[j] / vv;
        B = mul(rho, B);
        spin *= (vv < 0) ? 1 : -1;
    };

    // candidate pool: small integer vectors
    std::vector<std::vector<Rat>> pool;
    for (int i = 0; i < n; ++i) {
        std::vector<Rat> e(n);
        e[i] = 1;
        pool.push_back(e);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int si : {1, -1}) {
                std::vector<Rat> e(n);
                e[i] = 1;
                e[j] = si;
                pool.push_back(e);
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                if (i == j || i == k) continue;
                std::vector<Rat> e(n);
                e[i] = 2;
                e[j] = 1;
                e[k] = 1;
                pool.push_back(e);
            }

    int guard = 3 * n + 16;
    while (!(B == id)) {
        require(guard-- > 0, "spinor_norm: factorization did not terminate");
        bool progressed = false;
        for (const auto& u : pool) {
            std::vector<Rat> bu(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) bu[i] += B(i, j) * u[j];
            std::vector<Rat> v(n);
            bool nz = false;
            for (int i = 0; i < n; ++i) {
                v[i] = bu[i] - u[i];
                if (v[i] != 0) nz = true;
            }
            if (!nz) continue;
            if (norm_of(v) != 0) {
                reflect(v);
                progressed = true;
                break;
            }
            // v isotropic: try the two-reflection route through u + Bu
            std::vector<Rat> w(n);
            bool wnz = false;
            for (int i = 0; i < n; ++i) {
                w[i] = bu[i] + u[i];
                if (w[i] != 0) wnz = true;
            }
            if (wnz && norm_of(w) != 0 && norm_of(u) != 0) {
                reflect(w);  // maps Bu to -u
                reflect(u);  // maps -u to u
                progressed = true;
                break;
            }
        }
        if (!progressed) {
            // degenerate situation (Eichler-type): compose with an anisotropic
            // reflection to break total isotropy, then continue
            bool broke = false;
            for (const auto& u : pool) {
                if (norm_of(u) != 0) {
                    reflect(u);
                    broke = true;
                    break;
                }
            }
            require(broke, "spinor_norm: no anisotropic vector found");
        }
    }
    return spin;
}

inline bool in_O_plus(const Lattice& L, const Isometry& g) { return spinor_norm(L, g) == +1; }

// --- gluing ---

// Extend g (on the sublattice spanned by basisM) and h (on basisN) to L when
// the direct sum map is integral on L; M and N must be complementary primitive
// sublattices.
inline std::optional<Isometry> glue_equivariant(const Lattice& L, const ZMat& basisM,
                                                const ZMat& basisN, const ZMat& gM,
                                                const ZMat& gN) {
    int n = L.rank();
    require(basisM.r + basisN.r == n, "glue_equivariant: ranks do not fill the host");
    ZMat B(n, n);
    for (int i = 0; i < basisM.r; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = basisM(i, j);
    for (int i = 0; i < basisN.r; ++i)
        for (int j = 0; j < n; ++j) B(basisM.r + i, j) = basisN(i, j);
    require(og6lat::det(B) != 0, "glue_equivariant: sublattices do not span");
    // ambient images of the stacked basis rows
    ZMat gMt = gM.transposed();
    ZMat gNt = gN.transposed();
    ZMat Bimg(n, n);
    ZMat mi = mul(gMt, basisM);
    ZMat ni = mul(gNt, basisN);
    for (int i = 0; i < basisM.r; ++i)
        for (int j = 0; j < n; ++j) Bimg(i, j) = mi(i, j);
    for (int i = 0; i < basisN.r; ++i)
        for (int j = 0; j < n; ++j) Bimg(basisM.r + i, j) = ni(i, j);
    // A = Bimg^T (B^T)^{-1}
    QMat a = mul(to_q(Bimg.transposed()), q_inverse(to_q(B.transposed())));
    for (auto& x : a.a)
        if (x.get_den() != 1) return std::nullopt;
    ZMat az = to_z(a);
    if (!is_isometry_of(L, az)) return std::nullopt;
    return Isometry{az};
}

// --- constrained isometry search ---

struct IsometryConstraints {
    int order = 1;
    std::optional<int> fixed_rank;
    DiscTrivialityQuery disc;
    bool disc_constrained = false;
};

inline std::optional<Isometry> search_isometry(const Lattice& N, const IsometryConstraints& c) {
    require(c.order >= 1, "search_isometry: order >= 1 required");
    DiscGroup D = discriminant_group(N);
    for (const Isometry& g : isometry_group(N)) {
        if (order_of(N, g) != c.order) continue;
        if (c.fixed_rank) {
            ZMat inv = invariant_sublattice(N, g);
            if (inv.r != *c.fixed_rank) continue;
        }
        if (c.disc_constrained && !is_disc_trivial(N, D, g, c.disc)) continue;
        return g;
    }
    return std::nullopt;
}

}  // namespace og6lat
