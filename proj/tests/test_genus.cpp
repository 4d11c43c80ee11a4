#include <doctest.h>
#include <og6lat/genus.hpp>

using namespace og6lat;

namespace {

Lattice L(const std::string& expr) { return parse_lattice(expr); }

bool contains_class(const std::vector<Lattice>& list, const Lattice& x) {
    for (auto& l : list)
        if (isometric(l, x)) return true;
    return false;
}

bool same_class_set(const std::vector<Lattice>& got, const std::vector<std::string>& want) {
    if (got.size() != want.size()) return false;
    std::vector<bool> used(got.size(), false);
    for (auto& w : want) {
        Lattice lw = L(w);
        bool hit = false;
        for (size_t i = 0; i < got.size(); ++i) {
            if (used[i]) continue;
            if (isometric(got[i], lw)) {
                used[i] = true;
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("genus identity") {
    CHECK(same_genus(lat_bL(), L("3U+2[-2]")));
    CHECK(same_genus(L("2[-2]"), direct_sum({lat_rank1(-2), lat_rank1(-2)})));
    CHECK_FALSE(same_genus(lat_D(4), L("4[-2]")));
    CHECK_FALSE(same_genus(lat_A(2), rescale(lat_A(2), -1)));
}

TEST_CASE("rank-1 and rank-2 enumeration") {
    auto r1 = enumerate_definite_even(1, 4, true, "t1");
    CHECK(same_class_set(r1, {"[-2]", "[-4]"}));

    // det <= 4 rank 2: A2 (det 3) and 2[-2] (det 4)
    auto r2 = enumerate_definite_even(2, 4, true, "t2");
    CHECK(same_class_set(r2, {"A2", "2[-2]"}));
}

TEST_CASE("2-elementary rank <= 5 list (seven classes)") {
    auto lats = enumerate_m_elementary(2, 5, 32);
    CHECK(lats.size() == 7);
    CHECK(same_class_set(lats, {"[-2]", "2[-2]", "3[-2]", "D4", "4[-2]", "D4+[-2]", "5[-2]"}));
}

TEST_CASE("3-elementary and 1-elementary") {
    auto l3 = enumerate_m_elementary(3, 5, 81, /*even_rank_only=*/true);
    CHECK(contains_class(l3, L("A2")));
    CHECK(contains_class(l3, L("2A2")));
    CHECK_FALSE(contains_class(l3, L("A2(3)")));  // 9-elementary, not 3-elementary

    auto l1 = enumerate_m_elementary(1, 5, 1);
    CHECK(l1.empty());
}

TEST_CASE("m-elementary invariants and completeness spot-check") {
    auto l4 = enumerate_m_elementary(4, 4, 256);
    for (auto& N : l4) {
        Fqf q = fqf_of(N);
        if (q.ngen()) CHECK(mod_pos(Int(4), q.orders.back()) == 0);
        Int bound = 1;
        for (int i = 0; i < q.length(); ++i) bound *= 4;
        CHECK(N.abs_det() <= bound);
    }
    // no two entries isometric
    for (size_t i = 0; i < l4.size(); ++i)
        for (size_t j = i + 1; j < l4.size(); ++j) CHECK_FALSE(isometric(l4[i], l4[j]));
    // closure: rank-(r-1) entry + [-2] or [-4] reappears when within bounds
    auto l4r3 = enumerate_m_elementary(4, 3, 64);
    for (auto& N : l4r3) {
        for (int tail : {-2, -4}) {
            Lattice S = direct_sum({N, lat_rank1(tail)});
            if (S.abs_det() <= 256 && is_m_elementary(S, 4)) CHECK(contains_class(l4, S));
        }
    }
}

TEST_CASE("involution existence conditions") {
    // a = 0 case forced by condition (5)
    CHECK(involution_coinvariant_exists(8, 0, 8, 0, 0, 0));
    // a = 1 requires tp - tm = +-1 mod 8 (condition 6)
    CHECK_FALSE(involution_coinvariant_exists(5, 5, 5, 1, 1, 1));
    CHECK(involution_coinvariant_exists(5, 5, 1, 0, 1, 1));
    CHECK_THROWS(involution_coinvariant_exists(5, 4, 1, 0, 1, 1));

    // hyperbolic coinvariants of rank <= 6 inside (5,5): exactly 12 possibilities
    int count = 0;
    for (int tm = 0; tm <= 5; ++tm)
        for (int a = 0; a <= 1 + tm; ++a)
            for (int delta : {0, 1})
                if (involution_coinvariant_exists(5, 5, 1, tm, a, delta)) ++count;
    CHECK(count == 12);
}

TEST_CASE("existence engine vs constructed lattices") {
    std::vector<std::string> corpus = {
        "U",        "[-2]",      "[2]",        "A2",      "A3",       "D4",
        "D5",       "A4",        "A5",         "btA",     "2[-2]",    "U(2)",
        "A2(2)",    "3U+2[-2]",  "U+D4",       "U(2)+3[-2]", "[2]+2[-2]",
        "A2+[-6]",  "E8",        "U+A2",       "A2(3)",   "D4+[-4]",  "U(4)",
        "U(3)+A2"};
    for (auto& s : corpus) {
        Lattice l = L(s);
        CAPTURE(s);
        CHECK(exists_even_lattice(l.signature().plus, l.signature().minus, fqf_of(l)));
    }
    // known non-existence
    CHECK_FALSE(exists_even_lattice(2, 0, Fqf::trivial()));        // no even unimodular (2,0)
    CHECK(exists_even_lattice(1, 1, Fqf::trivial()));              // U
    CHECK_FALSE(exists_even_lattice(1, 1, fqf_of(lat_rank1(-2)))); // parity obstruction
    CHECK_FALSE(exists_even_lattice(1, 0, Fqf::trivial()));
    CHECK_FALSE(exists_even_lattice(2, 0, fqf_of(lat_A(2))));      // wrong signature for q(A2)
    CHECK(exists_even_lattice(0, 2, fqf_of(lat_A(2))));
}

TEST_CASE("existence engine: boundary case where dets and oddity interact") {
    // complement invariants of a would-be full-gluing embedding A3+[-4] into bL:
    // signature (3,1), q = q(bL) + (-q(A3+[-4])). This genus must be empty.
    Fqf q = fqf_direct_sum(fqf_of(lat_bL()), fqf_negate(fqf_of(L("A3+[-4]"))));
    CHECK_FALSE(exists_even_lattice(3, 1, q));
    // while the D4 analogue exists (realized by U(2) + 2[2])
    Fqf qd = fqf_direct_sum(fqf_of(lat_bL()), fqf_negate(fqf_of(lat_D(4))));
    CHECK(exists_even_lattice(3, 1, qd));
    Lattice incarnation = direct_sum({parse_lattice("U(2)"), lat_rank1(2), lat_rank1(2)});
    CHECK(incarnation.signature() == Signature{3, 1});
    CHECK(fqf_isomorphic(fqf_of(incarnation), qd));
}

TEST_CASE("build_model") {
    auto m1 = build_model(0, 2, fqf_of(lat_A(2)));
    REQUIRE(m1.has_value());
    CHECK(isometric(*m1, lat_A(2)));

    auto m2 = build_model(3, 5, fqf_of(lat_bL()));
    REQUIRE(m2.has_value());
    CHECK(same_genus(*m2, lat_bL()));

    Fqf qd = fqf_direct_sum(fqf_of(lat_bL()), fqf_negate(fqf_of(lat_D(4))));
    auto m3 = build_model(3, 1, qd);
    REQUIRE(m3.has_value());
    CHECK(fqf_isomorphic(fqf_of(*m3), qd));

    Fqf qa = fqf_direct_sum(fqf_of(lat_bL()), fqf_negate(fqf_of(L("A3+[-4]"))));
    CHECK_FALSE(build_model(3, 1, qa).has_value());
}

TEST_CASE("uniqueness in genus for definite lattices of the derivation") {
    for (auto& s : {"[-2]", "2[-2]", "3[-2]", "4[-2]", "5[-2]", "D4", "D5", "A2", "2A2",
                    "A3", "A4", "A2+[-2]", "A3+[-2]", "D4+[-2]", "A4+[-2]", "2A2+[-2]",
                    "btA", "A2+2[-2]"}) {
        Lattice l = L(s);
        CAPTURE(s);
        auto classes = enumerate_in_genus_definite(genus_of(l));
        CHECK(classes.size() == 1);
    }
}

TEST_CASE("signature via diagonalization vs minors on generic input") {
    ZMat g(3, 3, {Int(4), Int(1), Int(0), Int(1), Int(-2), Int(1), Int(0), Int(1), Int(6)});
    Lattice l(g);
    Int m2 = det(ZMat(2, 2, {Int(4), Int(1), Int(1), Int(-2)}));
    CHECK(m2 < 0);
    CHECK(l.det() < 0);
    CHECK(l.signature() == Signature{2, 1});
}
