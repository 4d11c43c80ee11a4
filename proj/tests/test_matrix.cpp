#include <doctest.h>
#include <og6lat/matrix.hpp>

using namespace og6lat;

TEST_CASE("bareiss determinant") {
    ZMat m(3, 3, {Int(2), Int(1), Int(0), Int(1), Int(2), Int(1), Int(0), Int(1), Int(2)});
    CHECK(det(m) == 4);
    ZMat u(2, 2, {Int(0), Int(1), Int(1), Int(0)});
    CHECK(det(u) == -1);
    ZMat z(2, 2, {Int(1), Int(2), Int(2), Int(4)});
    CHECK(det(z) == 0);
    CHECK(det(ZMat(0, 0)) == 1);
}

TEST_CASE("hnf and kernels") {
    ZMat a(2, 3, {Int(2), Int(4), Int(4), Int(-6), Int(6), Int(12)});
    ZMat u;
    ZMat h = hnf_rows(a, &u);
    CHECK(mul(u, a) == h);
    CHECK(abs(det(u)) == 1);

    // left kernel of a rank-1 matrix
    ZMat b(2, 2, {Int(1), Int(2), Int(2), Int(4)});
    ZMat k = left_kernel(b);
    CHECK(k.r == 1);
    CHECK(k(0, 0) * 1 + k(0, 1) * 2 == 0);
}

TEST_CASE("snf") {
    ZMat a(2, 2, {Int(2), Int(4), Int(4), Int(4)});
    SnfResult s = snf(a);
    CHECK(mul(mul(s.u, a), s.v) == s.d);
    CHECK(s.d(0, 0) == 2);
    CHECK(s.d(1, 1) == 4);
    CHECK(s.d(1, 1) % s.d(0, 0) == 0);

    ZMat g(3, 3, {Int(0), Int(1), Int(0), Int(1), Int(0), Int(0), Int(0), Int(0), Int(-2)});
    SnfResult s2 = snf(g);
    CHECK(s2.d(0, 0) == 1);
    CHECK(s2.d(1, 1) == 1);
    CHECK(s2.d(2, 2) == 2);
}

TEST_CASE("rational inverse and mod helpers") {
    QMat m(2, 2);
    m(0, 0) = 2; m(0, 1) = 1; m(1, 0) = 1; m(1, 1) = 1;
    QMat inv = q_inverse(m);
    QMat prod = mul(m, inv);
    CHECK(prod == QMat::identity(2));

    CHECK(rat_mod(Rat(7, 2), 2) == Rat(3, 2));
    CHECK(rat_mod(Rat(-1, 2), 2) == Rat(3, 2));
    CHECK(rat_mod(Rat(-1, 3), 1) == Rat(2, 3));
    CHECK(mod_pos(Int(-7), Int(4)) == 1);
}
