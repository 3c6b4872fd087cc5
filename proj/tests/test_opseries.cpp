#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hadic/opseries.hpp"
#include "helpers.hpp"

using namespace hadic;
using hadic::test::iota;
using hadic::test::mono;

TEST_CASE("G applied to x^{-1}: 2hb x^{-1} + (2/3) hb^3 x^{-3} at N=5") {
    int X = Vars::id("x");
    auto xinv = mono({X}, 1, 0, {-1}, 5);
    auto g = OpSeries::G(5).apply(xinv, X);
    CHECK(g.coeff(1, {-1}) == Rat(2));
    CHECK(g.coeff(3, {-3}) == Rat(2, 3));
    CHECK(g.coeff(2, {-2}) == Rat(0));
    Window w = g.window();
    w.h.hi = std::min(w.h.hi, 4);
    CHECK(g.restricted(w).terms().size() == 2);
}

TEST_CASE("qbracket(0) is zero, qbracket(-1) = -1") {
    CHECK(OpSeries::qbracket(Rat(0), 6).is_zero());
    auto m1 = OpSeries::qbracket(Rat(-1), 6);
    CHECK(m1.eq_upto(OpSeries::identity().scaled(Rat(-1)), 6));
}

TEST_CASE("F o G = 1 mod hbar^N") {
    for (int n : {4, 6, 8}) {
        auto fg = OpSeries::F(n).compose(OpSeries::G(n + 1), n);
        CHECK(fg.eq_upto(OpSeries::identity(), n));
        auto gf = OpSeries::G(n + 1).compose(OpSeries::F(n), n);
        CHECK(gf.eq_upto(OpSeries::identity(), n));
    }
}

TEST_CASE("G o qbracket(m) = G_m for m = -1, 1, 2, 3 and rational m") {
    for (int m : {-1, 1, 2, 3}) {
        auto lhs = OpSeries::G(7).compose(OpSeries::qbracket(Rat(m), 7), 6);
        auto rhs = OpSeries::G_m(Rat(m), 6);
        CHECK(lhs.eq_upto(rhs, 6));
    }
    auto lhs = OpSeries::G(7).compose(OpSeries::qbracket(Rat(3, 2), 7), 6);
    CHECK(lhs.eq_upto(OpSeries::G_m(Rat(3, 2), 6), 6));
}

TEST_CASE("rational and integer q-brackets agree") {
    for (int m : {-2, -1, 0, 1, 2, 3}) {
        auto a = OpSeries::qbracket_int(m, 6);
        auto b = OpSeries::F(6).compose(OpSeries::G_m(Rat(m), 7), 6);
        CHECK(a.eq_upto(b, 5));
    }
}

TEST_CASE("log-two-terms: log((x+m hb)/(x-m hb)) = G [m] x^{-1}") {
    int X = Vars::id("x");
    Window w;
    w.vars[X] = VarWin::band(-8, -1);
    w.h = VarWin::with_support(0, 5, 0, std::nullopt);
    for (int m : {-1, 1, 2}) {
        // (x + m hb)/(x - m hb) = 1 + 2 m hb (x - m hb)^{-1}
        auto f = iota({X}, X, -1, Rat(-m), -1, w).mul_monomial(Rat(2 * m), 1, {0});
        auto lhs = f.log1p();
        auto xinv = mono({X}, 1, 0, {-1}, 6);
        auto rhs = OpSeries::G(6).compose(OpSeries::qbracket(Rat(m), 6), 6).apply(xinv, X);
        CHECK(lhs.eq_on(rhs));
        CHECK_FALSE(win_intersect(lhs.window(), rhs.window()).empty());
    }
}

TEST_CASE("GL relation: -G(x) q^{-x} = -2 hb L(-2 hb x) as operator series") {
    int n = 7;
    auto lhs = OpSeries::G(n + 1).compose(OpSeries::qpow(Rat(-1), n), n).scaled(Rat(-1));
    auto rhs = OpSeries::monomial(1, 0, Rat(-2)).compose(OpSeries::L(Rat(-2), 1, n), n);
    CHECK(lhs.eq_upto(rhs, n - 1));
}

TEST_CASE("GqL at level l: G(x) q^{-l x} = 2 hb L(-2 hb x) q^{(1-l) x}") {
    int n = 6;
    for (Rat l : {Rat(1), Rat(3, 2), Rat(0), Rat(-2)}) {
        auto lhs = OpSeries::G(n + 1).compose(OpSeries::qpow(-l, n), n);
        auto rhs = OpSeries::monomial(1, 0, Rat(2))
                       .compose(OpSeries::L(Rat(-2), 1, n), n)
                       .compose(OpSeries::qpow(Rat(1) - l, n), n);
        CHECK(lhs.eq_upto(rhs, n - 1));
    }
}

TEST_CASE("F lowers the hbar floor by one") {
    int X = Vars::id("x");
    Window w;
    w.vars[X] = VarWin::band(-8, -1);
    w.h = VarWin::with_support(0, 4, 0, std::nullopt);
    auto f = iota({X}, X, -1, Rat(-1), -1, w).mul_monomial(Rat(2), 1, {0});  // 2hb iota(x-hb)^{-1}
    auto lg = f.log1p();                                                     // log((x+..)-style, floor 1
    auto h = OpSeries::F(4).apply(lg, X);
    CHECK(*h.window().h.slo == 0);
    CHECK(h.coeff(0, {-1}) == Rat(1));  // (1/2hb) * 2hb x^{-1}
}

TEST_CASE("qpow evaluation matches shift") {
    int X = Vars::id("x");
    auto a = iota({X}, X, -1, Rat(2), -3, box_window({X}, 9, 4));
    auto lhs = OpSeries::qpow(Rat(5, 3), 4).apply(a, X);
    auto rhs = a.shift(X, Rat(5, 3));
    CHECK(lhs.eq_on(rhs));
    CHECK_FALSE(win_intersect(lhs.window(), rhs.window()).empty());
}
