#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hadic/catalog.hpp"

using namespace hadic;

TEST_CASE("log_two_terms m in {-1,0,1,2} at N=6 window 8") {
    for (int m : {-1, 0, 1, 2}) {
        auto r = catalog::log_two_terms(Rat(m), 6, 8);
        INFO(r.params, " ", r.witness);
        CHECK(r.status == Status::Pass);
    }
}

TEST_CASE("log_four_terms acceptance triples") {
    for (auto [m, k] : std::vector<std::pair<int, int>>{{2, 1}, {2, 3}, {-1, 2}}) {
        auto r = catalog::log_four_terms(Rat(m), Rat(k), 6, 8);
        INFO(r.params, " ", r.witness);
        CHECK(r.status == Status::Pass);
    }
}

TEST_CASE("sing/res factorization for b in {1,-1,2,-2}") {
    int X = Vars::id("x");
    for (int b : {1, -1, 2, -2}) {
        auto F = Poly::monomial({X}, Rat(1), 0, {2}).add(Poly::monomial({X}, Rat(3), 1, {1}));
        auto r = catalog::sing_res_fact(Rat(b), F, 5, 8, "x^2+3hx");
        INFO(r.params, " ", r.witness);
        CHECK(r.status == Status::Pass);
    }
}

TEST_CASE("GL and GqL operator identities") {
    CHECK(catalog::GL_relation(7).status == Status::Pass);
    for (auto l : {Rat(1), Rat(3, 2), Rat(2)}) CHECK(catalog::GqL_level(l, 6).status == Status::Pass);
}

TEST_CASE("serre kernel identities, exact") {
    CHECK(catalog::serre_kernel_product(1).status == Status::Pass);
    CHECK(catalog::serre_kernel_product(2).status == Status::Pass);
}

TEST_CASE("delta decomposition entries") {
    for (int j : {0, 1, 2}) CHECK(catalog::delta_decomp(j, 3, 6).status == Status::Pass);
}

TEST_CASE("run_all is all-pass and anchored") {
    auto rs = catalog::run_all(5, 7);
    for (auto& r : rs) {
        INFO(r.name, " ", r.params, " ", r.witness);
        CHECK(r.status == Status::Pass);
        CHECK(anchor_known(r.anchor));
    }
    CHECK(rs.size() >= 12);
}
