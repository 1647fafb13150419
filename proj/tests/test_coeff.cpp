#include "doctest.h"

#include "filmod/cyclo.hpp"
#include "filmod/padic.hpp"
#include "filmod/rng.hpp"

using namespace filmod;

namespace {

ECoeff random_element(Rng& rng, const Ctx& cx, bool tame = false) {
    ECoeff acc = ECoeff::zero(cx);
    long terms = rng.range(1, 3);
    for (long t = 0; t < terms; ++t) {
        Rat c = rat_of(rng.range(-6, 6), rng.range(1, 4));
        ECoeff term = ECoeff::from_rational(cx, c);
        term = term * ECoeff::root_of_unity(cx, cx->m(), rng.range(0, cx->m() - 1));
        if (!tame && cx->r() > 0 && rng.chance(1, 2))
            term = term * ECoeff::root_of_unity(cx, cx->pr(), rng.range(0, cx->pr() - 1));
        term = term * ECoeff::pi_pow(cx, rng.range(0, cx->e() - 1));
        acc = acc + term;
    }
    return acc;
}

}  // namespace

TEST_CASE("root of unity orders") {
    auto cx = CoeffContext::make(5, 3, 0, 1);
    ECoeff z = ECoeff::root_of_unity(cx, 3, 1);
    ECoeff z2 = ECoeff::root_of_unity(cx, 3, 2);
    CHECK(z * z2 == ECoeff::one(cx));   // zeta_3 * zeta_3^2 = 1
    CHECK((z * z) == z2);
    CHECK(z.pow(3).is_one());
}

TEST_CASE("defining relation pi^e = p") {
    auto cx = CoeffContext::make(5, 1, 0, 2);
    ECoeff pi = ECoeff::pi_pow(cx, 1);
    CHECK(pi * pi == ECoeff::integer(cx, 5));
}

TEST_CASE("inverse via extended euclid round-trips") {
    auto cx = CoeffContext::make(5, 3, 0, 1);
    ECoeff x = ECoeff::one(cx) + ECoeff::root_of_unity(cx, 3, 1);  // 1 + zeta_3
    ECoeff xi = x.inverse();
    CHECK(x * xi == ECoeff::one(cx));
    CHECK((x / x).is_one());
}

TEST_CASE("division errors") {
    auto cx = CoeffContext::make(3, 4, 0, 1);
    ECoeff x = ECoeff::integer(cx, 7);
    CHECK_THROWS_AS(x / ECoeff::zero(cx), input_error);
    auto cx2 = CoeffContext::make(3, 8, 0, 1);
    CHECK_THROWS_AS(x + ECoeff::one(cx2), input_error);  // context mismatch
}

TEST_CASE("wild layer arithmetic and zero divisors") {
    // p = 3, r = 1: y = zeta_3 of p-power order; e = 2 splits the layer
    auto cx = CoeffContext::make(3, 4, 1, 2);
    ECoeff y = ECoeff::root_of_unity(cx, 3, 1);
    CHECK(y.pow(3).is_one());
    CHECK_FALSE(y.is_tame());
    // 1 + y + y^2 = Phi_3(y) = 0
    ECoeff s = ECoeff::one(cx) + y + y * y;
    CHECK(s.is_zero());
    // y - 1 is a unit (its inverse exists: norm is Phi_3(1) = 3)
    ECoeff u = y - ECoeff::one(cx);
    CHECK(u.is_unit());
    CHECK((u * u.inverse()).is_one());
}

TEST_CASE("valuation basics") {
    auto cx = CoeffContext::make(5, 3, 0, 2);
    CHECK(*valuation(ECoeff::integer(cx, 5)) == rat_of(1));      // v(p) = 1
    CHECK(*valuation(ECoeff::pi_pow(cx, 1)) == rat_of(1, 2));    // v(pi) = 1/e
    CHECK_FALSE(valuation(ECoeff::zero(cx)).has_value());        // v(0) = inf
    // v(1 - zeta_3) at p = 5: norm of 1 - zeta_3 is Phi_3(1) = 3, prime to 5
    ECoeff x = ECoeff::one(cx) - ECoeff::root_of_unity(cx, 3, 1);
    // independent oracle: v_5 of the rational norm
    CHECK(vp_rational(rat_of(3), 5) == 0);
    CHECK(*valuation(x) == rat_of(0));
}

TEST_CASE("valuation is additive and ultrametric (random)") {
    Rng rng(20260809);
    for (long pi : {3L, 5L}) {
        auto cx = CoeffContext::make(pi, pi == 3 ? 8 : 12, 0, 2);
        for (int t = 0; t < 40; ++t) {
            ECoeff x = random_element(rng, cx, true);
            ECoeff y = random_element(rng, cx, true);
            if (x.is_zero() || y.is_zero()) continue;
            Val vx = valuation(x), vy = valuation(y), vxy = valuation(x * y);
            REQUIRE(vx.has_value());
            REQUIRE(vy.has_value());
            CHECK(*vxy == *vx + *vy);
            ECoeff s = x + y;
            if (!s.is_zero()) {
                Val vs = valuation(s);
                CHECK(*vs >= std::min(*vx, *vy));
                if (*vx != *vy) CHECK(*vs == std::min(*vx, *vy));
            }
        }
    }
}

TEST_CASE("precision refinement is compatible and stable") {
    auto cx = CoeffContext::make(5, 3, 0, 1);
    PAdicEmbedding& emb = cx->embedding();
    auto g10 = emb.factor_mod(10);
    ECoeff x = ECoeff::integer(cx, 50) * (ECoeff::one(cx) + ECoeff::root_of_unity(cx, 3, 1));
    Val v1 = valuation(x);
    emb.raise_precision(40);
    auto g40 = emb.factor_mod(40);
    // reduction of the refined factor mod p^10 equals the old factor
    Int P10 = 1;
    for (int i = 0; i < 10; ++i) P10 *= 5;
    REQUIRE(g10.size() == g40.size());
    for (std::size_t i = 0; i < g10.size(); ++i) CHECK(g40[i] % P10 == g10[i]);
    Val v2 = valuation(x);
    CHECK(*v1 == *v2);
}

TEST_CASE("hensel factor divides the cyclotomic polynomial") {
    auto cx = CoeffContext::make(3, 8, 0, 1);
    PAdicEmbedding& emb = cx->embedding();
    CHECK(emb.f() == 2);  // ord of 3 mod 8
    auto g = emb.factor_mod(12);
    CHECK(g.size() == 3);  // monic quadratic
    // evaluate Phi_8 = x^4 + 1 at the factor: check divisibility mod 3^12
    Int P = 1;
    for (int i = 0; i < 12; ++i) P *= 3;
    // remainder of x^4 + 1 by g must vanish mod P
    std::vector<Int> rem = {1, 0, 0, 0, 1};
    while (rem.size() >= g.size()) {
        Int c = rem.back();
        std::size_t sh = rem.size() - g.size();
        for (std::size_t i = 0; i < g.size(); ++i) {
            rem[sh + i] -= c * g[i];
            rem[sh + i] %= P;
        }
        while (!rem.empty() && rem.back() % P == 0) rem.pop_back();
    }
    for (const auto& c : rem) CHECK(c % P == 0);
}

TEST_CASE("sqrt examples") {
    auto cx1 = CoeffContext::make(5, 1, 0, 1);
    auto r1 = sqrt_in_E(ECoeff::integer(cx1, 4));
    REQUIRE(r1.root.has_value());
    CHECK(*r1.root * *r1.root == ECoeff::integer(cx1, 4));

    // d = -p over E = Q: no root (negative rational)
    auto r2 = sqrt_in_E(ECoeff::integer(cx1, -5));
    CHECK_FALSE(r2.root.has_value());
    CHECK(r2.exact_no);

    // d = p with e = 2: root is pi
    auto cx2 = CoeffContext::make(5, 1, 0, 2);
    auto r3 = sqrt_in_E(ECoeff::integer(cx2, 5));
    REQUIRE(r3.root.has_value());
    CHECK(*r3.root * *r3.root == ECoeff::integer(cx2, 5));

    // odd valuation: no root, exact
    auto r4 = sqrt_in_E(ECoeff::pi_pow(cx2, 1) * ECoeff::integer(cx2, 2));
    CHECK(r4.exact_no);
}

TEST_CASE("sqrt of squares round-trips (random)") {
    Rng rng(77);
    auto cx = CoeffContext::make(3, 8, 0, 2);
    int found = 0;
    for (int t = 0; t < 25; ++t) {
        ECoeff r = random_element(rng, cx, true);
        if (r.is_zero()) continue;
        ECoeff d = r * r;
        auto s = sqrt_in_E(d);
        REQUIRE(s.root.has_value());
        CHECK(*s.root * *s.root == d);
        ++found;
    }
    CHECK(found > 15);
}

TEST_CASE("sqrt residue obstruction is exact") {
    // p = 5, m = 1, e = 1 embeds Q; 2 is a nonsquare mod 5
    auto cx = CoeffContext::make(5, 1, 0, 2);
    auto s = sqrt_in_E(ECoeff::integer(cx, 2));
    CHECK_FALSE(s.root.has_value());
    CHECK(s.exact_no);
}

TEST_CASE("serialization round-trips") {
    auto cx = CoeffContext::make(3, 8, 1, 2);
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        ECoeff x = random_element(rng, cx);
        ECoeff y = ECoeff::parse(cx, x.str());
        CHECK(x == y);
    }
    CHECK(ECoeff::parse(cx, "3/2*zeta^5*pi^1") ==
          ECoeff::from_rational(cx, rat_of(3, 2)) * ECoeff::root_of_unity(cx, 8, 5) *
              ECoeff::pi_pow(cx, 1));
    CHECK(ECoeff::parse(cx, "0").is_zero());
    CHECK_THROWS_AS(ECoeff::parse(cx, "3//2"), input_error);
}

TEST_CASE("odd p is enforced") {
    CHECK_THROWS_AS(CoeffContext::make(2, 3, 0, 1), input_error);
    CHECK_THROWS_AS(CoeffContext::make(3, 6, 0, 1), input_error);  // p | m
}
