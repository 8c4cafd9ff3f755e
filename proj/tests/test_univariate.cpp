#include "dcfwb/error.hpp"
#include "dcfwb/univariate.hpp"

#include "gcd_oracle.hpp"

#include <gtest/gtest.h>

using namespace dcfwb;
using namespace dcfwb::testing_support;

namespace {

UniPoly U(std::vector<long> c) {
    std::vector<Rational> r;
    for (long v : c)
        r.emplace_back(v);
    return UniPoly(r);
}

UniPoly product(const std::vector<UniPoly>& fs) {
    UniPoly p = U({1});
    for (const auto& f : fs)
        p = p * f;
    return p;
}

} // namespace

TEST(UniPoly, DivmodIdentity) {
    UniPoly a = U({1, 2, 3, 4, 5}), b = U({-1, 0, 2});
    DivMod d = divmod(a, b);
    EXPECT_EQ(d.quotient * b + d.remainder, a);
    EXPECT_LT(d.remainder.degree(), b.degree());
}

TEST(UniPoly, GcdMatchesDenseOracle) {
    for (const auto& c : gcd_cases(7, 100)) {
        UniPoly a(c.a), b(c.b);
        Dense g = dense_gcd(c.a, c.b);
        EXPECT_EQ(gcd(a, b), UniPoly(g));
    }
}

TEST(UniPoly, RationalRoots) {
    // (2x - 1)(x + 3)(x^2 + 1)
    UniPoly p = U({-1, 2}) * U({3, 1}) * U({1, 0, 1});
    auto r = rational_roots(p);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0], Rational(-3));
    EXPECT_EQ(r[1], Rational(1, 2));
}

TEST(UniPoly, Squarefree) {
    EXPECT_TRUE(is_squarefree(U({-2, 0, 1})));
    EXPECT_FALSE(is_squarefree(U({1, 2, 1})));
}

TEST(UniPoly, IrreducibleExamples) {
    EXPECT_EQ(is_irreducible(U({-2, 0, 1})), std::optional<bool>(true));
    EXPECT_EQ(is_irreducible(U({-1, -1, 0, 1})), std::optional<bool>(true));
    EXPECT_EQ(is_irreducible(U({4, 0, 0, 0, 1})), std::optional<bool>(false)); // (x^2+2x+2)(x^2-2x+2)
    EXPECT_EQ(is_irreducible(U({-1, 0, 1})), std::optional<bool>(false));
    EXPECT_EQ(is_irreducible(U({-2, 0, 0, 0, 1})), std::optional<bool>(true));
    EXPECT_EQ(is_irreducible(U({1, 1, 1, 1, 1})), std::optional<bool>(true));
}

TEST(UniPoly, FactorReassembles) {
    std::vector<std::vector<UniPoly>> cases = {
        {U({2, 2, 1}), U({2, -2, 1})},
        {U({-2, 0, 1}), U({1, 1}), U({1, 1})},
        {U({1, 0, 1}), U({-1, 0, 0, 1})},
        {U({-3, 2}), U({5, 0, 3})},
    };
    for (const auto& fs : cases) {
        UniPoly p = product(fs);
        auto got = factor(p);
        ASSERT_TRUE(got.has_value());
        EXPECT_EQ(product(*got).monic(), p.monic());
        for (const auto& f : *got)
            EXPECT_EQ(is_irreducible(f), std::optional<bool>(true));
    }
}

TEST(UniPoly, DiffPolyRoundTrip) {
    Indet x{Y(0), 0};
    DiffPoly p = parse("Y0^3 - 1/2*Y0 + 7");
    EXPECT_EQ(UniPoly::from_diffpoly(p, x).to_diffpoly(x), p);
    EXPECT_THROW(UniPoly::from_diffpoly(parse("Y0*Y1"), x), Error);
}
