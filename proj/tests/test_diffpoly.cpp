#include "dcfwb/diffpoly.hpp"
#include "dcfwb/error.hpp"
#include "random_poly.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace dcfwb;
using dcfwb::testing_support::PolyShape;
using dcfwb::testing_support::random_poly;

namespace {

DiffPoly P(const char* s) { return parse(s); }

} // namespace

TEST(DiffPolyArith, RingExamples) {
    EXPECT_TRUE((P("Y0") + P("-Y0")).is_zero());
    EXPECT_EQ(P("Y0+1") * P("Y0-1"), P("Y0^2 - 1"));
    EXPECT_TRUE(scale(P("Y0'"), 0).is_zero());
    EXPECT_EQ(pow(P("Y0 + 1"), 3), P("Y0^3 + 3*Y0^2 + 3*Y0 + 1"));
}

TEST(DiffPolyDelta, Examples) {
    EXPECT_EQ(delta(P("Y0")), P("Y0'"));
    EXPECT_EQ(delta(P("Y0*Y1")), P("Y0'*Y1 + Y0*Y1'"));
    EXPECT_EQ(delta(P("Y0^3 - Y0^2")), P("3*Y0^2*Y0' - 2*Y0*Y0'"));
    EXPECT_TRUE(delta(P("5/3")).is_zero());
    EXPECT_EQ(delta(P("Y0"), 5), P("Y0^(5)"));
}

TEST(DiffPolyOrder, Examples) {
    EXPECT_EQ(order_in(P("Y0'' + Y0"), Y(0)), 2);
    EXPECT_EQ(order_in(P("5/3"), Y(0)), -1);
    EXPECT_EQ(order_in(DiffPoly(), Y(7)), kInfiniteOrder);
    EXPECT_EQ(order_in(P("Y1'"), Y(0)), -1);
}

TEST(DiffPolyRank, Examples) {
    EXPECT_EQ(rank_in(P("Y0'^2"), Y(0)), Rank::finite(1, 2));
    EXPECT_GT(rank_in(P("Y0''"), Y(0)), rank_in(P("Y0'^9"), Y(0)));
    EXPECT_EQ(separant(P("Y0'^2 + Y0"), Y(0)), P("2*Y0'"));
    EXPECT_EQ(initial(P("3*Y1*Y0'^2 + Y0'^2 + Y0"), Y(0)), P("3*Y1 + 1"));
    EXPECT_EQ(rank_in(DiffPoly(), Y(0)), Rank::infinite());
    EXPECT_LT(rank_in(P("7"), Y(0)), rank_in(P("Y0"), Y(0)));
    EXPECT_THROW(leader(P("Y1 + 1"), Y(0)), NoLeader);
    EXPECT_THROW(separant(P("2"), Y(0)), NoLeader);
}

TEST(DiffPolyRank, TotalOrderOnRandomSet) {
    std::mt19937_64 rng(11);
    std::vector<Rank> ranks;
    for (int i = 0; i < 200; ++i)
        ranks.push_back(rank_in(random_poly(rng, {}), Y(0)));
    ranks.push_back(Rank::infinite());
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i + 1 < ranks.size(); ++i) {
        EXPECT_LE(ranks[i], ranks[i + 1]);
        EXPECT_TRUE(ranks[i] < ranks[i + 1] || ranks[i] == ranks[i + 1]);
    }
    EXPECT_TRUE(ranks.back().is_infinite());
}

TEST(DiffPolyParse, GrammarExamples) {
    DiffPoly a = P("Y0' - Y0^3 + Y0^2");
    EXPECT_EQ(a, DiffPoly::var(Y(0), 1) - pow(DiffPoly::var(Y(0)), 3) + pow(DiffPoly::var(Y(0)), 2));
    EXPECT_EQ(P("Y2^(4)^2"), DiffPoly::indet({Y(2), 4}, 2));
    EXPECT_EQ(P("1/2*Y0*Y1'"), scale(DiffPoly::var(Y(0)) * DiffPoly::var(Y(1), 1), Rational(1, 2)));
    EXPECT_EQ(P("Y0'''"), P("Y0^(3)"));
    EXPECT_EQ(P(" T3 - X1 "), DiffPoly::var(T(3)) - DiffPoly::var(X(1)));
    EXPECT_EQ(P("0"), DiffPoly());
    EXPECT_EQ(P("-2/4"), DiffPoly(Rational(-1, 2)));
}

TEST(DiffPolyParse, Errors) {
    EXPECT_THROW(P(""), ParseError);
    EXPECT_THROW(P("Y"), ParseError);
    EXPECT_THROW(P("Y0 +"), ParseError);
    EXPECT_THROW(P("Z0"), ParseError);
    EXPECT_THROW(P("1/0"), ParseError);
    EXPECT_THROW(P("Y0^(40)"), CapOverflow);
    EXPECT_THROW(P("Y0^65"), CapOverflow);
    try {
        P("Y0 + * Y1");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 5u);
    }
}

TEST(DiffPolyRender, Format) {
    EXPECT_EQ(render(P("Y0^2 + Y0' - Y0^3")), "Y0' - Y0^3 + Y0^2");
    EXPECT_EQ(render(P("Y2^(4)^2")), "Y2^(4)^2");
    EXPECT_EQ(render(P("1/2*Y0*Y1'")), "1/2*Y0*Y1'");
    EXPECT_EQ(render(P("Y0 - 1")), "Y0 - 1");
    EXPECT_EQ(render(DiffPoly()), "0");
}

TEST(DiffPolySubst, Examples) {
    EXPECT_EQ(eval_subst(P("Y0'"), {{Y(0), P("Y1^2")}}), P("2*Y1*Y1'"));
    EXPECT_TRUE(eval_subst(P("Y0 - Y0"), {}).is_zero());
    EXPECT_EQ(eval_subst(P("Y0^2 - 2"), {{Y(0), P("3")}}), P("7"));
    EXPECT_THROW(eval_subst(P("Y0 + Y1"), {{Y(0), P("1")}}), MissingAssignment);
    EXPECT_EQ(subst_vars(P("Y0 + Y1"), {{Y(0), P("1")}}), P("Y1 + 1"));
    EXPECT_EQ(rename(P("X0*X1 + X0^2"), {{X(0), Y(1)}, {X(1), Y(1)}}), P("2*Y1^2"));
}

TEST(DiffPolyProperty, CanonicalUniqueness) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 300; ++i) {
        DiffPoly a = random_poly(rng, {}), b = random_poly(rng, {});
        DiffPoly s1 = (a + b) - b, s2 = b + (a - b);
        EXPECT_EQ(s1, a);
        EXPECT_EQ(s2, a);
        EXPECT_EQ(render(s1), render(a));
        EXPECT_EQ(a * b, b * a);
    }
}

TEST(DiffPolyProperty, Leibniz) {
    std::mt19937_64 rng(2);
    PolyShape sh;
    sh.max_order = 2;
    sh.max_degree = 3;
    for (int i = 0; i < 500; ++i) {
        DiffPoly a = random_poly(rng, sh), b = random_poly(rng, sh);
        EXPECT_EQ(delta(a * b), a * delta(b) + b * delta(a));
        EXPECT_EQ(delta(a + b), delta(a) + delta(b));
    }
}

TEST(DiffPolyProperty, ParseRenderRoundTrip) {
    std::mt19937_64 rng(3);
    PolyShape sh;
    sh.vars = 3;
    sh.max_order = 6;
    for (int i = 0; i < 500; ++i) {
        sh.family = static_cast<Family>(1 + i % 3);
        DiffPoly a = random_poly(rng, sh);
        EXPECT_EQ(parse(render(a)), a) << render(a);
    }
}

TEST(DiffPolyProperty, SubstitutionIsHomomorphic) {
    std::mt19937_64 rng(4);
    PolyShape sh;
    sh.max_terms = 3;
    sh.max_degree = 2;
    for (int i = 0; i < 100; ++i) {
        DiffPoly a = random_poly(rng, sh), b = random_poly(rng, sh);
        std::map<Var, DiffPoly> asg{{Y(0), random_poly(rng, sh)}, {Y(1), P("Y2 + 1")}};
        EXPECT_EQ(eval_subst(a * b, asg), eval_subst(a, asg) * eval_subst(b, asg));
        EXPECT_EQ(eval_subst(delta(a), asg), delta(eval_subst(a, asg)));
    }
}

TEST(DiffPolyCaps, MonomialCap) {
    Caps saved = caps();
    Caps small = saved;
    small.max_monomials = 10;
    set_caps(small);
    EXPECT_THROW(pow(P("Y0 + Y1 + Y2 + 1"), 4), CapOverflow);
    set_caps(saved);
}
