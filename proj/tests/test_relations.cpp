#include "dcfwb/relations.hpp"

#include <gtest/gtest.h>

using namespace dcfwb;

namespace {

DiffPoly P(const std::string& s) { return parse(s); }

} // namespace

TEST(Enumerator, SmallSizesInOrder) {
    ExprEnumerator en(y_family_leaves());
    ASSERT_NE(en.at(0), nullptr);
    EXPECT_TRUE(en.at(0)->num.is_zero());
    EXPECT_EQ(en.at(1)->num, P("Y0"));
    // size 2: 1, -1, Y1, Y0'
    EXPECT_EQ(en.at(2)->num, P("1"));
    EXPECT_EQ(en.at(3)->num, P("-1"));
    EXPECT_EQ(en.at(4)->num, P("Y1"));
    EXPECT_EQ(en.at(5)->num, P("Y0'"));
    std::set<std::string> seen;
    for (std::size_t i = 0; i < 2000; ++i) {
        const Expr* e = en.at(i);
        ASSERT_NE(e, nullptr);
        EXPECT_TRUE(seen.insert(e->num.str() + "/" + e->den.str()).second);
    }
}

TEST(Enumerator, SingleVarDivision) {
    ExprEnumerator::Options o;
    o.division = true;
    o.single_var = true;
    ExprEnumerator en([](unsigned s) { return s == 2 ? std::vector<Var>{X(0)} : std::vector<Var>{X(1)}; }, o);
    for (std::size_t i = 0; i < 500; ++i) {
        const Expr* e = en.at(i);
        ASSERT_NE(e, nullptr);
        auto vs = vars_of(e->num);
        auto vd = vars_of(e->den);
        vs.insert(vd.begin(), vd.end());
        EXPECT_LE(vs.size(), 1u);
    }
}

TEST(Minpoly, SumOfSquareRoots) {
    ClosureEngine e;
    Elem v = e.add(e.sqrt(2), e.sqrt(3));
    auto m = algebraic_minpoly(e, v);
    ASSERT_TRUE(m);
    // x^4 - 10x^2 + 1
    EXPECT_EQ(m->to_diffpoly(Indet{Y(0), 0}), P("Y0^4 - 10*Y0^2 + 1"));
    EXPECT_FALSE(algebraic_minpoly(e, e.adjoin_transcendental()));
}

TEST(LeastRelation, Families) {
    ClosureEngine e;
    Elem r2 = e.sqrt(2);
    RelationQuery q;
    q.target = Y(1);
    q.value = r2;
    auto r = least_relation(e, q);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.poly, P("Y1^2 - 2"));
    // Over sqrt 2, -sqrt 2 is linear.
    q.base = {Y(0)};
    q.base_values = {r2};
    q.value = e.neg(r2);
    r = least_relation(e, q);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.poly, P("Y1 + Y0"));
    // A constant over a transcendental.
    Elem c = e.adjoin_constant();
    q.base_values = {e.adjoin_transcendental()};
    q.value = c;
    r = least_relation(e, q);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.poly, P("Y1'"));
    // delta t over t.
    q.value = e.deriv(q.base_values[0]);
    r = least_relation(e, q);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.poly, P("Y1 - Y0'"));
    // Below a bound nothing qualifies.
    q.below = Rank::finite(0, 1);
    EXPECT_FALSE(least_relation(e, q).found);
}

TEST(LeastRelation, SquareRootOfSquareRoot) {
    ClosureEngine e;
    Elem r2 = e.sqrt(2), r3 = e.sqrt(3);
    RelationQuery q;
    q.base = {Y(0)};
    q.base_values = {r2};
    q.target = Y(1);
    q.value = r3;
    auto r = least_relation(e, q);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.poly, P("Y1^2 - 3"));
    q.value = e.add(r2, r3);
    r = least_relation(e, q);
    // Coefficients in Q(sqrt 2) come back as polynomials in Y0.
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.poly, P("Y1^2 - 2*Y0*Y1 - 1"));
    // Coefficients need both base elements at once.
    q.base = {Y(0), Y(2)};
    q.base_values = {r2, r3};
    q.value = e.add(e.add(r2, r3), e.sqrt(5));
    r = least_relation(e, q);
    EXPECT_FALSE(r.found);
    EXPECT_TRUE(r.unsupported);
}

TEST(LeastRelation, EnumerationFindsProducts) {
    ClosureEngine e;
    Elem t = e.adjoin_transcendental();
    RelationQuery q;
    q.base = {Y(0)};
    q.base_values = {t};
    q.target = Y(1);
    q.value = e.mul(t, e.deriv(t));
    EXPECT_FALSE(least_relation(e, q).found);
    q.enum_limit = 3000;
    auto r = least_relation(e, q);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.poly, P("Y1 - Y0*Y0'"));
}
