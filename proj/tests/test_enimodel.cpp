#include "dcfwb/enimodel.hpp"
#include "dcfwb/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace dcfwb;

TEST(EniModel, PrimeModel) {
    TModel m = encode_graph(Graph(3));
    for (Node a = 0; a < 3; ++a)
        for (Node b = 0; b < 3; ++b)
            EXPECT_EQ(m.dim(a, b), 1u);
    EXPECT_EQ(count_extendable_perms(m).size(), 6u);
}

TEST(EniModel, EdgeBumpsBothFibers) {
    TModel m = encode_graph(complete_graph(2));
    EXPECT_EQ(m.dim(0, 1), 2u);
    EXPECT_EQ(m.dim(1, 0), 2u);
    EXPECT_EQ(m.dim(0, 0), 1u);
    EXPECT_EQ(m.dim(1, 1), 1u);
}

TEST(EniModel, DecodeErrorsAndExamples) {
    TModel m(2);
    m.set_dim(0, 1, 3);
    m.set_dim(1, 0, 3);
    EXPECT_THROW(decode_graph(m), InvalidInput);
    TModel lopsided(2);
    lopsided.set_dim(0, 1, 2);
    EXPECT_THROW(decode_graph(lopsided), InvalidInput);
    EXPECT_EQ(decode_graph(TModel(4)).edge_count(), 0u);
    EXPECT_EQ(decode_graph(encode_graph(complete_graph(3))), complete_graph(3));
}

TEST(EniModel, EncodeDecodeInverseUpToSix) {
    for (std::size_t n = 0; n <= 6; ++n)
        for (const Graph& g : all_graphs(n))
            ASSERT_EQ(decode_graph(encode_graph(g)), g);
}

TEST(EniModel, PathPermutations) {
    auto ps = count_extendable_perms(encode_graph(path_graph(3)));
    std::vector<std::vector<Node>> want{{0, 1, 2}, {2, 1, 0}};
    EXPECT_EQ(ps, want);
    EXPECT_EQ(count_extendable_perms(encode_graph(complete_graph(3))).size(), 6u);
}

TEST(EniModel, PermutationsAreAutomorphismsUpToFive) {
    for (std::size_t n = 1; n <= 5; ++n)
        for (const Graph& g : all_graphs(n))
            ASSERT_EQ(count_extendable_perms(encode_graph(g)), automorphisms(g));
}

TEST(EniModel, MaterializeCounts) {
    TModel m(2);
    EXPECT_EQ(materialize(m, 0).element_count(), 6u);
    TFragment one = materialize(TModel(1), 3);
    EXPECT_EQ(one.points.size(), 7u);
    for (const auto& p : one.points)
        EXPECT_TRUE(p.a == 0 && p.b == 0);
    TModel k = encode_graph(complete_graph(3));
    EXPECT_EQ(materialize(k, 2).element_count(), 3u + (9u + 6u) * 5u);
}

TEST(EniModel, MaterializedAxioms) {
    for (const Graph& g : all_graphs(4)) {
        TModel m = encode_graph(g);
        TFragment f = materialize(m, 1);
        EXPECT_TRUE(check_axioms(f, m).empty());
        for (std::size_t i = 0; i < f.points.size(); ++i) {
            if (f.points[i].offset == 1)
                EXPECT_FALSE(f.succ[i].has_value());
            else
                EXPECT_TRUE(f.succ[i].has_value());
        }
    }
}

TEST(EniModel, AxiomCheckerCatchesDamage) {
    TModel m = encode_graph(complete_graph(2));
    TFragment f = materialize(m, 1);
    TFragment cyc = f;
    cyc.succ[2] = 0; // close the first chain into a loop
    EXPECT_FALSE(check_axioms(cyc, m).empty());
    TFragment cross = f;
    cross.succ[0] = f.points.size() - 1; // jump into another fiber
    EXPECT_FALSE(check_axioms(cross, m).empty());
    TModel wrong = m;
    wrong.set_dim(0, 1, 3);
    EXPECT_FALSE(check_axioms(f, wrong).empty());
}
