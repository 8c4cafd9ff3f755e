#include "dcfwb/computability.hpp"
#include "dcfwb/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dcfwb;

namespace {

TTFunctional random_functional(std::mt19937_64& rng) {
    std::uniform_int_distribution<unsigned> use(0, 6), time(0, 20), xs(0, 3);
    std::bernoulli_distribution coin(0.5), defined(0.8);
    TTFunctional f;
    f.use = use(rng);
    unsigned max_x = xs(rng);
    for (unsigned long m = 0; m < (1ul << f.use); ++m) {
        BitString s(f.use, '0');
        for (unsigned i = 0; i < f.use; ++i)
            s[i] = (m >> i & 1) ? '1' : '0';
        for (unsigned x = 0; x <= max_x; ++x)
            if (defined(rng))
                f.table[{s, x}] = {coin(rng) ? 1 : 0, time(rng)};
    }
    return f;
}

BitString random_bits(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution coin(0.5);
    BitString s;
    for (std::size_t i = 0; i < n; ++i)
        s += coin(rng) ? '1' : '0';
    return s;
}

} // namespace

TEST(Functional, ConvergenceIsMonotoneInTime) {
    TTFunctional f = TTFunctional::bit_at(2, 1, 5);
    EXPECT_FALSE(f.eval("01", 0).has_value());
    EXPECT_FALSE(f.eval("011", 0, 4).has_value());
    EXPECT_EQ(f.eval("011", 0, 5), 1);
    EXPECT_EQ(f.eval("0110", 1, 9), 1);
    EXPECT_FALSE(f.eval("011", 2).has_value());
}

TEST(Gamma, ConstantMachineNeverSplits) {
    auto tr = build_gamma("1", "1", {TTFunctional::constant(0, 4)}, 1);
    ASSERT_EQ(tr.segments.size(), 3u);
    EXPECT_EQ(tr.segments[1], "1");
    EXPECT_EQ(tr.segments[2], "1");
    EXPECT_FALSE(tr.exists[0]);
    EXPECT_EQ(recover_jump_bit(tr, {TTFunctional::constant(0, 4)}, tr.final(), 0), 1);
}

TEST(Gamma, SplitChoosesDisagreeingBranch) {
    std::vector<TTFunctional> fs{TTFunctional::bit_at(1, 0)};
    auto tr = build_gamma("1", "0", fs, 1);
    ASSERT_TRUE(tr.exists[0]);
    const Split& sp = *tr.steps[1].split;
    EXPECT_EQ(sp.sigma, "00");
    EXPECT_EQ(sp.tau, "01");
    EXPECT_EQ(sp.x, 0u);
    EXPECT_EQ(tr.final(), "00");
    EXPECT_EQ(fs[0].eval(tr.final(), 0), 0);
    EXPECT_TRUE(check_diagonalization(tr, fs, "1", tr.final()).empty());
}

TEST(Gamma, TwoRequirements) {
    for (auto fs : {std::vector<TTFunctional>{TTFunctional::bit_at(1, 0), TTFunctional::constant(1, 0)},
                    std::vector<TTFunctional>{TTFunctional::constant(1, 0), TTFunctional::bit_at(2, 0)}}) {
        auto tr = build_gamma("1", "10", fs, 2);
        EXPECT_EQ(tr.segments.size(), 5u);
        EXPECT_TRUE(check_diagonalization(tr, fs, "1", tr.final()).empty());
        EXPECT_EQ(recover_jump_bit(tr, fs, tr.final(), 0), 1);
        EXPECT_EQ(recover_jump_bit(tr, fs, tr.final(), 1), 0);
    }
}

TEST(Gamma, NoSplitTraceRecoversPositionally) {
    std::vector<TTFunctional> fs(5, TTFunctional::constant(0, 2));
    auto tr = build_gamma("0", "10110", fs, 5);
    EXPECT_EQ(tr.final(), "10110");
    for (std::size_t e = 0; e < 5; ++e)
        EXPECT_EQ(recover_jump_bit(tr, fs, tr.final() + "111", e), "10110"[e] - '0');
}

TEST(Gamma, IncompatibleOracleIsRejected) {
    std::vector<TTFunctional> fs{TTFunctional::bit_at(1, 0), TTFunctional::constant(0, 0)};
    auto tr = build_gamma("1", "11", fs, 2);
    EXPECT_THROW(recover_jump_bit(tr, fs, "1", 1), InvalidInput);
    // Branches 100 and 111 differ in two bits; D = 1010 follows neither.
    TTFunctional two;
    two.use = 3;
    two.table[{"100", 0}] = {0, 1};
    two.table[{"111", 0}] = {1, 1};
    auto t2 = build_gamma("1", "10", {two, fs[1]}, 2);
    EXPECT_EQ(t2.final(), "1000");
    EXPECT_THROW(recover_jump_bit(t2, {two, fs[1]}, "1010", 1), InvalidInput);
    // A split claimed where the functional cannot split.
    GammaTrace lying = build_gamma("1", "11", {fs[1], fs[1]}, 2);
    lying.exists[0] = true;
    EXPECT_THROW(recover_jump_bit(lying, {fs[1], fs[1]}, "1111", 1), InvalidInput);
}

TEST(Gamma, HorizonOnLateSplit) {
    TTFunctional f = TTFunctional::bit_at(1, 0, 300);
    EXPECT_THROW(build_gamma("1", "0", {f}, 1), Horizon);
    SearchCaps wide;
    wide.t = 400;
    EXPECT_NO_THROW(build_gamma("1", "0", {f}, 1, wide));
}

TEST(Gamma, RandomRunsRecoverAndDiagonalize) {
    std::mt19937_64 rng(41);
    int splits = 0;
    for (int run = 0; run < 300; ++run) {
        std::size_t E = 1 + run % 4;
        std::vector<TTFunctional> fs;
        for (std::size_t e = 0; e < E; ++e)
            fs.push_back(random_functional(rng));
        BitString B = random_bits(rng, 4), C = random_bits(rng, E);
        GammaTrace tr = build_gamma(B, C, fs, E);
        for (std::size_t s = 0; s + 1 < tr.segments.size(); ++s)
            ASSERT_TRUE(is_prefix(tr.segments[s], tr.segments[s + 1]));
        for (const auto& st : tr.steps)
            if (st.split) {
                ++splits;
                EXPECT_FALSE(is_prefix(st.split->sigma, st.split->tau));
                EXPECT_FALSE(is_prefix(st.split->tau, st.split->sigma));
            }
        BitString D = tr.final() + random_bits(rng, 5);
        EXPECT_TRUE(check_diagonalization(tr, fs, B, D).empty());
        for (std::size_t e = 0; e < E; ++e)
            EXPECT_EQ(recover_jump_bit(tr, fs, D, e), C[e] - '0');
    }
    EXPECT_GT(splits, 100);
}

TEST(Sim1, Examples) {
    // Labels 0..3; 0 and 1 share a jump, 2 and 3 share another; 0 <= 2, 1 <= 3.
    DegreeModel m{{2, 2, 3, 3}, {}};
    m.leq.assign(4, std::vector<bool>(4, false));
    for (int i = 0; i < 4; ++i)
        m.leq[i][i] = true;
    m.leq[0][2] = m.leq[1][3] = m.leq[0][3] = m.leq[1][2] = true;
    EXPECT_TRUE(check_sim1_closure(m, {true, true, true, true}));
    EXPECT_FALSE(check_sim1_closure(m, {true, false, false, false}));
    std::vector<bool> up = upward_closure(m, {false, false, false, true});
    EXPECT_TRUE(check_sim1_closure(m, jump_preimage(m, up)));
}
