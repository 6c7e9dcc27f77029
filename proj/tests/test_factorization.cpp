#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tnnloop/factorization.hpp"

using namespace tnnloop;

namespace {

const Rational kHalf(1, 2);

Rational eps_at(const std::vector<Rational>& v, int i) { return v[param_slot(static_cast<int>(v.size()), i)]; }

}  // namespace

TEST(Epsilon, ExampleSequenceWithinClosedFormBounds) {
    auto X = example_X(15, kHalf);
    const Index J = 14;
    auto e1 = epsilon(X, 1, J), e2 = epsilon(X, 2, J), e0 = epsilon(X, 0, J);
    EXPECT_LE(rabs(Rational(e1.value - 1)), 2 * rpow(kHalf, J - 1));
    EXPECT_LE(rabs(Rational(e0.value - 1)), 2 * rpow(kHalf, J - 1));
    EXPECT_GE(e2.value, 0);
    EXPECT_LE(e2.value, 2 * rpow(kHalf, J - 3));
    // window values are upper bounds of a nonincreasing sequence
    EXPECT_GE(e1.value, 1);
    EXPECT_GE(e0.value, 1);
    EXPECT_EQ(e1.column_used, J);
}

TEST(Epsilon, LeftChevalleyShiftsOnlyTwoRatios) {
    auto Y = example_X(12, kHalf);
    const Rational a(3, 7);
    for (int i = 0; i < 3; ++i) {
        FoldedMatrix X = Y;
        X.left_mul_chevalley(i, a);
        const Index J = 20;
        // row i gains a times row i+1, so every window ratio shifts by exactly a
        EXPECT_EQ(epsilon(X, i, J).value, epsilon(Y, i, J).value + a);
        int k = (i + 1) % 3;  // neither i nor i-1
        EXPECT_EQ(epsilon(X, k, J).value, epsilon(Y, k, J).value);
    }
}

TEST(Epsilon, FiniteByEntryInspection) {
    const Rational a(2, 3), b(5, 4);
    auto E = chevalley(3, 4, 1, a);
    EXPECT_EQ(epsilon_finite(E, 1), a);
    EXPECT_EQ(epsilon_finite(E, 2), 0);
    EXPECT_EQ(epsilon_finite(E, 0), 0);

    // e_1(a) e_2(b): x_{1,2} = a, x_{1,3} = ab, x_{2,3} = b, all other off-diagonal entries in rows 1..3 vanish.
    auto P = finite_product(3, 4, {1, 2}, {a, b});
    ASSERT_EQ(P.unfold(1, 3), a * b);
    EXPECT_EQ(epsilon_finite(P, 1), P.unfold(1, 3) / P.unfold(2, 3));
    EXPECT_EQ(epsilon_finite(P, 1), a);
    EXPECT_EQ(epsilon_finite(P, 2), b);
    EXPECT_EQ(epsilon_finite(P, 0), 0);

    auto I = FoldedMatrix::identity(4, 3);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(epsilon_finite(I, i), 0);
}

TEST(Epsilon, DispatchAndErrors) {
    auto P = finite_product(3, 4, {1, 2, 0}, {1, 2, 3});
    EXPECT_THROW(epsilon(P, 1, 12), DomainError);  // finite row, zero denominator at the column
    auto X = example_X(6, kHalf);
    EXPECT_THROW(epsilon_finite(X, 1), DomainError);
    EXPECT_THROW(epsilon(X, 1, 20), DomainError);  // beyond n * D
    EXPECT_EQ(epsilon_auto(P, 1, 12).value, epsilon_finite(P, 1));
    EXPECT_EQ(epsilon_auto(X, 1, 12).value, epsilon(X, 1, 12).value);
}

TEST(Mu, WhirlAndIdentity) {
    const int n = 4;
    std::vector<Rational> a{Rational(1, 2), Rational(3), Rational(2, 5), Rational(7, 3)};
    auto M = whirl(n, 5, a);
    // X^{-c} of a whirl is a curl, which is not finitely supported; mu goes through the window
    for (int j = 1; j <= n; ++j) {
        auto m = mu_via_c_inverse(M, j, 18);
        EXPECT_EQ(m.value, eps_at(a, j)) << j;
    }
    auto I = FoldedMatrix::identity(3, 4);
    for (int j = 1; j <= 3; ++j) EXPECT_EQ(mu_finite(I, j), 0);
}

TEST(Mu, DirectAgreesWithCInverseOnExample) {
    auto X = example_X(15, kHalf);
    for (int j = 1; j <= 3; ++j) {
        auto d = mu(X, j, -30);
        auto c = mu_via_c_inverse(X, j, 30);
        EXPECT_GE(d.value, 0);
        EXPECT_GE(c.value, 0);
        EXPECT_LE(rabs(Rational(d.value - c.value)), Rational(1, 1000)) << j;
    }
}

TEST(Asw, SingleDegenerateCurlIsExact) {
    const int n = 4;
    std::vector<Rational> a{Rational(2), 0, Rational(1, 3), Rational(5, 2)};
    auto N = curl(n, 6, a);
    ASSERT_TRUE(N.finitely_supported());
    auto s = asw_step(N);
    EXPECT_EQ(s.params, a);
    EXPECT_TRUE(is_identity(s.residual));
}

TEST(Asw, IdentityGivesEmptyTrace) {
    auto t = asw_factorize(FoldedMatrix::identity(3, 4), 5);
    EXPECT_TRUE(t.factors.empty());
    EXPECT_TRUE(t.finite);
}

TEST(Asw, FiniteProductsReconstructExactly) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + trial % 3;
        const int len = 1 + static_cast<int>(rng() % 12);
        auto w = testsupport::random_reduced_word(n, len, rng);
        auto p = testsupport::random_params(w.size(), rng);
        const int D = len / n + 3;
        auto X = finite_product(n, D, w, p);
        AswOptions o;
        if (trial % 10 == 0) o.check_window = 7;
        auto t = asw_factorize(X, 2 * len + 2, o);
        EXPECT_TRUE(is_identity(t.residual));
        EXPECT_EQ(reconstruct(t), X);
        EXPECT_EQ(static_cast<int>(t.word.size()), len);
        EXPECT_TRUE(is_reduced_word(n, t.word));
        EXPECT_EQ(finite_product(n, D, t.word, t.params), X);
    }
}

TEST(Asw, ExampleFirstTwoCurls) {
    auto X = example_X(15, kHalf);
    auto s1 = asw_step(X);
    EXPECT_LE(rabs(Rational(eps_at(s1.params, 1) - 1)), Rational(1, 1000));
    EXPECT_LE(eps_at(s1.params, 2), Rational(1, 1000));
    EXPECT_LE(rabs(Rational(eps_at(s1.params, 3) - 1)), Rational(1, 1000));

    AswOptions o;
    o.column = 12;
    o.relative_zero = Rational(1, 1000);
    auto s2 = asw_step(s1.residual, o);
    EXPECT_EQ(curl_support(s2.params), (std::vector<int>{0, 2}));
    EXPECT_LE(rabs(Rational(eps_at(s2.params, 2) - 1)), Rational(1, 1000));
    EXPECT_LE(rabs(Rational(eps_at(s2.params, 3) - kHalf)), Rational(1, 1000));
}

TEST(Asw, ResidualCheckReportsNegativeMinor) {
    auto X = example_X(15, kHalf);
    // Extracting too much at letter 2 leaves a negative entry in row 2.
    FoldedMatrix Y = X;
    Y.left_mul_chevalley(2, Rational(-3));
    EXPECT_TRUE(find_negative_minor(Y, 8).has_value());
    AswOptions o;
    o.check_window = 8;
    EXPECT_NO_THROW(asw_step(X, o));
}

TEST(AswCell, SampledCoxeterProducts) {
    auto S = sample_Acinf(from_word(3, {0, 1, 2}), kHalf, 2, 40, 20);
    auto c = asw_cell(S.matrix, 8);
    EXPECT_EQ(c.l, 1u);
    EXPECT_EQ(c.w, from_word(3, {0, 1}));
    EXPECT_EQ(c.v, from_word(3, {2, 0}));
    EXPECT_TRUE(compatible_pair(c.w, c.v));
}

TEST(AswCell, PrefixedFourStrandSample) {
    const int n = 4, D = 14;
    auto Z = sample_Acinf(from_word(n, {2, 1, 0, 3}), kHalf, 2, 40, D);
    FoldedMatrix X = Z.matrix;
    const std::vector<std::vector<int>> supports{{1, 2, 3}, {0, 2}, {1, 3}};
    for (std::size_t k = supports.size(); k-- > 0;) {
        std::vector<Rational> a(n, 0);
        for (int i : supports[k]) a[param_slot(n, i)] = Rational(1 + i, 2);
        X = curl(n, D, a) * X;
    }
    auto c = asw_cell(X, 8);
    EXPECT_EQ(c.w, from_word(n, {1, 2, 3, 0, 2, 1, 3, 2}));
    EXPECT_EQ(c.v, from_word(n, {1}));
}

TEST(AswCell, FiniteInputIsRejected) {
    auto X = finite_product(3, 4, {0, 1, 2}, {1, 1, 1});
    EXPECT_THROW(asw_cell(X, 6), DomainError);
}

TEST(AswCell, StabilizationNeedsTwoConfirmations) {
    FactorizationTrace t;
    t.residual = FoldedMatrix::identity(3, 2);
    auto add = [&](std::vector<int> supp) {
        std::vector<Rational> a(3, 0);
        for (int i : supp) a[param_slot(3, i)] = 1;
        t.factors.push_back({Factor::Kind::Curl, a, -1});
    };
    add({0, 1});
    add({0, 2});
    EXPECT_THROW(asw_cell_from_trace(t), DomainError);
    add({1, 2});
    auto c = asw_cell_from_trace(t);
    EXPECT_EQ(c.l, 1u);
    EXPECT_EQ(c.w, from_word(3, {0, 1}));
    EXPECT_EQ(c.v, rotate(from_word(3, {0, 1}), 1));
}

TEST(AswCell, LengthDropDelaysStabilization) {
    const int n = 4;
    FactorizationTrace t;
    t.residual = FoldedMatrix::identity(n, 2);
    // v_1 = s1s2s3, v_2 = s0s2, v_3 = s1s3, v_4 = s2, then s1, s0 rotating
    for (std::vector<int> supp : {std::vector<int>{1, 2, 3}, {0, 2}, {1, 3}, {2}, {1}, {0}}) {
        std::vector<Rational> a(n, 0);
        for (int i : supp) a[param_slot(n, i)] = 1;
        t.factors.push_back({Factor::Kind::Curl, a, -1});
    }
    auto c = asw_cell_from_trace(t);
    EXPECT_EQ(c.l, 4u);
    EXPECT_EQ(c.w, from_word(n, {1, 2, 3, 0, 2, 1, 3, 2}));
    EXPECT_EQ(c.v, from_word(n, {1}));
}

TEST(WhirlAsw, SingleWhirlAndProducts) {
    const int n = 3, D = 6;
    std::vector<Rational> a{Rational(1, 2), Rational(2), Rational(3, 4)};
    auto s = whirl_asw_step(whirl(n, D, a));
    EXPECT_EQ(s.params, a);
    EXPECT_TRUE(is_identity(s.residual));

    // Products of whirls have irrational mu in general; the trace still multiplies back exactly.
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        FoldedMatrix X = FoldedMatrix::identity(n, D);
        for (int k = 0; k < 3; ++k) X = X * whirl(n, D, testsupport::random_params(n, rng));
        AswOptions o;
        o.stop_at_rise = true;
        auto t = whirl_asw_factorize(X, 2, o);
        ASSERT_EQ(t.factors.size(), 2u);
        EXPECT_EQ(reconstruct_right(t), X);
        for (const auto& f : t.factors)
            for (const auto& b : f.params) EXPECT_GE(b, 0);
    }
    EXPECT_EQ(whirl_asw_factorize(FoldedMatrix::identity(n, D), 3).factors.size(), 0u);
}

TEST(Mq, FirstOrderIsMinusEpsilonWhirl) {
    auto X = example_X(15, kHalf);
    auto M1 = mq_matrix(X, 1, 14);
    for (Index i = 1; i <= 3; ++i) {
        EXPECT_EQ(M1.matrix.unfold(i, i), 1);
        auto e = epsilon(X, static_cast<int>(i), i + 14);
        EXPECT_LE(rabs(Rational(M1.matrix.unfold(i, i + 1) + e.value)), Rational(1, 1000));
    }
}

TEST(Mq, SecondOrderExampleValues) {
    auto X = example_X(15, kHalf);
    auto M2 = mq_matrix(X, 2, 12);
    const Rational tol(1, 1000);
    EXPECT_LE(rabs(M2.matrix.unfold(1, 3)), tol);
    EXPECT_LE(rabs(Rational(M2.matrix.unfold(3, 4) + 1 + kHalf)), tol);
    EXPECT_LE(rabs(Rational(M2.matrix.unfold(3, 5) - kHalf)), tol);
    for (const auto& row : M2.gaps)
        for (const auto& g : row) EXPECT_LT(g, tol);
    // m_{2,1,3} at the last column block l equals the closed form at l = 12
    const Index l = 12;
    Rational closed = rpow(kHalf, 2 * l - 3) / ((1 - rpow(kHalf, l - 1)) * (1 - rpow(kHalf, l)));
    EXPECT_EQ(M2.matrix.unfold(1, 3), closed);
}

TEST(Mq, WindowTooSmall) {
    auto X = example_X(6, kHalf);
    EXPECT_THROW(mq_matrix(X, 3, 5), DomainError);
    EXPECT_THROW(mq_matrix(X, 0, 10), InputError);
}

TEST(MinorRatio, AgreesWithEpsilonOffTheMissingLetter) {
    auto X = example_X(15, kHalf);
    for (int i : {0, 2}) {
        auto r = minor_ratio_limit(X, {i}, {i + 1}, 30);
        auto e = epsilon(X, i, 30);
        EXPECT_LE(rabs(Rational(r.value - e.value)), r.gap + e.gap + Rational(1, 1000000)) << i;
        for (std::size_t k = 1; k < r.terms.size(); ++k) EXPECT_LE(r.terms[k], r.terms[k - 1]);
    }
    // Letter 1 never leads (012)^inf, so the greedy value is 0 although epsilon_1 = 1.
    auto r1 = minor_ratio_limit(X, {1}, {2}, 30);
    EXPECT_LE(r1.value, Rational(1, 1000));
    EXPECT_GE(epsilon(X, 1, 30).value, 1);
}

TEST(MinorRatio, EqualRowSetsGiveOne) {
    auto X = example_X(10, kHalf);
    auto r = minor_ratio_limit(X, {1, 2}, {1, 2}, 20);
    for (const auto& t : r.terms) EXPECT_EQ(t, 1);
}

TEST(Greedy, StepIsMaximal) {
    auto X = example_X(15, kHalf);
    auto g = greedy_step(X, 0, 30, 10);
    EXPECT_LE(rabs(Rational(g.a - 1)), Rational(1, 1000));
    FoldedMatrix over = X;
    over.left_mul_chevalley(0, -(g.a + Rational(1, 100)));
    EXPECT_TRUE(find_negative_minor(over, 12).has_value());
}

TEST(Greedy, TripleMatchesSequentialSteps) {
    auto X = example_X(15, kHalf);
    auto t = greedy_triple(X, 0, "iji", 30);
    auto g1 = greedy_step(X, 0, 30);
    EXPECT_EQ(t.a1, g1.a);
    auto g2 = greedy_step(g1.residual, 1, 27);
    EXPECT_LE(rabs(Rational(t.a2 - g2.a)), t.gap + g2.gap + Rational(1, 1000));
    auto u = greedy_triple(X, 0, "jij", 30);
    EXPECT_GE(u.a1, 0);
    EXPECT_GE(u.a2, 0);
    EXPECT_GE(u.a3, 0);
    EXPECT_THROW(greedy_triple(X, 0, "iij", 30), InputError);
}

TEST(Greedy, FiniteReducedProductsHaveWitnesses) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + trial % 3;
        auto w = testsupport::random_reduced_word(n, 1 + static_cast<int>(rng() % 10), rng);
        auto p = testsupport::random_params(w.size(), rng);
        auto v = verify_greedy_finite(n, w, p);
        EXPECT_TRUE(v.greedy) << "failed at " << v.failed_at;
        ASSERT_EQ(v.witnesses.size(), w.size());
        for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(v.witnesses[k].ratio, p[k]);
    }
    EXPECT_THROW(verify_greedy_finite(3, {1, 1}, {1, 1}), DomainError);
}

TEST(Coxeter, PeelRecoversSampleStream) {
    auto c = from_word(3, {0, 1, 2});
    auto S = sample_Acinf(c, kHalf, 2, 40, 20);
    EXPECT_TRUE(S.matrix.finitely_supported());
    auto P = coxeter_peel(S.matrix, c, 15, 30);
    ASSERT_EQ(P.params.size(), 15u);
    for (std::size_t k = 0; k < 15; ++k) {
        EXPECT_EQ(S.params[k], rpow(kHalf, 3 + static_cast<long>(k)));
        EXPECT_LE(rabs(Rational(P.params[k] / S.params[k] - 1)), rpow(kHalf, 15));
    }
    EXPECT_TRUE(is_tnn_window(P.residual, 12));
    EXPECT_TRUE(coxeter_peel(S.matrix, c, 0, 30).params.empty());
}

TEST(Coxeter, EpsilonSignatureFollowsOrientation) {
    for (int n : {3, 4}) {
        for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<int> first;
            for (int i = 1; i <= n; ++i)
                if (mask & (1u << (i - 1))) first.push_back(i);
            Word cw = coxeter_word(n, first);
            auto S = sample_Acinf(from_word(n, cw), kHalf, 2, 8 * n, 12);
            std::vector<int> pos(static_cast<std::size_t>(n));
            for (int p = 0; p < n; ++p) pos[static_cast<std::size_t>(cw[static_cast<std::size_t>(p)])] = p;
            for (int i = 0; i < n; ++i) {
                bool precedes = pos[static_cast<std::size_t>(i)] < pos[static_cast<std::size_t>((i + 1) % n)];
                EXPECT_EQ(epsilon_finite(S.matrix, i) > 0, precedes) << "n=" << n << " mask=" << mask << " i=" << i;
            }
        }
    }
    auto I = sample_Acinf(from_word(3, {0, 1, 2}), kHalf, 2, 0, 4);
    EXPECT_TRUE(is_identity(I.matrix));
}
