#include <gtest/gtest.h>

#include <map>
#include <random>

#include "support.hpp"
#include "tnnloop/affine_perm.hpp"

using namespace tnnloop;
using testsupport::all_elements_up_to;
using testsupport::random_reduced_word;

namespace {

using Win = std::vector<std::int64_t>;

// Inversions counted directly: pairs of positions a < b, a in [1,n], w(a) > w(b).
std::int64_t inversion_count(const AffinePerm& w) {
    const int n = w.n();
    std::int64_t lo = w(1), hi = w(1);
    for (int i = 1; i <= n; ++i) {
        lo = std::min(lo, w(i) - i);
        hi = std::max(hi, w(i));
    }
    std::int64_t c = 0;
    for (int a = 1; a <= n; ++a)
        for (std::int64_t b = a + 1; b <= hi - lo + n + 1; ++b)
            if (w(a) > w(b)) ++c;
    return c;
}

// Left inversions sorted into root lines: values p < q with w^{-1}(p) > w^{-1}(q).
MAlphaTable brute_table(const AffinePerm& w) {
    const int n = w.n();
    AffinePerm u = w.inverse();
    std::map<std::pair<int, int>, std::pair<int, int>> cnt;  // line -> (+count, -count)
    std::int64_t span = 0;
    for (int i = 1; i <= n; ++i) span = std::max<std::int64_t>(span, std::abs(u(i) - i));
    for (int p = 1; p <= n; ++p)
        for (std::int64_t q = p + 1; q <= p + 2 * span + 2 * n; ++q) {
            if (pmod(q - p, n) == 0 || u(p) <= u(q)) continue;
            int rp = static_cast<int>(pmod(p - 1, n)) + 1, rq = static_cast<int>(pmod(q - 1, n)) + 1;
            if (rp < rq)
                cnt[{rp, rq}].first++;
            else
                cnt[{rq, rp}].second++;
        }
    MAlphaTable t(n);
    for (auto [i, j] : t.roots()) {
        auto c = cnt[{i, j}];
        t.at(i, j) = MValue::finite(c.first > 0 ? c.first : -c.second);
    }
    return t;
}

}  // namespace

TEST(AffinePerm, FromWordExamples) {
    EXPECT_EQ(from_word(3, {}).window(), (Win{1, 2, 3}));
    EXPECT_EQ(from_word(3, {0, 1}).window(), (Win{2, 0, 4}));
    EXPECT_EQ(from_word(3, {0}).window(), (Win{0, 2, 4}));
    EXPECT_EQ(from_word(5, {2, 4, 3, 1, 0, 4, 3, 2, 1, 0, 2, 1, 4, 3}).window(), (Win{1, -3, 13, -1, 5}));
    EXPECT_THROW(from_word(3, {3}), InputError);
}

TEST(AffinePerm, RejectsBadWindows) {
    EXPECT_THROW(AffinePerm(3, {1, 2, 4}), InputError);
    EXPECT_THROW(AffinePerm(3, {1, 4, 1}), InputError);
}

TEST(AffinePerm, Multiply) {
    auto w = from_word(5, {2, 1, 4, 0, 1, 4, 3});
    EXPECT_EQ((w * w).window(), (Win{1, -3, 13, -1, 5}));
    auto id = AffinePerm::identity(4);
    auto x = from_word(4, {1, 2, 0, 3});
    EXPECT_EQ(id * x, x);
    EXPECT_TRUE((simple(3, 1) * simple(3, 1)).is_identity());
    EXPECT_THROW(multiply(AffinePerm::identity(3), x), InputError);
}

TEST(AffinePerm, LeftAndRightMultiplication) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + trial % 4;
        auto w = from_word(n, random_reduced_word(n, 5, rng));
        for (int i = 0; i < n; ++i) {
            EXPECT_EQ(w.right_mul(i), w * simple(n, i));
            EXPECT_EQ(w.left_mul(i), simple(n, i) * w);
        }
        EXPECT_TRUE((w * w.inverse()).is_identity());
    }
}

TEST(AffinePerm, LengthExamples) {
    EXPECT_EQ(length(AffinePerm::identity(4)), 0);
    EXPECT_EQ(length(translation({5, {0, -1, 2, -1, 0}})), 14);
    EXPECT_EQ(length(from_word(3, {1, 2, 1, 0})), 4);
}

TEST(AffinePerm, LengthMatchesInversionCountAndWordLength) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + trial % 5;
        int len = trial % 11;
        auto word = random_reduced_word(n, len, rng);
        auto w = from_word(n, word);
        EXPECT_EQ(length(w), len);
        EXPECT_EQ(inversion_count(w), len);
        EXPECT_EQ(length(w.inverse()), len);
    }
}

TEST(AffinePerm, MTableExamples) {
    auto t = m_table_of(from_word(3, {1, 2, 1, 0}));
    EXPECT_EQ(t.at(1, 2), MValue::finite(1));
    EXPECT_EQ(t.at(2, 3), MValue::finite(1));
    EXPECT_EQ(t.at(1, 3), MValue::finite(2));
    auto z = m_table_of(AffinePerm::identity(4));
    for (auto [i, j] : z.roots()) EXPECT_EQ(z.at(i, j), MValue::finite(0));
    EXPECT_EQ(m_table_of(from_word(3, {0, 1})), brute_table(from_word(3, {0, 1})));
}

TEST(AffinePerm, MTableMatchesBruteForceAndIsBiconvex) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + trial % 4;
        auto w = from_word(n, random_reduced_word(n, trial % 9, rng));
        auto t = m_table_of(w);
        EXPECT_EQ(t, brute_table(w)) << w.str();
        EXPECT_TRUE(is_biconvex(t));
    }
}

TEST(AffinePerm, TranslationLengthIndependentOfWeylConjugate) {
    // lambda = (1,0,-1): every permutation of the entries gives length 4
    std::vector<std::int64_t> lam{1, 0, -1};
    std::sort(lam.begin(), lam.end());
    do {
        auto t = translation({3, lam});
        EXPECT_EQ(length(t), 4);
        EXPECT_EQ(inversion_count(t), 4);
    } while (std::next_permutation(lam.begin(), lam.end()));

    std::mt19937_64 rng(14);
    for (int n = 2; n <= 5; ++n)
        for (int trial = 0; trial < 5; ++trial) {
            std::uniform_int_distribution<int> d(-3, 3);
            std::vector<std::int64_t> l(static_cast<std::size_t>(n));
            std::int64_t s = 0;
            for (int i = 0; i + 1 < n; ++i) s += (l[static_cast<std::size_t>(i)] = d(rng));
            l[static_cast<std::size_t>(n - 1)] = -s;
            std::sort(l.begin(), l.end());
            std::int64_t ref = length(translation({n, l}));
            do {
                EXPECT_EQ(length(translation({n, l})), ref);
            } while (std::next_permutation(l.begin(), l.end()));
        }
    EXPECT_TRUE(translation({4, {0, 0, 0, 0}}).is_identity());
    EXPECT_THROW(translation({3, {1, 0, 0}}), DomainError);
}

TEST(AffinePerm, WeakOrder) {
    auto w = from_word(3, {1, 2, 1, 0});
    EXPECT_TRUE(weak_leq(AffinePerm::identity(3), w));
    EXPECT_TRUE(weak_leq(simple(3, 1), w));
    EXPECT_FALSE(weak_leq(simple(3, 0), from_word(3, {1, 2})));

    // every prefix of a reduced word lies below it
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 3 + trial % 3;
        auto word = random_reduced_word(n, 7, rng);
        auto full = from_word(n, word);
        for (std::size_t k = 0; k <= word.size(); ++k) {
            Word pre(word.begin(), word.begin() + static_cast<long>(k));
            EXPECT_TRUE(weak_leq(from_word(n, pre), full));
            EXPECT_TRUE(table_leq(m_table_of(from_word(n, pre)), m_table_of(full)));
        }
    }
}

TEST(AffinePerm, WeakMeetExamples) {
    auto w = from_word(3, {1, 2, 0});
    EXPECT_EQ(weak_meet(w, w), w);
    EXPECT_EQ(weak_meet(from_word(3, {0, 1}), from_word(3, {0, 2})), simple(3, 0));
    EXPECT_TRUE(weak_meet(simple(3, 1), simple(3, 2)).is_identity());
}

TEST(AffinePerm, WeakMeetIsGreatestLowerBound) {
    for (int n = 2; n <= 4; ++n) {
        auto elems = all_elements_up_to(n, n == 4 ? 4 : 5);
        std::mt19937_64 rng(16 + n);
        std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
        for (int trial = 0; trial < 60; ++trial) {
            const auto& a = elems[pick(rng)];
            const auto& b = elems[pick(rng)];
            auto m = weak_meet(a, b);
            ASSERT_TRUE(weak_leq(m, a));
            ASSERT_TRUE(weak_leq(m, b));
            for (const auto& x : elems)
                if (weak_leq(x, a) && weak_leq(x, b)) {
                    ASSERT_TRUE(weak_leq(x, m));
                }
        }
    }
}

TEST(AffinePerm, BruhatOrder) {
    EXPECT_TRUE(bruhat_leq(simple(3, 0), from_word(3, {1, 0, 2})));
    EXPECT_FALSE(bruhat_leq(from_word(3, {0, 1}), from_word(3, {1, 0})));
    EXPECT_TRUE(bruhat_leq(from_word(3, {0, 2}), from_word(3, {0, 1, 2})));
}

TEST(AffinePerm, CyclicallyIncreasingFactorExamples) {
    auto w = from_word(4, {1, 2, 3, 0, 2, 1, 3, 2});
    auto f = cyclically_increasing_factor(w);
    EXPECT_EQ(f.v, from_word(4, {1, 2, 3}));
    EXPECT_EQ(f.v * f.u, w);

    auto s2 = cyclically_increasing_factor(simple(4, 2));
    EXPECT_EQ(s2.v, simple(4, 2));
    EXPECT_TRUE(s2.u.is_identity());
    EXPECT_THROW(cyclically_increasing_factor(AffinePerm::identity(4)), DomainError);
}

TEST(AffinePerm, CyclicallyIncreasingFactorIsBruhatMaximal) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 3 + trial % 2;
        auto w = from_word(n, random_reduced_word(n, 6, rng));
        auto f = cyclically_increasing_factor(w);
        EXPECT_EQ(length(f.v) + length(f.u), length(w));
        for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<int> s;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) s.push_back(i);
            auto v = cyclically_increasing(n, s);
            if (weak_leq(v, w)) {
                EXPECT_TRUE(bruhat_leq(v, f.v));
            }
        }
    }
}

TEST(AffinePerm, AswFactorPerm) {
    EXPECT_TRUE(asw_factor_perm(AffinePerm::identity(3)).empty());
    auto f = asw_factor_perm(from_word(4, {1, 2, 3, 0, 2, 1, 3, 2}));
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[0], from_word(4, {1, 2, 3}));
    EXPECT_EQ(f[1], from_word(4, {0, 2}));
    EXPECT_EQ(f[2], from_word(4, {1, 3}));
    EXPECT_EQ(f[3], from_word(4, {2}));

    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 3 + trial % 3;
        auto w = from_word(n, random_reduced_word(n, 1 + trial % 8, rng));
        auto fs = asw_factor_perm(w);
        AffinePerm prod = AffinePerm::identity(n);
        std::int64_t len = 0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            prod = prod * fs[i];
            len += length(fs[i]);
            if (i + 1 < fs.size()) {
                EXPECT_TRUE(bruhat_leq(fs[i + 1], rotate(fs[i], 1)));
            }
        }
        EXPECT_EQ(prod, w);
        EXPECT_EQ(len, length(w));
    }
}

TEST(AffinePerm, Rotate) {
    auto v = from_word(4, {0, 2, 1});
    EXPECT_EQ(rotate(v, 0), v);
    EXPECT_EQ(rotate(simple(4, 2), 1), simple(4, 1));
    EXPECT_EQ(rotate(from_word(4, {0, 2}), 1), from_word(4, {3, 1}));

    // word-level definition agrees for two different reduced words
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 3 + trial % 3;
        auto word = random_reduced_word(n, 1 + trial % 6, rng);
        auto w = from_word(n, word);
        auto other = reduced_word(w);
        for (int k = -2; k <= 3; ++k) {
            EXPECT_EQ(from_word(n, rotate_word(n, word, k)), rotate(w, k));
            EXPECT_EQ(from_word(n, rotate_word(n, other, k)), rotate(w, k));
        }
    }
}

TEST(AffinePerm, CompatiblePair) {
    auto w = from_word(4, {1, 2, 3, 0, 2, 1, 3, 2});
    EXPECT_TRUE(compatible_pair(w, simple(4, 1)));
    EXPECT_FALSE(compatible_pair(w, simple(4, 2)));
    EXPECT_TRUE(compatible_pair(simple(4, 1), simple(4, 0)));
    EXPECT_THROW(compatible_pair(AffinePerm::identity(4), simple(4, 0)), DomainError);
}

TEST(AffinePerm, DemazureReduce) {
    EXPECT_EQ(demazure_reduce(3, {1, 1}), (Word{1}));
    EXPECT_EQ(demazure_reduce(3, {1, 2, 1, 2}), (Word{1, 2, 1}));
    EXPECT_EQ(demazure_reduce(4, {0, 1, 3}), (Word{0, 1, 3}));

    // associativity: Demazure product of a concatenation equals the product of the parts
    std::mt19937_64 rng(20);
    std::uniform_int_distribution<int> len(0, 8);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + trial % 4;
        std::uniform_int_distribution<int> let(0, n - 1);
        Word a, b;
        for (int k = len(rng); k > 0; --k) a.push_back(let(rng));
        for (int k = len(rng); k > 0; --k) b.push_back(let(rng));
        Word ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        auto red = demazure_reduce(n, ab);
        EXPECT_TRUE(is_reduced_word(n, red));
        Word ra = demazure_reduce(n, a);
        Word rab = ra;
        rab.insert(rab.end(), b.begin(), b.end());
        EXPECT_EQ(demazure_product(n, rab), from_word(n, red));
    }
}

TEST(AffinePerm, CoxeterElements) {
    EXPECT_EQ(coxeter_element(5, {2, 4}), from_word(5, {2, 4, 0, 1, 3}));
    EXPECT_EQ(coxeter_element(3, {3}), from_word(3, {0, 1, 2}));
    EXPECT_THROW(coxeter_element(3, {}), DomainError);
    EXPECT_THROW(coxeter_element(3, {1, 2, 3}), DomainError);
    for (int n = 2; n <= 6; ++n) {
        std::set<AffinePerm> seen;
        for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<int> part;
            for (int i = 1; i <= n; ++i)
                if (mask & (1u << (i - 1))) part.push_back(i);
            auto c = coxeter_element(n, part);
            EXPECT_EQ(length(c), n);
            EXPECT_EQ(coxeter_first_part(c), part);
            seen.insert(c);
        }
        EXPECT_EQ(seen.size(), (1u << n) - 2);
    }
}
