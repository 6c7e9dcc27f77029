#pragma once

#include <random>
#include <vector>

#include "tnnloop/affine_perm.hpp"

namespace testsupport {

using tnnloop::AffinePerm;
using tnnloop::Word;

// Reduced word of the requested length, grown letter by letter.
inline Word random_reduced_word(int n, int len, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    Word w;
    AffinePerm x = AffinePerm::identity(n);
    while (static_cast<int>(w.size()) < len) {
        int i = pick(rng);
        if (x.right_descent(i)) continue;
        x = x.right_mul(i);
        w.push_back(i);
    }
    return w;
}

inline tnnloop::Rational random_positive(std::mt19937_64& rng, int maxnum = 9, int maxden = 5) {
    std::uniform_int_distribution<int> num(1, maxnum), den(1, maxden);
    tnnloop::Rational q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

inline std::vector<tnnloop::Rational> random_params(std::size_t k, std::mt19937_64& rng) {
    std::vector<tnnloop::Rational> p;
    for (std::size_t i = 0; i < k; ++i) {
        p.push_back(random_positive(rng));
    }
    return p;
}

// All elements of length <= maxlen, by breadth-first search.
inline std::vector<AffinePerm> all_elements_up_to(int n, int maxlen) {
    std::vector<AffinePerm> out{AffinePerm::identity(n)};
    std::vector<AffinePerm> layer = out;
    for (int l = 1; l <= maxlen; ++l) {
        std::vector<AffinePerm> next;
        for (const auto& x : layer)
            for (int i = 0; i < n; ++i)
                if (!x.right_descent(i)) {
                    auto y = x.right_mul(i);
                    if (std::find(next.begin(), next.end(), y) == next.end()) next.push_back(y);
                }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

}  // namespace testsupport
