#pragma once

#include <optional>
#include <vector>

#include "tnnloop/folded_matrix.hpp"
#include "tnnloop/limit_words.hpp"

namespace tnnloop {

inline FoldedMatrix finite_product(int n, int D, const Word& word, const std::vector<Rational>& params) {
    if (word.size() != params.size()) throw InputError("finite_product: word and params differ in length");
    FoldedMatrix X = FoldedMatrix::identity(n, D);
    for (std::size_t p = word.size(); p-- > 0;) X.left_mul_chevalley(word[p], params[p]);
    return X;
}

// Parameter stream: an explicit head, optionally followed by scale * ratio^k (k = 0, 1, ...).
struct ParamStream {
    std::vector<Rational> head;
    std::optional<Rational> scale, ratio;

    static ParamStream explicit_list(std::vector<Rational> xs) {
        ParamStream s;
        s.head = std::move(xs);
        return s;
    }

    static ParamStream geometric(const Rational& scale, const Rational& ratio) {
        if (ratio <= 0 || ratio >= 1) throw InputError("geometric stream needs 0 < ratio < 1");
        if (scale < 0) throw InputError("geometric stream needs a nonnegative scale");
        ParamStream s;
        s.scale = scale;
        s.ratio = ratio;
        return s;
    }

    bool has_tail() const { return scale.has_value(); }

    Rational at(std::size_t k) const {
        if (k < head.size()) return head[k];
        if (!has_tail()) throw InputError("parameter stream exhausted at index " + std::to_string(k));
        return *scale * rpow(*ratio, static_cast<long>(k - head.size()));
    }

    // Sum of all parameters from index k on.
    Rational tail_sum(std::size_t k) const {
        Rational s = 0;
        for (std::size_t p = k; p < head.size(); ++p) s += head[p];
        if (has_tail()) {
            std::size_t skip = k > head.size() ? k - head.size() : 0;
            s += *scale * rpow(*ratio, static_cast<long>(skip)) / (1 - *ratio);
        }
        return s;
    }
};

struct TruncatedProduct {
    FoldedMatrix matrix;
    Rational tail_sum;
};

// Product of the first K factors e_{i_k}(a_k); tail_sum bounds the neglected parameters.
inline TruncatedProduct infinite_product(const InfiniteWord& word, const ParamStream& params, std::size_t K, int D) {
    word.validate();
    Word letters = word.truncation(K);
    std::vector<Rational> a;
    for (std::size_t k = 0; k < K; ++k) {
        a.push_back(params.at(k));
        if (a.back() < 0) throw InputError("infinite_product: negative parameter");
    }
    return {finite_product(word.n, D, letters, a), params.tail_sum(K)};
}

// eta(i, j): sum of (j - r) over multiples r of 3 with i < r < j.
inline Index example_eta(Index i, Index j) {
    Index s = 0;
    for (Index r = i + 1; r < j; ++r)
        if (pmod(r, 3) == 0) s += j - r;
    return s;
}

// Closed form of prod_{k >= 0} e_0(a^k) e_1(a^k) e_2(a^k), n = 3.
inline FoldedMatrix example_X(int D, const Rational& a) {
    if (a <= 0 || a >= 1) throw InputError("example_X: need 0 < a < 1");
    FoldedMatrix X(3, D);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k <= D; ++k) {
                Index i = r + 1, j = c + 1 + 3 * k;
                if (j < i) continue;
                Rational v = rpow(a, static_cast<long>(example_eta(i, j)));
                for (Index t = 1; t <= j - i; ++t) v /= 1 - rpow(a, static_cast<long>(t));
                X.at(r, c)[k] = v;
            }
    return X;
}

}  // namespace tnnloop
