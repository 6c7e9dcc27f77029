#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "tnnloop/mtable.hpp"
#include "tnnloop/rational.hpp"

namespace tnnloop {

using Word = std::vector<int>;

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline std::int64_t pmod(std::int64_t a, std::int64_t b) { return a - b * floor_div(a, b); }

// Affine permutation in window notation [w(1), ..., w(n)].
class AffinePerm {
public:
    AffinePerm() = default;

    AffinePerm(int n, std::vector<std::int64_t> window) : n_(n), w_(std::move(window)) {
        if (n < 1) throw InputError("AffinePerm: n must be positive");
        if (static_cast<int>(w_.size()) != n) throw InputError("AffinePerm: window size != n");
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::int64_t sum = 0;
        for (auto v : w_) {
            auto r = static_cast<std::size_t>(pmod(v, n));
            if (seen[r]) throw InputError("AffinePerm: window values collide mod n");
            seen[r] = true;
            sum += v;
        }
        if (sum != static_cast<std::int64_t>(n) * (n + 1) / 2)
            throw InputError("AffinePerm: window sum must be n(n+1)/2");
    }

    static AffinePerm identity(int n) {
        std::vector<std::int64_t> w(static_cast<std::size_t>(n));
        std::iota(w.begin(), w.end(), 1);
        return AffinePerm(n, std::move(w));
    }

    int n() const { return n_; }
    const std::vector<std::int64_t>& window() const { return w_; }

    std::int64_t operator()(std::int64_t x) const {
        std::int64_t k = floor_div(x - 1, n_);
        std::int64_t r = x - k * n_;  // 1..n
        return w_[static_cast<std::size_t>(r - 1)] + k * n_;
    }

    AffinePerm inverse() const {
        std::vector<std::int64_t> inv(static_cast<std::size_t>(n_));
        for (int i = 1; i <= n_; ++i) {
            std::int64_t v = w_[static_cast<std::size_t>(i - 1)];
            std::int64_t k = floor_div(v - 1, n_);
            inv[static_cast<std::size_t>(v - k * n_ - 1)] = i - k * n_;
        }
        return AffinePerm(n_, std::move(inv));
    }

    bool is_identity() const {
        for (int i = 0; i < n_; ++i)
            if (w_[static_cast<std::size_t>(i)] != i + 1) return false;
        return true;
    }

    // w * s_i: swaps positions i and i+1.
    AffinePerm right_mul(int i) const {
        check_letter(i);
        auto w = w_;
        if (i == 0) {
            std::int64_t first = w[0], last = w[static_cast<std::size_t>(n_ - 1)];
            w[0] = last - n_;
            w[static_cast<std::size_t>(n_ - 1)] = first + n_;
        } else {
            std::swap(w[static_cast<std::size_t>(i - 1)], w[static_cast<std::size_t>(i)]);
        }
        AffinePerm out;
        out.n_ = n_;
        out.w_ = std::move(w);
        return out;
    }

    // s_i * w: swaps the values i and i+1 (mod n classes).
    AffinePerm left_mul(int i) const {
        check_letter(i);
        auto w = w_;
        for (auto& v : w) {
            std::int64_t r = pmod(v, n_);
            if (r == i)
                v += 1;
            else if (r == pmod(i + 1, n_))
                v -= 1;
        }
        AffinePerm out;
        out.n_ = n_;
        out.w_ = std::move(w);
        return out;
    }

    bool right_descent(int i) const {
        check_letter(i);
        return (*this)(i) > (*this)(i + 1);
    }

    bool left_descent(int i) const {
        check_letter(i);
        AffinePerm inv = inverse();
        return inv(i) > inv(i + 1);
    }

    friend bool operator==(const AffinePerm& a, const AffinePerm& b) { return a.n_ == b.n_ && a.w_ == b.w_; }
    friend bool operator!=(const AffinePerm& a, const AffinePerm& b) { return !(a == b); }
    friend bool operator<(const AffinePerm& a, const AffinePerm& b) {
        return a.n_ != b.n_ ? a.n_ < b.n_ : a.w_ < b.w_;
    }

    std::string str() const {
        std::string s = "[";
        for (std::size_t k = 0; k < w_.size(); ++k) s += (k ? "," : "") + std::to_string(w_[k]);
        return s + "]";
    }

private:
    void check_letter(int i) const {
        if (i < 0 || i >= n_) throw InputError("letter out of range: " + std::to_string(i));
    }

    int n_ = 0;
    std::vector<std::int64_t> w_;
};

inline AffinePerm multiply(const AffinePerm& u, const AffinePerm& v) {
    if (u.n() != v.n()) throw InputError("multiply: mismatched n");
    std::vector<std::int64_t> w(static_cast<std::size_t>(u.n()));
    for (int i = 1; i <= u.n(); ++i) w[static_cast<std::size_t>(i - 1)] = u(v(i));
    return AffinePerm(u.n(), std::move(w));
}

inline AffinePerm operator*(const AffinePerm& u, const AffinePerm& v) { return multiply(u, v); }

inline AffinePerm from_word(int n, const Word& word) {
    if (n < 2) throw InputError("from_word: n must be >= 2");
    AffinePerm w = AffinePerm::identity(n);
    for (int i : word) w = w.right_mul(i);
    return w;
}

inline AffinePerm simple(int n, int i) { return from_word(n, {i}); }

// m_alpha for alpha = alpha_{i,j}: min{k : nk > w^{-1}(i) - w^{-1}(j)}.
inline MAlphaTable m_table_of(const AffinePerm& w) {
    const int n = w.n();
    AffinePerm inv = w.inverse();
    MAlphaTable t(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) t.at(i, j) = MValue::finite(floor_div(inv(i) - inv(j), n) + 1);
    return t;
}

inline std::int64_t length(const AffinePerm& w) {
    if (w.n() < 2) return 0;
    return m_table_of(w).finite_size();
}

inline std::vector<int> left_descents(const AffinePerm& w) {
    std::vector<int> out;
    for (int i = 0; i < w.n(); ++i)
        if (w.left_descent(i)) out.push_back(i);
    return out;
}

inline std::vector<int> right_descents(const AffinePerm& w) {
    std::vector<int> out;
    for (int i = 0; i < w.n(); ++i)
        if (w.right_descent(i)) out.push_back(i);
    return out;
}

// A reduced word for w, peeling the smallest right descent each time.
inline Word reduced_word(const AffinePerm& w) {
    Word rev;
    AffinePerm x = w;
    while (!x.is_identity()) {
        int d = -1;
        for (int i = 0; i < x.n(); ++i)
            if (x.right_descent(i)) {
                d = i;
                break;
            }
        rev.push_back(d);
        x = x.right_mul(d);
    }
    return Word(rev.rbegin(), rev.rend());
}

inline bool is_reduced_word(int n, const Word& word) {
    AffinePerm w = AffinePerm::identity(n);
    for (int i : word) {
        if (w.right_descent(i)) return false;
        w = w.right_mul(i);
    }
    return true;
}

struct CorootVector {
    int n = 0;
    std::vector<std::int64_t> lambda;
};

inline AffinePerm translation(const CorootVector& c) {
    if (static_cast<int>(c.lambda.size()) != c.n) throw InputError("translation: lambda size != n");
    std::int64_t s = 0;
    for (auto x : c.lambda) s += x;
    if (s != 0) throw DomainError("translation: lambda must sum to zero");
    std::vector<std::int64_t> w(static_cast<std::size_t>(c.n));
    for (int i = 1; i <= c.n; ++i) w[static_cast<std::size_t>(i - 1)] = i + c.n * c.lambda[static_cast<std::size_t>(i - 1)];
    return AffinePerm(c.n, std::move(w));
}

// Finite part as a permutation of 1..n (index i-1 -> residue of w(i) in 1..n).
inline std::vector<int> finite_part(const AffinePerm& w) {
    std::vector<int> p(static_cast<std::size_t>(w.n()));
    for (int i = 1; i <= w.n(); ++i) p[static_cast<std::size_t>(i - 1)] = static_cast<int>(pmod(w(i) - 1, w.n())) + 1;
    return p;
}

inline int finite_part_order(const AffinePerm& w) {
    auto p = finite_part(w);
    std::vector<bool> seen(p.size(), false);
    std::int64_t ord = 1;
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (seen[s]) continue;
        std::int64_t len = 0;
        for (std::size_t x = s; !seen[x]; x = static_cast<std::size_t>(p[x] - 1)) {
            seen[x] = true;
            ++len;
        }
        ord = std::lcm(ord, len);
    }
    return static_cast<int>(ord);
}

inline bool is_translation(const AffinePerm& w) {
    for (int i = 1; i <= w.n(); ++i)
        if (pmod(w(i) - i, w.n()) != 0) return false;
    return true;
}

// lambda with w = t_lambda; requires is_translation(w).
inline CorootVector translation_vector(const AffinePerm& w) {
    if (!is_translation(w)) throw DomainError("not a translation");
    CorootVector c{w.n(), {}};
    for (int i = 1; i <= w.n(); ++i) c.lambda.push_back((w(i) - i) / w.n());
    return c;
}

inline AffinePerm power(const AffinePerm& w, int k) {
    AffinePerm r = AffinePerm::identity(w.n());
    for (int i = 0; i < k; ++i) r = r * w;
    return r;
}

// Right weak order: v <= w iff l(v) + l(v^{-1} w) = l(w).
inline bool weak_leq(const AffinePerm& v, const AffinePerm& w) {
    if (v.n() != w.n()) throw InputError("weak_leq: mismatched n");
    return length(v) + length(v.inverse() * w) == length(w);
}

inline AffinePerm weak_meet(const AffinePerm& v, const AffinePerm& w) {
    if (v.n() != w.n()) throw InputError("weak_meet: mismatched n");
    AffinePerm a = v, b = w;
    Word peeled;
    for (;;) {
        int common = -1;
        for (int i = 0; i < a.n(); ++i)
            if (a.left_descent(i) && b.left_descent(i)) {
                common = i;
                break;
            }
        if (common < 0) break;
        peeled.push_back(common);
        a = a.left_mul(common);
        b = b.left_mul(common);
    }
    return from_word(v.n(), peeled);
}

// Bruhat order by the subword property: [e, w] is the set of products of subwords
// of any reduced word of w.
inline bool bruhat_leq(const AffinePerm& u, const AffinePerm& w) {
    if (u.n() != w.n()) throw InputError("bruhat_leq: mismatched n");
    auto lu = length(u), lw = length(w);
    if (lu > lw) return false;
    std::set<AffinePerm> reach{AffinePerm::identity(w.n())};
    for (int i : reduced_word(w)) {
        std::vector<AffinePerm> add;
        for (const auto& x : reach) add.push_back(x.right_mul(i));
        reach.insert(add.begin(), add.end());
    }
    return reach.count(u) > 0;
}

// Cyclically increasing element with the given support (a proper subset of Z/n).
inline Word cyclically_increasing_word(int n, const std::vector<int>& support) {
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (int i : support) {
        if (i < 0 || i >= n) throw InputError("support letter out of range");
        in[static_cast<std::size_t>(i)] = true;
    }
    if (std::all_of(in.begin(), in.end(), [](bool b) { return b; }))
        throw DomainError("cyclically increasing support must be proper");
    Word w;
    for (int s = 0; s < n; ++s) {
        if (!in[static_cast<std::size_t>(s)] || in[static_cast<std::size_t>(pmod(s - 1, n))]) continue;
        for (int x = s; in[static_cast<std::size_t>(x)]; x = static_cast<int>(pmod(x + 1, n))) w.push_back(x);
    }
    return w;
}

inline AffinePerm cyclically_increasing(int n, const std::vector<int>& support) {
    return from_word(n, cyclically_increasing_word(n, support));
}

// Support = set of letters in any reduced word.
inline std::vector<int> support_of(const AffinePerm& w) {
    auto word = reduced_word(w);
    std::set<int> s(word.begin(), word.end());
    return {s.begin(), s.end()};
}

struct CIFactor {
    AffinePerm v;
    AffinePerm u;
    std::vector<int> support;
};

inline CIFactor cyclically_increasing_factor(const AffinePerm& w) {
    if (w.is_identity()) throw DomainError("cyclically_increasing_factor: identity input");
    const int n = w.n();
    std::vector<std::vector<int>> good;
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        if (weak_leq(cyclically_increasing(n, s), w)) good.push_back(s);
    }
    const std::vector<int>* best = nullptr;
    for (const auto& s : good) {
        bool dominates = true;
        for (const auto& t : good)
            if (!std::includes(s.begin(), s.end(), t.begin(), t.end())) {
                dominates = false;
                break;
            }
        if (dominates) {
            best = &s;
            break;
        }
    }
    if (!best) throw DomainError("cyclically_increasing_factor: no unique maximal factor");
    AffinePerm v = cyclically_increasing(n, *best);
    return {v, v.inverse() * w, *best};
}

// v^{(k)}: the diagram rotation s_i -> s_{i-k}.
inline AffinePerm rotate(const AffinePerm& v, int k) {
    std::vector<std::int64_t> w(static_cast<std::size_t>(v.n()));
    for (int i = 1; i <= v.n(); ++i) w[static_cast<std::size_t>(i - 1)] = v(i + k) - k;
    return AffinePerm(v.n(), std::move(w));
}

inline Word rotate_word(int n, const Word& word, int k) {
    Word out;
    for (int i : word) out.push_back(static_cast<int>(pmod(i - k, n)));
    return out;
}

inline std::vector<AffinePerm> asw_factor_perm(const AffinePerm& w) {
    std::vector<AffinePerm> out;
    AffinePerm x = w;
    while (!x.is_identity()) {
        auto f = cyclically_increasing_factor(x);
        out.push_back(f.v);
        x = f.u;
    }
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (!bruhat_leq(out[i + 1], rotate(out[i], 1)))
            throw DomainError("asw_factor_perm: rotation condition violated");
    return out;
}

inline bool compatible_pair(const AffinePerm& w, const AffinePerm& v) {
    if (w.n() != v.n()) throw InputError("compatible_pair: mismatched n");
    if (w.is_identity()) throw DomainError("compatible_pair: w must not be the identity");
    auto f = asw_factor_perm(w);
    const std::size_t k = f.size();
    if (v != rotate(f[k - 1], 1)) return false;
    if (k == 1) return true;
    return f[k - 1] != rotate(f[k - 2], 1);
}

inline Word demazure_reduce(int n, const Word& word) {
    AffinePerm d = AffinePerm::identity(n);
    Word out;
    for (int i : word) {
        if (i < 0 || i >= n) throw InputError("letter out of range");
        if (!d.right_descent(i)) {
            d = d.right_mul(i);
            out.push_back(i);
        }
    }
    return out;
}

inline AffinePerm demazure_product(int n, const Word& word) { return from_word(n, demazure_reduce(n, word)); }

// Coxeter element of the orientation where i in first_part iff s_i precedes s_{i-1}.
// first_part is a subset of [n] = {1..n}, with n standing for the letter 0.
inline Word coxeter_word(int n, const std::vector<int>& first_part) {
    if (n < 2) throw InputError("coxeter_element: n must be >= 2");
    std::vector<bool> first(static_cast<std::size_t>(n), false);
    for (int i : first_part) {
        if (i < 1 || i > n) throw InputError("first_part entries must lie in [n]");
        first[static_cast<std::size_t>(i % n)] = true;
    }
    auto cnt = std::count(first.begin(), first.end(), true);
    if (cnt == 0 || cnt == n) throw DomainError("first_part must be a proper nonempty subset");
    // before[a] lists letters that must precede a
    std::vector<std::vector<int>> before(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int prev = static_cast<int>(pmod(i - 1, n));
        if (first[static_cast<std::size_t>(i)])
            before[static_cast<std::size_t>(prev)].push_back(i);
        else
            before[static_cast<std::size_t>(i)].push_back(prev);
    }
    Word out;
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    while (static_cast<int>(out.size()) < n) {
        int pick = -1;
        for (int a = 0; a < n && pick < 0; ++a) {
            if (done[static_cast<std::size_t>(a)]) continue;
            bool ready = true;
            for (int b : before[static_cast<std::size_t>(a)])
                if (!done[static_cast<std::size_t>(b)]) ready = false;
            if (ready) pick = a;
        }
        if (pick < 0) throw DomainError("coxeter_element: cyclic orientation");
        done[static_cast<std::size_t>(pick)] = true;
        out.push_back(pick);
    }
    return out;
}

inline AffinePerm coxeter_element(int n, const std::vector<int>& first_part) {
    return from_word(n, coxeter_word(n, first_part));
}

// Inverse of coxeter_element: {i in [n] : s_i precedes s_{i-1}}.
inline std::vector<int> coxeter_first_part(const AffinePerm& c) {
    const int n = c.n();
    auto word = reduced_word(c);
    if (static_cast<int>(word.size()) != n) throw DomainError("not a Coxeter element");
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    for (std::size_t p = 0; p < word.size(); ++p) {
        if (pos[static_cast<std::size_t>(word[p])] >= 0) throw DomainError("not a Coxeter element");
        pos[static_cast<std::size_t>(word[p])] = static_cast<int>(p);
    }
    std::vector<int> out;
    for (int i = 1; i <= n; ++i)
        if (pos[static_cast<std::size_t>(i % n)] < pos[static_cast<std::size_t>(i - 1)]) out.push_back(i);
    return out;
}

}  // namespace tnnloop
