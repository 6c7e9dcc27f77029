#pragma once

#include <optional>
#include <random>
#include <vector>

#include "tnnloop/affine_perm.hpp"
#include "tnnloop/limit_words.hpp"
#include "tnnloop/products.hpp"

namespace tnnloop {

struct ParamWord {
    int n = 0;
    Word letters;
    std::vector<Rational> params;

    void validate() const {
        if (n < 2) throw InputError("ParamWord: n must be >= 2");
        if (letters.size() != params.size()) throw InputError("ParamWord: letters and params differ in length");
        for (int x : letters)
            if (x < 0 || x >= n) throw InputError("ParamWord: letter out of range");
        for (const auto& a : params)
            if (a <= 0) throw InputError("ParamWord: parameters must be positive");
    }

    std::size_t size() const { return letters.size(); }
};

inline FoldedMatrix product_of(const ParamWord& pw, int D) { return finite_product(pw.n, D, pw.letters, pw.params); }

inline int cyclic_distance(int n, int i, int j) {
    int d = static_cast<int>(pmod(i - j, n));
    return std::min(d, n - d);
}

// Order of s_i s_j: 1, 2, 3, or 0 for infinite (n = 2, i != j).
inline int braid_order(int n, int i, int j) {
    if (i == j) return 1;
    if (n == 2) return 0;
    return cyclic_distance(n, i, j) >= 2 ? 2 : 3;
}

namespace detail {

inline void check_pos(const ParamWord& pw, std::size_t pos, std::size_t span, const char* what) {
    if (pos + span > pw.size()) throw InputError(std::string(what) + ": position out of range");
}

}  // namespace detail

inline ParamWord apply_commute(ParamWord pw, std::size_t pos) {
    detail::check_pos(pw, pos, 2, "apply_commute");
    if (braid_order(pw.n, pw.letters[pos], pw.letters[pos + 1]) != 2)
        throw DomainError("apply_commute: letters do not commute");
    std::swap(pw.letters[pos], pw.letters[pos + 1]);
    std::swap(pw.params[pos], pw.params[pos + 1]);
    return pw;
}

// e_i(a) e_j(b) e_i(c) = e_j(bc/(a+c)) e_i(a+c) e_j(ab/(a+c)) for adjacent i, j.
inline ParamWord apply_braid(ParamWord pw, std::size_t pos) {
    detail::check_pos(pw, pos, 3, "apply_braid");
    if (pw.n < 3) throw DomainError("apply_braid: no braid relation for n = 2");
    int i = pw.letters[pos], j = pw.letters[pos + 1];
    if (pw.letters[pos + 2] != i || braid_order(pw.n, i, j) != 3)
        throw DomainError("apply_braid: letters are not of the form i, i+-1, i");
    Rational a = pw.params[pos], b = pw.params[pos + 1], c = pw.params[pos + 2];
    Rational s = a + c;
    if (s == 0) throw DomainError("apply_braid: a + c = 0");
    pw.letters[pos] = j;
    pw.letters[pos + 1] = i;
    pw.letters[pos + 2] = j;
    pw.params[pos] = b * c / s;
    pw.params[pos + 1] = s;
    pw.params[pos + 2] = a * b / s;
    return pw;
}

inline ParamWord fuse_adjacent(ParamWord pw, std::size_t pos) {
    detail::check_pos(pw, pos, 2, "fuse_adjacent");
    if (pw.letters[pos] != pw.letters[pos + 1]) throw DomainError("fuse_adjacent: letters differ");
    pw.params[pos] += pw.params[pos + 1];
    pw.letters.erase(pw.letters.begin() + static_cast<long>(pos) + 1);
    pw.params.erase(pw.params.begin() + static_cast<long>(pos) + 1);
    return pw;
}

namespace detail {

inline void start_with(ParamWord& pw, std::size_t start, std::size_t end, int j);

// Rewrites pw[start, end) so that it begins with the alternating word a, b, a, ... of length m.
inline void start_alternating(ParamWord& pw, std::size_t start, std::size_t end, int a, int b, int m) {
    for (int k = 0; k < m; ++k) start_with(pw, start + static_cast<std::size_t>(k), end, k % 2 == 0 ? a : b);
}

// Rewrites the reduced word pw[start, end) by moves so that it begins with j, where j
// is a left descent of the element it represents.
inline void start_with(ParamWord& pw, std::size_t start, std::size_t end, int j) {
    if (start >= end) throw DomainError("rmap: letter is not a left descent");
    int i = pw.letters[start];
    if (i == j) return;
    int m = braid_order(pw.n, i, j);
    if (m == 0) throw DomainError("rmap: letters generate an infinite dihedral group");
    start_alternating(pw, start + 1, end, j, i, m - 1);
    pw = m == 2 ? apply_commute(pw, start) : apply_braid(pw, start);
}

}  // namespace detail

// Transports params from the reduced word src to the reduced word dst of the same element,
// placing dst letters at the front one at a time.
inline std::vector<Rational> rmap_finite(int n, const Word& src, const Word& dst, const std::vector<Rational>& params) {
    ParamWord pw{n, src, params};
    pw.validate();
    if (!is_reduced_word(n, src) || !is_reduced_word(n, dst)) throw DomainError("rmap_finite: words must be reduced");
    if (src.size() != dst.size() || from_word(n, src) != from_word(n, dst))
        throw DomainError("rmap_finite: words do not represent the same element");
    for (std::size_t t = 0; t < dst.size(); ++t) detail::start_with(pw, t, pw.size(), dst[t]);
    return pw.params;
}

// A random legal commutation or braid move, if any exists.
inline bool random_move(ParamWord& pw, std::mt19937_64& rng) {
    std::vector<std::pair<std::size_t, int>> moves;
    for (std::size_t p = 0; p + 1 < pw.size(); ++p) {
        if (braid_order(pw.n, pw.letters[p], pw.letters[p + 1]) == 2) moves.push_back({p, 2});
        if (p + 2 < pw.size() && pw.letters[p] == pw.letters[p + 2] && braid_order(pw.n, pw.letters[p], pw.letters[p + 1]) == 3)
            moves.push_back({p, 3});
    }
    if (moves.empty()) return false;
    auto [p, kind] = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
    pw = kind == 2 ? apply_commute(pw, p) : apply_braid(pw, p);
    return true;
}

struct LimitTransport {
    std::vector<Rational> params;  // first r parameters for the target word
    ParamWord remainder;           // the rest of the materialized source prefix, after transport
    std::size_t source_used = 0;   // number of source letters consumed
};

// First r parameters of R_src^dst(a). Each target letter is brought to the front of the
// shortest prefix of the current word that has it as a left descent, so only finitely many
// source parameters are involved and the values are exact. The exact identity
// e_src(a_1..a_L) = e_dst(params) e_remainder holds with L = source_used.
inline LimitTransport rmap_limit(const InfiniteWord& src, const ParamStream& stream, const InfiniteWord& dst, std::size_t r,
                                 std::size_t scan_limit = 100000) {
    src.validate();
    dst.validate();
    if (src.n != dst.n) throw InputError("rmap_limit: words have different n");
    infinite_exchange_trace(src, dst, r, scan_limit);  // throws when there is no braid limit
    ParamWord pw{src.n, {}, {}};
    std::size_t used = 0;
    for (std::size_t t = 0; t < r; ++t) {
        const int j = dst.letter(t);
        AffinePerm x = AffinePerm::identity(src.n);
        std::size_t p = t;
        for (;; ++p) {
            if (p >= t + scan_limit) throw DomainError("rmap_limit: scan limit exceeded");
            if (p == pw.size()) {
                pw.letters.push_back(src.letter(used));
                pw.params.push_back(stream.at(used));
                if (pw.params.back() <= 0) throw InputError("rmap_limit: parameters must be positive");
                ++used;
            }
            x = x.right_mul(pw.letters[p]);
            if (x.left_descent(j)) break;
        }
        detail::start_with(pw, t, p + 1, j);
    }
    LimitTransport out;
    out.params.assign(pw.params.begin(), pw.params.begin() + static_cast<long>(r));
    out.remainder = ParamWord{src.n, Word(pw.letters.begin() + static_cast<long>(r), pw.letters.end()),
                              std::vector<Rational>(pw.params.begin() + static_cast<long>(r), pw.params.end())};
    out.source_used = used;
    return out;
}

struct ExchangeReport {
    std::size_t m = 0;  // prefix length, 1..l
    int x = 0;          // residue
    Rational lhs_sum, rhs_sum, slack;
};

struct ExchangeResult {
    int j = 0;
    std::vector<Rational> transported;  // a'_1..a'_l
    Rational a_prime;                   // parameter of the final e_j
    std::vector<ExchangeReport> reports;
};

// Letter j with s_r v = v s_j, if v^{-1} s_r v is simple. Located from the window:
// v^{-1}(r + 1) must equal v^{-1}(r) + 1.
inline std::optional<int> exchange_letter(const AffinePerm& v, int r) {
    AffinePerm vi = v.inverse();
    Index l = vi(r), k = vi(r + 1);
    if (k != l + 1) return std::nullopt;
    return static_cast<int>(pmod(l, v.n()));
}

// e_r(a) e_word(params) = e_word(params') e_j(a'), and the inequalities
// sum_{s <= m, i_s = x} a'_s <= sum_{s <= m, i_s = x} a_s (+ a when x = r).
inline ExchangeResult tp_exchange_check(int n, int r, const Rational& a, const Word& word, const std::vector<Rational>& params) {
    if (n < 3) throw DomainError("tp_exchange_check: needs n >= 3");
    ParamWord pw{n, word, params};
    pw.validate();
    if (a <= 0) throw InputError("tp_exchange_check: a must be positive");
    if (r < 0 || r >= n) throw InputError("tp_exchange_check: letter out of range");
    if (!is_reduced_word(n, word)) throw DomainError("tp_exchange_check: word is not reduced");
    Word src{r};
    src.insert(src.end(), word.begin(), word.end());
    if (!is_reduced_word(n, src)) throw DomainError("tp_exchange_check: r followed by the word is not reduced");
    auto j = exchange_letter(from_word(n, word), r);
    if (!j) throw DomainError("tp_exchange_check: s_r v is not of the form v s_j");
    Word dst = word;
    dst.push_back(*j);
    std::vector<Rational> sp{a};
    sp.insert(sp.end(), params.begin(), params.end());
    auto out_params = rmap_finite(n, src, dst, sp);
    ExchangeResult res;
    res.j = *j;
    res.transported.assign(out_params.begin(), out_params.end() - 1);
    res.a_prime = out_params.back();
    for (std::size_t m = 1; m <= word.size(); ++m)
        for (int x = 0; x < n; ++x) {
            ExchangeReport rep{m, x, 0, x == r ? a : Rational(0), 0};
            for (std::size_t s = 0; s < m; ++s)
                if (word[s] == x) {
                    rep.lhs_sum += res.transported[s];
                    rep.rhs_sum += params[s];
                }
            rep.slack = rep.rhs_sum - rep.lhs_sum;
            res.reports.push_back(rep);
        }
    return res;
}

inline const ExchangeReport& find_report(const ExchangeResult& r, std::size_t m, int x) {
    for (const auto& rep : r.reports)
        if (rep.m == m && rep.x == x) return rep;
    throw InputError("find_report: no such (m, x)");
}

// Join of w and s_r w in weak order, for w whose only right descent is s_0 and s_r w > w.
inline AffinePerm tp_join(const AffinePerm& w, Index r) {
    const int n = w.n();
    if (right_descents(w) != std::vector<int>{0}) throw DomainError("tp_join: w must have s_0 as its only right descent");
    AffinePerm wi = w.inverse();
    const Index l = wi(r), k = wi(r + 1);
    if (k < l) throw DomainError("tp_join: s_r w < w");
    if (k == l + 1) {
        if (pmod(l, n) == 0) throw DomainError("tp_join: case (1) with l = 0 mod n");
        return w.right_mul(static_cast<int>(pmod(l, n)));
    }
    std::vector<Index> zeros;
    for (Index m = l; m <= k; ++m)
        if (pmod(m, n) == 0) zeros.push_back(m);
    if (zeros.size() != 1) throw DomainError("tp_join: [l, k] must contain exactly one multiple of n (no join)");
    const Index m = zeros.front();
    AffinePerm v = w;
    for (Index p = l; p < m; ++p) v = v.right_mul(static_cast<int>(pmod(p, n)));
    for (Index p = k - 1; p >= m; --p) v = v.right_mul(static_cast<int>(pmod(p, n)));
    if (length(v) != length(w) + (m - l) + (k - m)) throw DomainError("tp_join: explicit word is not reduced (no join)");
    return v;
}

}  // namespace tnnloop
