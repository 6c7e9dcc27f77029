#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tnnloop/affine_perm.hpp"
#include "tnnloop/mtable.hpp"

namespace tnnloop {

// Eventually periodic word prefix . period^infinity over Z/n.
struct InfiniteWord {
    int n = 0;
    Word prefix;
    Word period;

    int letter(std::size_t p) const {
        if (p < prefix.size()) return prefix[p];
        return period[(p - prefix.size()) % period.size()];
    }

    Word truncation(std::size_t k) const {
        Word w;
        for (std::size_t p = 0; p < k; ++p) w.push_back(letter(p));
        return w;
    }

    void validate() const {
        if (n < 2) throw InputError("InfiniteWord: n must be >= 2");
        if (period.empty()) throw InputError("InfiniteWord: empty period");
        for (int x : prefix)
            if (x < 0 || x >= n) throw InputError("InfiniteWord: letter out of range");
        for (int x : period)
            if (x < 0 || x >= n) throw InputError("InfiniteWord: letter out of range");
    }
};

inline InfiniteWord normalize_period(const InfiniteWord& w) {
    w.validate();
    int N = finite_part_order(from_word(w.n, w.period));
    InfiniteWord out{w.n, w.prefix, {}};
    for (int r = 0; r < N; ++r) out.period.insert(out.period.end(), w.period.begin(), w.period.end());
    return out;
}

struct ReducedCertificate {
    bool reduced = false;
    std::size_t failure_index = 0;  // first k (1-based) with l(w^{(k)}) < k
    std::size_t checked = 0;        // letters checked stepwise
};

namespace detail {

// Line data of v t^K: m_alpha(K) = m0 + K d.
struct LineData {
    MAlphaTable m0;
    std::vector<std::int64_t> d;  // indexed like roots()
};

inline LineData line_data(const InfiniteWord& normalized) {
    const int n = normalized.n;
    AffinePerm v = from_word(n, normalized.prefix);
    CorootVector lam = translation_vector(from_word(n, normalized.period));
    AffinePerm vinv = v.inverse();
    LineData ld{m_table_of(v), {}};
    for (auto [i, j] : ld.m0.roots()) {
        auto a = static_cast<std::size_t>(pmod(vinv(i) - 1, n));
        auto b = static_cast<std::size_t>(pmod(vinv(j) - 1, n));
        ld.d.push_back(lam.lambda[b] - lam.lambda[a]);
    }
    return ld;
}

}  // namespace detail

inline ReducedCertificate certify_reduced(const InfiniteWord& word) {
    InfiniteWord w = normalize_period(word);
    ReducedCertificate cert;
    const std::size_t span = w.prefix.size() + 2 * w.period.size();
    AffinePerm x = AffinePerm::identity(w.n);
    for (std::size_t p = 0; p < span; ++p) {
        int i = w.letter(p);
        if (x.right_descent(i)) {
            cert.failure_index = p + 1;
            cert.checked = p + 1;
            return cert;
        }
        x = x.right_mul(i);
    }
    cert.checked = span;
    // Stepwise additivity through one period already forces every line to grow
    // without changing sign; checked here as an independent guard.
    auto ld = detail::line_data(w);
    std::size_t r = 0;
    for (auto [i, j] : ld.m0.roots()) {
        std::int64_t m = ld.m0.at(i, j).value, d = ld.d[r++];
        if ((m > 0 && d < 0) || (m < 0 && d > 0))
            throw DomainError("certify_reduced: sign-inconsistent line survived the stepwise check");
    }
    cert.reduced = true;
    return cert;
}

inline void require_reduced(const InfiniteWord& w) {
    auto c = certify_reduced(w);
    if (!c.reduced) throw DomainError("infinite word not reduced: failure at letter " + std::to_string(c.failure_index));
}

inline MAlphaTable m_table(const InfiniteWord& word) {
    require_reduced(word);
    auto ld = detail::line_data(normalize_period(word));
    MAlphaTable t(word.n);
    std::size_t r = 0;
    for (auto [i, j] : t.roots()) {
        std::int64_t d = ld.d[r++];
        if (d > 0)
            t.at(i, j) = MValue::plus_inf();
        else if (d < 0)
            t.at(i, j) = MValue::minus_inf();
        else
            t.at(i, j) = ld.m0.at(i, j);
    }
    return t;
}

// Ordered set partition of [n]; each part sorted.
struct SetComposition {
    int n = 0;
    std::vector<std::vector<int>> parts;

    friend bool operator==(const SetComposition& a, const SetComposition& b) {
        return a.n == b.n && a.parts == b.parts;
    }
    friend bool operator<(const SetComposition& a, const SetComposition& b) {
        return a.n != b.n ? a.n < b.n : a.parts < b.parts;
    }

    std::string str() const {
        std::string s = "(";
        for (std::size_t p = 0; p < parts.size(); ++p) {
            s += p ? ",{" : "{";
            for (std::size_t k = 0; k < parts[p].size(); ++k) s += (k ? "," : "") + std::to_string(parts[p][k]);
            s += "}";
        }
        return s + ")";
    }

    void validate() const {
        std::vector<int> seen(static_cast<std::size_t>(n + 1), 0);
        for (const auto& p : parts) {
            if (p.empty()) throw InputError("SetComposition: empty part");
            for (int x : p) {
                if (x < 1 || x > n) throw InputError("SetComposition: entry out of range");
                if (seen[static_cast<std::size_t>(x)]++) throw InputError("SetComposition: repeated entry");
            }
        }
        for (int x = 1; x <= n; ++x)
            if (!seen[static_cast<std::size_t>(x)]) throw InputError("SetComposition: parts do not cover [n]");
    }
};

// Total preorder of a table: for i < j, i <= j iff m_{ij} finite or +inf, j <= i iff finite or -inf.
inline SetComposition block_of_table(const MAlphaTable& t) {
    if (t.all_finite()) throw DomainError("block_of: finite inversion set has no block");
    const int n = t.n();
    auto le = [&](int a, int b) {
        if (a == b) return true;
        if (a < b) return t.at(a, b).kind != MValue::Kind::MinusInf;
        return t.at(b, a).kind != MValue::Kind::PlusInf;
    };
    std::map<int, std::vector<int>> by_rank;
    for (int a = 1; a <= n; ++a) {
        int below = 0;
        for (int b = 1; b <= n; ++b)
            if (le(b, a) && !le(a, b)) ++below;
        by_rank[below].push_back(a);
    }
    SetComposition g{n, {}};
    for (auto& [rank, part] : by_rank) g.parts.push_back(part);
    return g;
}

inline SetComposition block_of(const InfiniteWord& w) { return block_of_table(m_table(w)); }

inline bool limit_leq(const InfiniteWord& a, const InfiniteWord& b) { return table_leq(m_table(a), m_table(b)); }

inline bool limit_equivalent(const InfiniteWord& a, const InfiniteWord& b) { return m_table(a) == m_table(b); }

inline std::vector<SetComposition> blocks_enumerate(int n) {
    if (n < 2) throw InputError("blocks_enumerate: n must be >= 2");
    std::set<SetComposition> out;
    std::vector<int> label(static_cast<std::size_t>(n), 0);
    for (int k = 2; k <= n; ++k) {
        std::fill(label.begin(), label.end(), 0);
        for (;;) {
            std::vector<std::vector<int>> parts(static_cast<std::size_t>(k));
            for (int x = 1; x <= n; ++x) parts[static_cast<std::size_t>(label[static_cast<std::size_t>(x - 1)])].push_back(x);
            if (std::none_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); }))
                out.insert(SetComposition{n, parts});
            int pos = 0;
            while (pos < n && ++label[static_cast<std::size_t>(pos)] == k) label[static_cast<std::size_t>(pos++)] = 0;
            if (pos == n) break;
        }
    }
    return {out.begin(), out.end()};
}

// g1 <= g2 iff every part of g1 is a union of a consecutive run of parts of g2.
inline bool block_leq(const SetComposition& g1, const SetComposition& g2) {
    if (g1.n != g2.n) throw InputError("block_leq: mismatched n");
    std::size_t q = 0;
    for (const auto& part : g1.parts) {
        std::vector<int> acc;
        while (acc.size() < part.size() && q < g2.parts.size()) {
            acc.insert(acc.end(), g2.parts[q].begin(), g2.parts[q].end());
            ++q;
        }
        std::sort(acc.begin(), acc.end());
        if (acc != part) return false;
    }
    return q == g2.parts.size();
}

// lambda with lambda_i = index of the part containing i (1-based).
inline std::vector<int> block_levels(const SetComposition& g) {
    std::vector<int> lam(static_cast<std::size_t>(g.n), 0);
    for (std::size_t p = 0; p < g.parts.size(); ++p)
        for (int x : g.parts[p]) lam[static_cast<std::size_t>(x - 1)] = static_cast<int>(p) + 1;
    return lam;
}

struct WalkCheck {
    bool creates_descents = false;  // every step swaps lambda_i < lambda_{i+1}
    bool all_pairs_swapped = false; // every value pair (r, r+1) swapped at least once
    bool returns = false;           // the walk ends at the starting lambda
};

// s_i acts on positions; s_0 exchanges lambda_n and lambda_1.
inline WalkCheck check_walk(const std::vector<int>& lambda, const Word& word) {
    const int n = static_cast<int>(lambda.size());
    int k = *std::max_element(lambda.begin(), lambda.end());
    std::vector<bool> swapped(static_cast<std::size_t>(std::max(k, 1)), false);
    auto lam = lambda;
    WalkCheck c{true, false, false};
    for (int i : word) {
        if (i < 0 || i >= n) throw InputError("check_walk: letter out of range");
        auto a = static_cast<std::size_t>(i == 0 ? n - 1 : i - 1);
        auto b = static_cast<std::size_t>(i == 0 ? 0 : i);
        if (!(lam[a] < lam[b])) c.creates_descents = false;
        if (lam[b] == lam[a] + 1) swapped[static_cast<std::size_t>(lam[a])] = true;
        std::swap(lam[a], lam[b]);
    }
    c.all_pairs_swapped = true;
    for (int r = 1; r < k; ++r)
        if (!swapped[static_cast<std::size_t>(r)]) c.all_pairs_swapped = false;
    c.returns = lam == lambda;
    return c;
}

// Shortest walk satisfying both conditions, by breadth-first search over
// (arrangement, swapped pairs); certified before returning.
inline Word minimal_word_for_block(const SetComposition& g) {
    g.validate();
    if (g.parts.size() < 2) throw DomainError("minimal_word_for_block: need at least two parts");
    const int n = g.n;
    const auto start = block_levels(g);
    const int k = static_cast<int>(g.parts.size());
    const unsigned full = (1u << (k - 1)) - 1;
    using State = std::pair<std::vector<int>, unsigned>;
    std::map<State, std::pair<State, int>> parent;
    std::deque<State> queue;
    State s0{start, 0};
    parent[s0] = {s0, -1};
    queue.push_back(s0);
    std::optional<State> goal;
    while (!queue.empty() && !goal) {
        State cur = queue.front();
        queue.pop_front();
        for (int i = 0; i < n; ++i) {
            auto a = static_cast<std::size_t>(i == 0 ? n - 1 : i - 1);
            auto b = static_cast<std::size_t>(i == 0 ? 0 : i);
            const auto& lam = cur.first;
            if (!(lam[a] < lam[b])) continue;
            State nxt = cur;
            if (lam[b] == lam[a] + 1) nxt.second |= 1u << (lam[a] - 1);
            std::swap(nxt.first[a], nxt.first[b]);
            if (parent.count(nxt)) continue;
            parent[nxt] = {cur, i};
            if (nxt.first == start && nxt.second == full) {
                goal = nxt;
                break;
            }
            queue.push_back(nxt);
        }
    }
    if (!goal) throw DomainError("minimal_word_for_block: no admissible walk");
    Word rev;
    for (State s = *goal; parent[s].second >= 0; s = parent[s].first) rev.push_back(parent[s].second);
    Word w(rev.rbegin(), rev.rend());
    InfiniteWord inf{n, {}, w};
    if (!certify_reduced(inf).reduced || !(block_of(inf) == g))
        throw DomainError("minimal_word_for_block: certification failed");
    return w;
}

// Fully commutative = braid equivalent to c^infinity for a Coxeter element c.
inline bool is_fully_commutative(const InfiniteWord& w) {
    if (w.n < 3) throw DomainError("is_fully_commutative: n = 2 unsupported");
    auto t = m_table(w);
    for (unsigned mask = 1; mask + 1 < (1u << w.n); ++mask) {
        std::vector<int> part;
        for (int i = 1; i <= w.n; ++i)
            if (mask & (1u << (i - 1))) part.push_back(i);
        if (m_table(InfiniteWord{w.n, {}, coxeter_word(w.n, part)}) == t) return true;
    }
    return false;
}

// Whether alpha_j lies in the inversion set described by t.
inline bool simple_root_inverted(const MAlphaTable& t, int j) {
    const int n = t.n();
    if (j == 0) return t.at(1, n).negative();
    return t.at(j, j + 1).positive();
}

// Empty optional: j.word is reduced. Otherwise the unique 1-based k with
// s_j w^{(k)} = w^{(k-1)}.
inline std::optional<std::size_t> exchange_step(const InfiniteWord& word, int j) {
    if (j < 0 || j >= word.n) throw InputError("exchange_step: letter out of range");
    auto t = m_table(word);
    if (!simple_root_inverted(t, j)) return std::nullopt;
    AffinePerm x = AffinePerm::identity(word.n);
    for (std::size_t p = 0;; ++p) {
        x = x.right_mul(word.letter(p));
        if (x.left_descent(j)) return p + 1;
    }
}

struct ExchangeStep {
    int letter = 0;              // letter of the target word placed in front
    std::size_t crossed = 0;     // 1-based position in the source word that was removed
    std::size_t k = 0;           // 1-based position within the current word
};

namespace detail {

inline std::string containment_witness(const MAlphaTable& small, const MAlphaTable& big) {
    for (auto [i, j] : small.roots())
        if (!mvalue_leq(small.at(i, j), big.at(i, j)))
            return "root line (" + std::to_string(i) + "," + std::to_string(j) + "): " + small.at(i, j).str() +
                   " not below " + big.at(i, j).str();
    return "";
}

}  // namespace detail

inline std::vector<ExchangeStep> infinite_exchange_trace(const InfiniteWord& a, const InfiniteWord& b, std::size_t depth,
                                                         std::size_t scan_limit = 100000) {
    auto ta = m_table(a), tb = m_table(b);
    if (!table_leq(tb, ta))
        throw DomainError("no braid limit: " + detail::containment_witness(tb, ta));
    std::vector<ExchangeStep> out;
    if (ta == tb && a.prefix == b.prefix && a.period == b.period) return out;
    std::vector<std::size_t> alive;  // source positions still present, in order
    std::size_t materialized = 0;
    auto ensure = [&](std::size_t count) {
        while (alive.size() < count) alive.push_back(materialized++);
    };
    for (std::size_t t = 0; t < depth; ++t) {
        int j = b.letter(t);
        AffinePerm x = AffinePerm::identity(a.n);
        std::size_t p = 0;
        for (;; ++p) {
            if (p >= scan_limit) throw DomainError("infinite_exchange_trace: scan limit exceeded");
            ensure(p + 1);
            x = x.right_mul(a.letter(alive[p]));
            if (x.left_descent(j)) break;
        }
        out.push_back({j, alive[p] + 1, p + 1});
        alive.erase(alive.begin() + static_cast<long>(p));
    }
    return out;
}

inline bool join_exists(const InfiniteWord& a, const InfiniteWord& b) {
    auto ta = m_table(a), tb = m_table(b);
    for (auto [i, j] : ta.roots()) {
        const auto &x = ta.at(i, j), &y = tb.at(i, j);
        if ((x.positive() && y.negative()) || (x.negative() && y.positive())) return false;
    }
    return true;
}

struct LimitMeet {
    enum class Kind { Finite, Periodic, Undetermined };
    Kind kind = Kind::Undetermined;
    Word finite;          // Finite: reduced word of the meet; otherwise the last iterate
    InfiniteWord word;    // Periodic
};

inline LimitMeet limit_meet(const InfiniteWord& a, const InfiniteWord& b, std::size_t cap = 60) {
    if (a.n != b.n) throw InputError("limit_meet: mismatched n");
    if (limit_leq(a, b)) return {LimitMeet::Kind::Periodic, {}, a};
    if (limit_leq(b, a)) return {LimitMeet::Kind::Periodic, {}, b};
    const int n = a.n;
    auto ta = m_table(a), tb = m_table(b);
    Word inc;  // concatenated increments v_{k-1}^{-1} v_k
    AffinePerm v = AffinePerm::identity(n);
    std::size_t last_change = 0;
    for (std::size_t k = 1; k <= cap; ++k) {
        AffinePerm vk = weak_meet(from_word(n, a.truncation(k)), from_word(n, b.truncation(k)));
        if (vk != v) {
            if (!weak_leq(v, vk)) throw DomainError("limit_meet: iterates not increasing");
            Word step = reduced_word(v.inverse() * vk);
            inc.insert(inc.end(), step.begin(), step.end());
            v = vk;
            last_change = k;
        }
    }
    if (2 * last_change <= cap) return {LimitMeet::Kind::Finite, inc, {}};
    // eventually periodic increments
    const std::size_t L = inc.size();
    for (std::size_t P = 1; 3 * P <= L; ++P)
        for (std::size_t p0 = 0; p0 + 2 * P <= L && p0 <= L / 3; ++p0) {
            bool periodic = true;
            for (std::size_t q = p0; q + P < L; ++q)
                if (inc[q] != inc[q + P]) {
                    periodic = false;
                    break;
                }
            if (!periodic) continue;
            InfiniteWord cand{n, Word(inc.begin(), inc.begin() + static_cast<long>(p0)),
                              Word(inc.begin() + static_cast<long>(p0), inc.begin() + static_cast<long>(p0 + P))};
            if (!certify_reduced(cand).reduced) continue;
            auto tc = m_table(cand);
            if (table_leq(tc, ta) && table_leq(tc, tb)) return {LimitMeet::Kind::Periodic, inc, cand};
        }
    return {LimitMeet::Kind::Undetermined, inc, {}};
}

}  // namespace tnnloop
