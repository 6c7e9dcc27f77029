#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tnnloop/rational.hpp"

namespace tnnloop {

// Value of m_alpha on one finite root line: an integer or +-infinity.
struct MValue {
    enum class Kind { Finite, PlusInf, MinusInf };
    Kind kind = Kind::Finite;
    std::int64_t value = 0;

    static MValue finite(std::int64_t v) { return {Kind::Finite, v}; }
    static MValue plus_inf() { return {Kind::PlusInf, 0}; }
    static MValue minus_inf() { return {Kind::MinusInf, 0}; }

    bool is_finite() const { return kind == Kind::Finite; }
    bool positive() const { return kind == Kind::PlusInf || (is_finite() && value > 0); }
    bool negative() const { return kind == Kind::MinusInf || (is_finite() && value < 0); }

    friend bool operator==(const MValue& a, const MValue& b) {
        return a.kind == b.kind && (a.kind != Kind::Finite || a.value == b.value);
    }

    std::string str() const {
        if (kind == Kind::PlusInf) return "+inf";
        if (kind == Kind::MinusInf) return "-inf";
        return std::to_string(value);
    }
};

// m_alpha for every finite positive root alpha_{i,j}, 1 <= i < j <= n.
class MAlphaTable {
public:
    MAlphaTable() = default;
    explicit MAlphaTable(int n) : n_(n), vals_(static_cast<std::size_t>(n * (n - 1) / 2)) {
        if (n < 2) throw InputError("MAlphaTable: n must be >= 2");
    }

    int n() const { return n_; }

    const MValue& at(int i, int j) const { return vals_[index(i, j)]; }
    MValue& at(int i, int j) { return vals_[index(i, j)]; }

    std::vector<std::pair<int, int>> roots() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 1; i <= n_; ++i)
            for (int j = i + 1; j <= n_; ++j) out.emplace_back(i, j);
        return out;
    }

    bool all_finite() const {
        for (const auto& v : vals_)
            if (!v.is_finite()) return false;
        return true;
    }

    // Number of inverted roots, only meaningful for all-finite tables.
    std::int64_t finite_size() const {
        std::int64_t s = 0;
        for (const auto& v : vals_)
            if (v.is_finite()) s += v.value < 0 ? -v.value : v.value;
        return s;
    }

    friend bool operator==(const MAlphaTable& a, const MAlphaTable& b) {
        return a.n_ == b.n_ && a.vals_ == b.vals_;
    }

private:
    std::size_t index(int i, int j) const {
        if (i < 1 || j > n_ || i >= j) throw InputError("root index out of range");
        // rows i=1..n-1 hold n-i entries each
        std::size_t base = static_cast<std::size_t>((i - 1) * n_ - (i - 1) * i / 2);
        return base + static_cast<std::size_t>(j - i - 1);
    }

    int n_ = 0;
    std::vector<MValue> vals_;
};

namespace detail {

// One triple alpha + beta = gamma; the admissible rows of the biconvexity table.
inline bool biconvex_row(const MValue& a, const MValue& b, const MValue& g) {
    if (a.is_finite() && b.is_finite()) {
        if (!g.is_finite()) return false;
        std::int64_t s = a.value + b.value;
        return g.value == s || g.value == s - 1;
    }
    if (!a.is_finite() && b.is_finite()) return g.kind == a.kind;
    if (a.is_finite() && !b.is_finite()) return g.kind == b.kind;
    if (a.kind == b.kind) return g.kind == a.kind;
    return true;  // opposite infinities: anything
}

}  // namespace detail

inline bool is_biconvex(const MAlphaTable& t) {
    const int n = t.n();
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int k = j + 1; k <= n; ++k)
                if (!detail::biconvex_row(t.at(i, j), t.at(j, k), t.at(i, k))) return false;
    return true;
}

// Inv(a) contained in Inv(b), line by line.
inline bool mvalue_leq(const MValue& a, const MValue& b) {
    using K = MValue::Kind;
    if (a.is_finite() && a.value == 0) return true;
    if (a.positive()) {
        if (!b.positive()) return false;
        if (b.kind == K::PlusInf) return true;
        if (a.kind == K::PlusInf) return false;
        return a.value <= b.value;
    }
    if (!b.negative()) return false;
    if (b.kind == K::MinusInf) return true;
    if (a.kind == K::MinusInf) return false;
    return a.value >= b.value;
}

inline bool table_leq(const MAlphaTable& a, const MAlphaTable& b) {
    if (a.n() != b.n()) throw InputError("table_leq: mismatched n");
    for (auto [i, j] : a.roots())
        if (!mvalue_leq(a.at(i, j), b.at(i, j))) return false;
    return true;
}

}  // namespace tnnloop
