#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tnnloop/affine_perm.hpp"
#include "tnnloop/folded_matrix.hpp"

namespace tnnloop {

struct MinorWitness {
    IndexSet I, J;
    Rational value;
};

namespace detail {

inline void check_window(const FoldedMatrix& X, Index window) {
    if (window < 0) throw InputError("window must be nonnegative");
    if (window > X.window_limit()) throw DomainError(X.window_error(0, window));
}

inline IndexSet mask_to_set(unsigned long long mask, Index base) {
    IndexSet s;
    for (Index b = 0; mask != 0; ++b, mask >>= 1)
        if (mask & 1ULL) s.push_back(base + b);
    return s;
}

inline bool index_leq(const IndexSet& I, const IndexSet& J) {
    for (std::size_t m = 0; m < I.size(); ++m)
        if (I[m] > J[m]) return false;
    return true;
}

}  // namespace detail

// First row-solid minor with rows and columns in [0, window] that is negative.
// Rows starting at r >= n are translates of rows starting at r - n, so r < n suffices.
inline std::optional<MinorWitness> find_negative_minor(const FoldedMatrix& X, Index window) {
    detail::check_window(X, window);
    if (window > 40) throw DomainError("find_negative_minor: window too large to enumerate");
    for (Index r = 0; r < X.n() && r <= window; ++r) {
        Index width = window - r + 1;
        for (unsigned long long mask = 1; mask < (1ULL << width); ++mask) {
            IndexSet J = detail::mask_to_set(mask, r);
            IndexSet I;
            for (std::size_t m = 0; m < J.size(); ++m) I.push_back(r + static_cast<Index>(m));
            if (!detail::index_leq(I, J)) continue;
            Rational v = minor(X, I, J);
            if (v < 0) return MinorWitness{I, J, v};
        }
    }
    return std::nullopt;
}

inline bool is_tnn_window(const FoldedMatrix& X, Index window) { return !find_negative_minor(X, window).has_value(); }

// First minor with I <= J inside [0, window] (min I < n) that is not strictly positive.
inline std::optional<MinorWitness> find_nonpositive_minor(const FoldedMatrix& X, Index window) {
    detail::check_window(X, window);
    if (window > 20) throw DomainError("find_nonpositive_minor: window too large to enumerate");
    Index width = window + 1;
    for (unsigned long long im = 1; im < (1ULL << width); ++im) {
        IndexSet I = detail::mask_to_set(im, 0);
        if (I.front() >= X.n()) continue;
        for (unsigned long long jm = 1; jm < (1ULL << width); ++jm) {
            if (__builtin_popcountll(jm) != static_cast<int>(I.size())) continue;
            IndexSet J = detail::mask_to_set(jm, 0);
            if (!detail::index_leq(I, J)) continue;
            Rational v = minor(X, I, J);
            if (v <= 0) return MinorWitness{I, J, v};
        }
    }
    return std::nullopt;
}

inline bool is_tp_window(const FoldedMatrix& X, Index window) { return !find_nonpositive_minor(X, window).has_value(); }

struct CellSet {
    std::vector<std::pair<Index, Index>> cells;
};

inline CellSet cells_of(const IndexSet& I, const IndexSet& J) {
    if (I.size() != J.size()) throw InputError("cells_of: |I| != |J|");
    for (std::size_t m = 1; m < I.size(); ++m)
        if (I[m] <= I[m - 1] || J[m] <= J[m - 1]) throw InputError("cells_of: sets must be strictly increasing");
    CellSet C;
    for (std::size_t m = 0; m < I.size(); ++m) C.cells.emplace_back(I[m], J[m]);
    return C;
}

// #{w-dots (r, w^{-1}(r)) northeast of (i, j)}, i.e. r <= i and w^{-1}(r) >= j.
inline Index dots_northeast(const AffinePerm& w, Index i, Index j) {
    AffinePerm winv = w.inverse();
    Index reach = 0;
    for (int r = 1; r <= w.n(); ++r) reach = std::max<Index>(reach, winv(r) - r);
    Index count = 0;
    for (Index r = j - reach; r <= i; ++r)
        if (winv(r) >= j) ++count;
    return count;
}

// The counting function of C only jumps at rows and columns of C, and the dot count is
// monotone, so the binding cells are those with i a row of C and j a column of C.
inline bool w_dominated(const CellSet& C, const AffinePerm& w) {
    for (const auto& [i, ignored] : C.cells) {
        (void)ignored;
        for (const auto& cj : C.cells) {
            Index j = cj.second;
            Index count = 0;
            for (const auto& c : C.cells)
                if (c.first <= i && c.second >= j) ++count;
            if (count > dots_northeast(w, i, j)) return false;
        }
    }
    return true;
}

}  // namespace tnnloop
