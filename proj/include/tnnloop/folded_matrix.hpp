#pragma once

#include <string>
#include <vector>

#include "tnnloop/affine_perm.hpp"
#include "tnnloop/rational.hpp"
#include "tnnloop/series.hpp"

namespace tnnloop {

using Index = std::int64_t;
using IndexSet = std::vector<Index>;

// n x n matrix of series a_{ij}(t) = sum_k x_{i, j+kn} t^k, truncated at t^D.
class FoldedMatrix {
public:
    FoldedMatrix() = default;
    FoldedMatrix(int n, int D) : n_(n), D_(D), a_(static_cast<std::size_t>(n * n), Series(D)) {
        if (n < 2) throw InputError("FoldedMatrix: n must be >= 2");
        if (D < 0) throw InputError("FoldedMatrix: negative cap");
    }

    static FoldedMatrix identity(int n, int D) {
        FoldedMatrix X(n, D);
        for (int r = 0; r < n; ++r) X.at(r, r)[0] = 1;
        return X;
    }

    int n() const { return n_; }
    int cap() const { return D_; }
    Index window_limit() const { return static_cast<Index>(n_) * D_; }

    // Folded entry, 0-based row/column.
    const Series& at(int r, int c) const { return a_[static_cast<std::size_t>(r * n_ + c)]; }
    Series& at(int r, int c) { return a_[static_cast<std::size_t>(r * n_ + c)]; }

    Rational unfold(Index i, Index j) const {
        if (j < i) return 0;
        auto [r, c, k] = locate(i, j);
        return at(r, c)[k];
    }

    void set_unfolded(Index i, Index j, const Rational& v) {
        if (j < i) throw InputError("set_unfolded: below the diagonal");
        auto [r, c, k] = locate(i, j);
        at(r, c)[k] = v;
    }

    // Whether the unfolded row i has no nonzero entries at offsets beyond what the cap shows.
    bool finitely_supported() const {
        for (const auto& s : a_)
            if (s[D_] != 0) return false;
        return true;
    }

    friend bool operator==(const FoldedMatrix& x, const FoldedMatrix& y) {
        return x.n_ == y.n_ && x.D_ == y.D_ && x.a_ == y.a_;
    }

    FoldedMatrix& operator+=(const FoldedMatrix& o) {
        check(o);
        for (std::size_t q = 0; q < a_.size(); ++q) a_[q] += o.a_[q];
        return *this;
    }
    FoldedMatrix& operator-=(const FoldedMatrix& o) {
        check(o);
        for (std::size_t q = 0; q < a_.size(); ++q) a_[q] -= o.a_[q];
        return *this;
    }

    friend FoldedMatrix operator*(const FoldedMatrix& x, const FoldedMatrix& y) {
        x.check(y);
        FoldedMatrix z(x.n_, x.D_);
        for (int r = 0; r < x.n_; ++r)
            for (int c = 0; c < x.n_; ++c) {
                Series& s = z.at(r, c);
                for (int m = 0; m < x.n_; ++m) {
                    const Series &p = x.at(r, m), &q = y.at(m, c);
                    for (int i = 0; i <= x.D_; ++i) {
                        if (p[i] == 0) continue;
                        for (int j = 0; i + j <= x.D_; ++j)
                            if (q[j] != 0) s[i + j] += p[i] * q[j];
                    }
                }
            }
        return z;
    }

    // e_i(a) * X: unfolded row i gains a times row i+1.
    void left_mul_chevalley(int i, const Rational& a) {
        check_letter(i);
        if (i == 0) {
            for (int c = 0; c < n_; ++c) at(n_ - 1, c).add_scaled(at(0, c), a, 1);
        } else {
            for (int c = 0; c < n_; ++c) at(i - 1, c).add_scaled(at(i, c), a, 0);
        }
    }

    // X * e_i(a): unfolded column i+1 gains a times column i.
    void right_mul_chevalley(int i, const Rational& a) {
        check_letter(i);
        if (i == 0) {
            for (int r = 0; r < n_; ++r) at(r, 0).add_scaled(at(r, n_ - 1), a, 1);
        } else {
            for (int r = 0; r < n_; ++r) at(r, i).add_scaled(at(r, i - 1), a, 0);
        }
    }

    std::string window_error(Index i, Index j) const {
        return "out of window: entry (" + std::to_string(i) + "," + std::to_string(j) + ") has offset " +
               std::to_string(j - i) + " > n*D = " + std::to_string(window_limit());
    }

private:
    struct Loc {
        int r, c, k;
    };

    Loc locate(Index i, Index j) const {
        if (j - i > window_limit()) throw DomainError(window_error(i, j));
        Index ip = pmod(i - 1, n_) + 1;
        Index jp = j + (ip - i);
        Index j0 = pmod(jp - 1, n_) + 1;
        Index k = (jp - j0) / n_;
        return {static_cast<int>(ip - 1), static_cast<int>(j0 - 1), static_cast<int>(k)};
    }

    void check(const FoldedMatrix& o) const {
        if (o.n_ != n_ || o.D_ != D_) throw InputError("FoldedMatrix: mismatched shape or cap");
    }

    void check_letter(int i) const {
        if (i < 0 || i >= n_) throw InputError("letter out of range: " + std::to_string(i));
    }

    int n_ = 0, D_ = 0;
    std::vector<Series> a_;
};

inline FoldedMatrix chevalley(int n, int D, int i, const Rational& a) {
    FoldedMatrix X = FoldedMatrix::identity(n, D);
    X.left_mul_chevalley(i, a);
    return X;
}

// Whirl M(a_1..a_n): m_{i,i+1} = a_i, so a[k] holds a_{k+1} and a[n-1] sits in the wraparound slot.
inline FoldedMatrix whirl(int n, int D, const std::vector<Rational>& a) {
    if (static_cast<int>(a.size()) != n) throw InputError("whirl: need n parameters");
    FoldedMatrix X = FoldedMatrix::identity(n, D);
    for (int i = 1; i < n; ++i) X.at(i - 1, i)[0] = a[static_cast<std::size_t>(i - 1)];
    if (D >= 1) X.at(n - 1, 0)[1] = a[static_cast<std::size_t>(n - 1)];
    return X;
}

inline FoldedMatrix c_involution(const FoldedMatrix& X) {
    FoldedMatrix Y = X;
    const int n = X.n();
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            for (int k = 0; k <= X.cap(); ++k)
                if (((c - r + k * n) % 2 + 2) % 2 == 1) Y.at(r, c)[k] = -Y.at(r, c)[k];
    return Y;
}

namespace detail {

using RMatrix = std::vector<std::vector<Rational>>;

inline RMatrix coefficient_matrix(const FoldedMatrix& X, int p) {
    RMatrix m(static_cast<std::size_t>(X.n()), std::vector<Rational>(static_cast<std::size_t>(X.n())));
    for (int r = 0; r < X.n(); ++r)
        for (int c = 0; c < X.n(); ++c) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = X.at(r, c)[p];
    return m;
}

inline RMatrix rmul(const RMatrix& a, const RMatrix& b) {
    std::size_t n = a.size();
    RMatrix c(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

// Inverse of a unit upper-triangular rational matrix.
inline RMatrix unitriangular_inverse(const RMatrix& a) {
    std::size_t n = a.size();
    RMatrix b(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i][i] != 1) throw DomainError("inverse: constant term is not unipotent");
        for (std::size_t j = 0; j < i; ++j)
            if (a[i][j] != 0) throw DomainError("inverse: constant term is not upper triangular");
    }
    for (std::size_t j = 0; j < n; ++j) {
        b[j][j] = 1;
        for (std::size_t ii = j; ii-- > 0;) {
            Rational s = 0;
            for (std::size_t k = ii + 1; k <= j; ++k) s += a[ii][k] * b[k][j];
            b[ii][j] = -s;
        }
    }
    return b;
}

}  // namespace detail

// Inverse by the power-series recursion B_0 = A_0^{-1}, B_m = -B_0 sum_{p=1}^m A_p B_{m-p}.
inline FoldedMatrix inverse(const FoldedMatrix& X) {
    const int n = X.n(), D = X.cap();
    std::vector<detail::RMatrix> A, B;
    for (int p = 0; p <= D; ++p) A.push_back(detail::coefficient_matrix(X, p));
    B.push_back(detail::unitriangular_inverse(A[0]));
    for (int m = 1; m <= D; ++m) {
        detail::RMatrix s(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
        for (int p = 1; p <= m; ++p) {
            auto t = detail::rmul(A[static_cast<std::size_t>(p)], B[static_cast<std::size_t>(m - p)]);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] += t[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        auto bm = detail::rmul(B[0], s);
        for (auto& row : bm)
            for (auto& x : row) x = -x;
        B.push_back(std::move(bm));
    }
    FoldedMatrix Y(n, D);
    for (int p = 0; p <= D; ++p)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) Y.at(r, c)[p] = B[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return Y;
}

// X^{-c} = (X^c)^{-1}.
inline FoldedMatrix minus_c(const FoldedMatrix& X) { return inverse(c_involution(X)); }

inline FoldedMatrix curl(int n, int D, const std::vector<Rational>& a) { return minus_c(whirl(n, D, a)); }

// Fraction-free (Bareiss) determinant with row pivoting; exact over the rationals.
inline Rational determinant(std::vector<std::vector<Rational>> m) {
    const std::size_t k = m.size();
    if (k == 0) return 1;
    Rational prev = 1;
    int sign = 1;
    for (std::size_t p = 0; p + 1 < k; ++p) {
        if (m[p][p] == 0) {
            std::size_t q = p + 1;
            while (q < k && m[q][p] == 0) ++q;
            if (q == k) return 0;
            std::swap(m[p], m[q]);
            sign = -sign;
        }
        for (std::size_t i = p + 1; i < k; ++i) {
            for (std::size_t j = p + 1; j < k; ++j) m[i][j] = (m[i][j] * m[p][p] - m[i][p] * m[p][j]) / prev;
            m[i][p] = 0;
        }
        prev = m[p][p];
    }
    Rational d = m[k - 1][k - 1];
    return sign > 0 ? d : Rational(-d);
}

inline Rational minor(const FoldedMatrix& X, const IndexSet& I, const IndexSet& J) {
    if (I.size() != J.size()) throw InputError("minor: |I| != |J|");
    std::vector<std::vector<Rational>> m(I.size(), std::vector<Rational>(J.size()));
    for (std::size_t a = 0; a < I.size(); ++a)
        for (std::size_t b = 0; b < J.size(); ++b) m[a][b] = X.unfold(I[a], J[b]);
    return determinant(std::move(m));
}

}  // namespace tnnloop
