#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnnloop/affine_perm.hpp"
#include "tnnloop/positivity.hpp"
#include "tnnloop/products.hpp"

namespace tnnloop {

// Parameter vectors of curls and whirls, and epsilon sequences, are stored as
// v[k] = value for index k+1, so v[n-1] belongs to index n (equivalently 0).
inline std::size_t param_slot(int n, int i) { return static_cast<std::size_t>(pmod(i - 1, n)); }

struct EpsilonReport {
    Rational value;
    Rational gap;
    Index column_used = 0;
};

namespace detail {

inline int row_rep(int n, int i) { return static_cast<int>(pmod(i, n)); }

// Whether unfolded row r (any representative) vanishes beyond the cap.
inline bool row_finite(const FoldedMatrix& X, Index r) {
    int f = static_cast<int>(pmod(r - 1, X.n()));
    for (int c = 0; c < X.n(); ++c)
        if (X.at(f, c)[X.cap()] != 0) return false;
    return true;
}

inline bool column_finite(const FoldedMatrix& X, Index j) {
    int f = static_cast<int>(pmod(j - 1, X.n()));
    for (int r = 0; r < X.n(); ++r)
        if (X.at(r, f)[X.cap()] != 0) return false;
    return true;
}

// Nonincreasing ratio sequence; returns the last value and the last drop.
inline EpsilonReport monotone_limit(const std::vector<Rational>& seq, Index last_index, const std::string& what) {
    if (seq.empty()) throw DomainError(what + ": no usable terms in window");
    for (std::size_t k = 1; k < seq.size(); ++k)
        if (seq[k] > seq[k - 1])
            throw DomainError(what + ": ratio sequence is not monotone (insufficient cap or not TNN)");
    Rational gap = seq.size() >= 2 ? Rational(seq[seq.size() - 2] - seq.back()) : Rational(0);
    return {seq.back(), gap, last_index};
}

}  // namespace detail

// epsilon_i = lim_j x_{i,j} / x_{i+1,j}, evaluated up to column J with i taken in [0, n).
// With stop_at_rise the sequence is cut at its first increase instead of failing; this is
// for residuals of approximate steps, whose far columns are dominated by earlier errors.
inline EpsilonReport epsilon(const FoldedMatrix& X, int i, Index J, bool stop_at_rise = false) {
    const Index r = detail::row_rep(X.n(), i);
    if (J - r > X.window_limit()) throw DomainError(X.window_error(r, J));
    std::vector<Rational> seq;
    for (Index j = r + 2; j <= J; ++j) {
        Rational den = X.unfold(r + 1, j);
        if (den == 0) {
            if (stop_at_rise && !seq.empty()) return detail::monotone_limit(seq, j - 1, "epsilon");
            if (j == J)
                throw DomainError("epsilon: zero denominator x_{" + std::to_string(r + 1) + "," + std::to_string(j) +
                                  "}; row is finitely supported, use epsilon_finite");
            seq.clear();
            continue;
        }
        Rational v = X.unfold(r, j) / den;
        if (stop_at_rise && !seq.empty() && v > seq.back()) return detail::monotone_limit(seq, j - 1, "epsilon");
        seq.push_back(v);
    }
    return detail::monotone_limit(seq, J, "epsilon");
}

// x_{i,j} / x_{i+1,j} at the largest j with x_{i+1,j} != 0.
inline Rational epsilon_finite(const FoldedMatrix& X, int i) {
    const Index r = detail::row_rep(X.n(), i);
    if (!detail::row_finite(X, r + 1)) throw DomainError("epsilon_finite: row is not finitely supported within the cap");
    const Index top = r + 1 + X.window_limit();
    for (Index j = top; j > r; --j) {
        Rational den = X.unfold(r + 1, j);
        if (den != 0) return X.unfold(r, j) / den;
    }
    return 0;
}

// Exact value when row i+1 is finitely supported, window value otherwise.
inline EpsilonReport epsilon_auto(const FoldedMatrix& X, int i, Index J, bool stop_at_rise = false) {
    const Index r = detail::row_rep(X.n(), i);
    if (detail::row_finite(X, r + 1)) {
        if (!detail::row_finite(X, r)) throw DomainError("epsilon: row i is infinite while row i+1 is finite");
        return {epsilon_finite(X, i), 0, -1};
    }
    return epsilon(X, i, J, stop_at_rise);
}

// mu_j = lim_{i -> -inf} x_{i,j+1} / x_{i,j}, evaluated down to row I (j taken in [1, n]).
inline EpsilonReport mu(const FoldedMatrix& X, int j, Index I) {
    const Index c = pmod(j - 1, X.n()) + 1;
    if (c + 1 - I > X.window_limit()) throw DomainError(X.window_error(I, c + 1));
    std::vector<Rational> seq;
    for (Index i = c - 1; i >= I; --i) {
        Rational den = X.unfold(i, c);
        if (den == 0) {
            if (i == I)
                throw DomainError("mu: zero denominator; column is finitely supported, use mu_finite");
            seq.clear();
            continue;
        }
        seq.push_back(X.unfold(i, c + 1) / den);
    }
    return detail::monotone_limit(seq, I, "mu");
}

// mu through the c-inverse symmetry: mu_j(X) = epsilon_j(X^{-c}).
inline EpsilonReport mu_via_c_inverse(const FoldedMatrix& X, int j, Index J) {
    return epsilon_auto(minus_c(X), j, J);
}

inline Rational mu_finite(const FoldedMatrix& X, int j) {
    auto Z = minus_c(X);
    if (!detail::row_finite(Z, pmod(j, X.n()) + 1))
        throw DomainError("mu_finite: X^{-c} is not finitely supported within the cap");
    return epsilon_finite(Z, j);
}

struct AswStep {
    std::vector<Rational> params;  // curl parameters, slot k = index k+1
    std::vector<Rational> gaps;
    FoldedMatrix residual;
};

struct AswOptions {
    Index column = 0;               // epsilon column for infinite rows; 0 means the largest safe one
    Index check_window = -1;        // TNN check window for the residual; -1 skips the check
    Rational zero_threshold = 0;    // window values at or below this are treated as 0
    Rational relative_zero = 0;     // window values at or below this times the step maximum are treated as 0
    Index column_step = 0;          // asw_factorize moves the column left by this much per step
    bool stop_at_rise = false;      // cut ratio sequences at their first increase
};

inline Index default_column(const FoldedMatrix& X) { return X.window_limit(); }

// X = N(eps) Y with Y = M(-eps) X.
inline AswStep asw_step(const FoldedMatrix& X, const AswOptions& opt = {}) {
    const int n = X.n();
    const Index J = opt.column > 0 ? opt.column : default_column(X);
    AswStep s{std::vector<Rational>(static_cast<std::size_t>(n)), std::vector<Rational>(static_cast<std::size_t>(n)), {}};
    for (int i = 1; i <= n; ++i) {
        auto e = epsilon_auto(X, i, J, opt.stop_at_rise);
        if (e.value < 0) throw DomainError("asw_step: negative epsilon, input is not TNN");
        if (e.gap != 0 && e.value <= opt.zero_threshold) e.value = 0;
        s.params[param_slot(n, i)] = e.value;
        s.gaps[param_slot(n, i)] = e.gap;
    }
    if (opt.relative_zero > 0) {
        Rational top = 0;
        for (const auto& x : s.params) top = std::max(top, x);
        for (std::size_t k = 0; k < s.params.size(); ++k)
            if (s.gaps[k] != 0 && s.params[k] <= opt.relative_zero * top) s.params[k] = 0;
    }
    std::vector<Rational> neg = s.params;
    for (auto& x : neg) x = -x;
    s.residual = whirl(n, X.cap(), neg) * X;
    if (opt.check_window >= 0) {
        if (auto bad = find_negative_minor(s.residual, opt.check_window)) {
            std::string msg = "asw_step: residual has a negative minor on rows";
            for (auto i : bad->I) msg += " " + std::to_string(i);
            msg += " / columns";
            for (auto j : bad->J) msg += " " + std::to_string(j);
            throw DomainError(msg + " (cap too small or input not TNN)");
        }
    }
    return s;
}

struct Factor {
    enum class Kind { Curl, Whirl, Chevalley };
    Kind kind;
    std::vector<Rational> params;
    int letter = -1;  // Chevalley only
};

inline std::string kind_name(Factor::Kind k) {
    switch (k) {
        case Factor::Kind::Curl: return "curl";
        case Factor::Kind::Whirl: return "whirl";
        default: return "chevalley";
    }
}

struct FactorizationTrace {
    std::vector<Factor> factors;
    FoldedMatrix residual;
    Word word;                      // letters of the degenerate curls, when all are degenerate
    std::vector<Rational> params;   // matching Chevalley parameters
    std::vector<Rational> gaps;
    bool finite = false;
};

inline bool is_identity(const FoldedMatrix& X) { return X == FoldedMatrix::identity(X.n(), X.cap()); }

inline std::vector<int> curl_support(const std::vector<Rational>& params) {
    std::vector<int> s;
    const int n = static_cast<int>(params.size());
    for (int i = 0; i < n; ++i)
        if (params[param_slot(n, i)] != 0) s.push_back(i);
    return s;
}

// A degenerate curl as a product of Chevalley generators along its cyclically increasing word.
inline std::pair<Word, std::vector<Rational>> degenerate_curl_word(const std::vector<Rational>& params) {
    const int n = static_cast<int>(params.size());
    auto support = curl_support(params);
    if (static_cast<int>(support.size()) == n) throw DomainError("curl is not degenerate");
    Word w = cyclically_increasing_word(n, support);
    std::vector<Rational> a;
    for (int x : w) a.push_back(params[param_slot(n, x)]);
    return {w, a};
}

inline FactorizationTrace asw_factorize(const FoldedMatrix& X, int steps, const AswOptions& opt = {}) {
    FactorizationTrace t;
    t.residual = X;
    t.finite = X.finitely_supported();
    AswOptions o = opt;
    if (o.column <= 0) o.column = default_column(X);
    for (int k = 0; k < steps && !is_identity(t.residual); ++k, o.column -= opt.column_step) {
        if (o.column <= 0) throw DomainError("asw_factorize: epsilon column exhausted");
        auto s = asw_step(t.residual, o);
        if (curl_support(s.params).empty())
            throw DomainError("asw_factorize: all epsilon vanish on a non-identity residual");
        t.factors.push_back({Factor::Kind::Curl, s.params, -1});
        t.gaps.insert(t.gaps.end(), s.gaps.begin(), s.gaps.end());
        if (static_cast<int>(curl_support(s.params).size()) < X.n()) {
            auto [w, a] = degenerate_curl_word(s.params);
            t.word.insert(t.word.end(), w.begin(), w.end());
            t.params.insert(t.params.end(), a.begin(), a.end());
        }
        t.residual = std::move(s.residual);
    }
    if (t.finite && !is_identity(t.residual)) throw DomainError("asw_factorize: finite input did not terminate within the step budget");
    return t;
}

inline FoldedMatrix reconstruct(const FactorizationTrace& t) {
    const int n = t.residual.n(), D = t.residual.cap();
    FoldedMatrix P = FoldedMatrix::identity(n, D);
    for (const auto& f : t.factors) {
        if (f.kind == Factor::Kind::Curl)
            P = P * curl(n, D, f.params);
        else if (f.kind == Factor::Kind::Whirl)
            P = P * whirl(n, D, f.params);
        else
            P.right_mul_chevalley(f.letter, f.params.at(0));
    }
    return P * t.residual;
}

// Y with X = Y M(b), b = mu(X) taken through the c-inverse symmetry.
inline AswStep whirl_asw_step(const FoldedMatrix& X, const AswOptions& opt = {}) {
    auto s = asw_step(minus_c(X), opt);
    s.residual = minus_c(s.residual);
    return s;
}

inline FactorizationTrace whirl_asw_factorize(const FoldedMatrix& X, int steps, const AswOptions& opt = {}) {
    FactorizationTrace t;
    t.residual = X;
    t.finite = X.finitely_supported();
    std::vector<Factor> rev;
    for (int k = 0; k < steps && !is_identity(t.residual); ++k) {
        auto s = whirl_asw_step(t.residual, opt);
        if (curl_support(s.params).empty())
            throw DomainError("whirl_asw_factorize: all mu vanish on a non-identity residual");
        rev.push_back({Factor::Kind::Whirl, s.params, -1});
        t.gaps.insert(t.gaps.end(), s.gaps.begin(), s.gaps.end());
        t.residual = std::move(s.residual);
    }
    // Whirls come off on the right; X = residual * M_k * ... * M_1.
    t.factors.assign(rev.rbegin(), rev.rend());
    return t;
}

inline FoldedMatrix reconstruct_right(const FactorizationTrace& t) {
    FoldedMatrix P = t.residual;
    for (const auto& f : t.factors) P = P * whirl(P.n(), P.cap(), f.params);
    return P;
}

struct MqResult {
    FoldedMatrix matrix;
    std::vector<std::vector<Rational>> gaps;  // gaps[i-1][j-i], i in [1, n], j - i in [0, q]
};

// m_{q,i,j} = (-1)^{j-i} lim_l D_{{i..i+q} - {j}, {l..l+q-1}} / D_{{i+1..i+q}, {l..l+q-1}},
// evaluated at the largest l with (l + q - 1) - i <= window.
inline MqResult mq_matrix(const FoldedMatrix& X, int q, Index window) {
    const int n = X.n();
    if (q < 1) throw InputError("mq_matrix: q must be >= 1");
    if (window > X.window_limit()) throw DomainError(X.window_error(1, 1 + window));
    if (window < 2 * q) throw DomainError("mq_matrix: window too small for q = " + std::to_string(q));
    if (q > n * X.cap()) throw DomainError("mq_matrix: q exceeds the cap");
    MqResult res{FoldedMatrix::identity(n, X.cap()), std::vector<std::vector<Rational>>(static_cast<std::size_t>(n))};
    for (Index i = 1; i <= n; ++i) {
        auto& g = res.gaps[static_cast<std::size_t>(i - 1)];
        g.assign(static_cast<std::size_t>(q + 1), 0);
        IndexSet den_rows;
        for (Index r = i + 1; r <= i + q; ++r) den_rows.push_back(r);
        for (Index j = i + 1; j <= i + q; ++j) {
            IndexSet rows;
            for (Index r = i; r <= i + q; ++r)
                if (r != j) rows.push_back(r);
            std::vector<Rational> seq;
            for (Index l = i + q; l + q - 1 - i <= window; ++l) {
                IndexSet cols;
                for (Index c = l; c < l + q; ++c) cols.push_back(c);
                Rational d = minor(X, den_rows, cols);
                if (d == 0) {
                    seq.clear();
                    continue;
                }
                seq.push_back(minor(X, rows, cols) / d);
            }
            auto e = detail::monotone_limit(seq, window, "mq_matrix");
            Rational v = ((j - i) % 2 == 0) ? e.value : Rational(-e.value);
            res.matrix.set_unfolded(i, j, v);
            g[static_cast<std::size_t>(j - i)] = e.gap;
        }
    }
    return res;
}

struct LimitReport {
    Rational value;          // last term
    Rational gap;            // drop between the last two terms
    std::vector<Rational> terms;
};

// lim_k D_{I_k, J_k} / D_{I'_k, J_k} with I_k = I + {h-k..h-1}, h = min(I, I'),
// and solid column blocks J_k marching right so that J_{k-1} << J_k. The last
// column block ends at offset `window` from the top row h - K.
inline LimitReport minor_ratio_limit(const FoldedMatrix& X, const IndexSet& I, const IndexSet& Ip, Index window) {
    if (I.size() != Ip.size() || I.empty()) throw InputError("minor_ratio_limit: row sets must be nonempty and equal in size");
    for (std::size_t m = 0; m < I.size(); ++m) {
        if (I[m] > Ip[m]) throw InputError("minor_ratio_limit: need I <= I'");
        if (m > 0 && (I[m] <= I[m - 1] || Ip[m] <= Ip[m - 1])) throw InputError("minor_ratio_limit: row sets must be increasing");
    }
    if (window > X.window_limit()) throw DomainError(X.window_error(0, window));
    const Index l = static_cast<Index>(I.size());
    const Index h = std::min(I.front(), Ip.front());
    const Index spread = std::max(I.back(), Ip.back()) - h;
    const Index K = (window - l - spread - 1) / 3;
    if (K < 1) throw DomainError("minor_ratio_limit: window too small");
    const Index s = h + window - 2 * K - l + 1;
    LimitReport rep;
    for (Index k = 0; k <= K; ++k) {
        IndexSet Ik, Ipk, Jk;
        for (Index r = h - k; r < h; ++r) {
            Ik.push_back(r);
            Ipk.push_back(r);
        }
        Ik.insert(Ik.end(), I.begin(), I.end());
        Ipk.insert(Ipk.end(), Ip.begin(), Ip.end());
        for (Index c = s - K + k; c < s - K + 2 * k + l; ++c) Jk.push_back(c);
        Rational d = minor(X, Ipk, Jk);
        if (d == 0) throw DomainError("minor_ratio_limit: vanishing denominator (input not totally positive in the window)");
        rep.terms.push_back(minor(X, Ik, Jk) / d);
    }
    for (std::size_t k = 1; k < rep.terms.size(); ++k)
        if (rep.terms[k] > rep.terms[k - 1]) throw DomainError("minor_ratio_limit: sequence is not monotone");
    rep.value = rep.terms.back();
    rep.gap = rep.terms.size() >= 2 ? Rational(rep.terms[rep.terms.size() - 2] - rep.value) : Rational(0);
    return rep;
}

struct GreedyStep {
    Rational a;
    Rational gap;
    FoldedMatrix residual;
};

inline GreedyStep greedy_step(const FoldedMatrix& X, int i, Index window, Index check_window = -1) {
    const Index r = detail::row_rep(X.n(), i);
    auto rep = minor_ratio_limit(X, {r}, {r + 1}, window);
    FoldedMatrix Y = X;
    Y.left_mul_chevalley(static_cast<int>(pmod(i, X.n())), -rep.value);
    if (check_window >= 0 && find_negative_minor(Y, check_window))
        throw DomainError("greedy_step: residual is not TNN in the check window");
    return {rep.value, rep.gap, Y};
}

struct TripleResult {
    Rational a1, a2, a3;
    Rational gap;  // sum of the gaps of the limits involved
};

// Closed-form greedy parameters for e_i e_{i+1} e_i ("iji") or e_{i+1} e_i e_{i+1} ("jij").
inline TripleResult greedy_triple(const FoldedMatrix& X, int i, const std::string& order, Index window) {
    const Index r = detail::row_rep(X.n(), i);
    auto L = [&](IndexSet a, IndexSet b) { return minor_ratio_limit(X, a, b, window); };
    TripleResult t;
    if (order == "iji") {
        auto p = L({r}, {r + 1});
        auto q = L({r - 1, r + 1}, {r - 1, r + 2});
        auto u = L({r, r + 1}, {r + 1, r + 2});
        t = {p.value, q.value, u.value / q.value, p.gap + q.gap + u.gap};
    } else if (order == "jij") {
        auto p = L({r + 1}, {r + 2});
        auto q = L({r - 1, r, r + 2}, {r - 1, r + 1, r + 2});
        auto u = L({r - 1, r}, {r - 1, r + 2});
        t = {p.value, q.value, u.value / q.value, p.gap + q.gap + u.gap};
    } else {
        throw InputError("greedy_triple: order must be iji or jij");
    }
    return t;
}

struct GreedyWitness {
    IndexSet I, J;       // I row-solid ending at the letter's row; Ip = I with last row shifted down
    Rational ratio;      // D_{I,J}(X_k) / D_{I',J}(X_k), equal to the parameter
};

namespace detail {

inline IndexSet replace_last(IndexSet I, Index v) {
    I.back() = v;
    return I;
}

// Column sets J of size m inside [lo, hi] with I <= J, by increasing lexicographic order.
template <typename F>
bool for_each_column_set(Index lo, Index hi, const IndexSet& I, std::size_t m, IndexSet& cur, F&& f) {
    if (cur.size() == m) return f(cur);
    Index start = cur.empty() ? lo : cur.back() + 1;
    Index need = std::max(start, I[cur.size()]);
    for (Index c = need; c + static_cast<Index>(m - cur.size()) - 1 <= hi; ++c) {
        cur.push_back(c);
        if (for_each_column_set(lo, hi, I, m, cur, f)) return true;
        cur.pop_back();
    }
    return false;
}

}  // namespace detail

// Certificate that X = e_i(a) Y with Y in E_v is greedy: a row-solid I ending at i and a
// column set J with D_{I,J}(Y) = 0 < D_{I',J}(Y), so no larger parameter keeps the residual TNN.
// Candidates come from w-dominance of Y's cell and are confirmed with exact minors.
inline std::optional<GreedyWitness> greedy_witness(const FoldedMatrix& Xk, const FoldedMatrix& Y, const AffinePerm& v, int i,
                                                    Index span, std::size_t max_rows = 4) {
    const int n = Xk.n();
    const Index r = pmod(i - 1, n) + 1;  // row in [1, n]
    for (std::size_t m = 1; m <= max_rows; ++m) {
        IndexSet I;
        for (Index x = r - static_cast<Index>(m) + 1; x <= r; ++x) I.push_back(x);
        IndexSet Ip = detail::replace_last(I, r + 1);
        std::optional<GreedyWitness> found;
        IndexSet cur;
        detail::for_each_column_set(I.front(), I.front() + span, Ip, m, cur, [&](const IndexSet& J) {
            if (w_dominated(cells_of(I, J), v) || !w_dominated(cells_of(Ip, J), v)) return false;
            if (minor(Y, I, J) != 0) return false;
            Rational d = minor(Y, Ip, J);
            if (d <= 0) return false;
            found = GreedyWitness{I, J, minor(Xk, I, J) / d};
            return true;
        });
        if (found) return found;
    }
    return std::nullopt;
}

struct GreedyVerification {
    bool greedy = true;
    std::size_t failed_at = 0;
    std::vector<GreedyWitness> witnesses;
};

// Checks every factor of e_word(params) for greediness with an exact witness.
inline GreedyVerification verify_greedy_finite(int n, const Word& word, const std::vector<Rational>& params,
                                               std::size_t max_rows = 4) {
    if (!is_reduced_word(n, word)) throw DomainError("verify_greedy_finite: word is not reduced");
    const int D = static_cast<int>(word.size()) / n + 3;
    const Index span = static_cast<Index>(word.size()) + 2 * n;
    GreedyVerification out;
    for (std::size_t k = 0; k < word.size(); ++k) {
        Word rest(word.begin() + static_cast<long>(k) + 1, word.end());
        std::vector<Rational> rp(params.begin() + static_cast<long>(k) + 1, params.end());
        FoldedMatrix Y = finite_product(n, D, rest, rp);
        FoldedMatrix Xk = Y;
        Xk.left_mul_chevalley(word[k], params[k]);
        auto w = greedy_witness(Xk, Y, from_word(n, rest), word[k], span, max_rows);
        if (!w || w->ratio != params[k]) {
            out.greedy = false;
            out.failed_at = k;
            return out;
        }
        out.witnesses.push_back(*w);
    }
    return out;
}

struct SampledProduct {
    FoldedMatrix matrix;
    Word word;
    std::vector<Rational> params;
    Rational tail_sum;
};

// Truncation of e_{c^inf}(a) with a_k = delta^{K+k}, k >= 1.
inline SampledProduct sample_Acinf(const AffinePerm& c, const Rational& delta, int K, int factors, int D) {
    if (delta <= 0 || delta >= 1) throw InputError("sample_Acinf: need 0 < delta < 1");
    const int n = c.n();
    Word cw = coxeter_word(n, coxeter_first_part(c));
    InfiniteWord iw{n, {}, cw};
    auto stream = ParamStream::geometric(rpow(delta, K + 1), delta);
    auto p = infinite_product(iw, stream, static_cast<std::size_t>(factors), D);
    SampledProduct out{p.matrix, iw.truncation(static_cast<std::size_t>(factors)), {}, p.tail_sum};
    for (int k = 0; k < factors; ++k) out.params.push_back(stream.at(static_cast<std::size_t>(k)));
    return out;
}

struct PeelResult {
    std::vector<Rational> params;
    std::vector<Rational> gaps;
    FoldedMatrix residual;
};

// Peels e_i(eps_i) along the letters of c^inf. Rows that are finitely supported within
// the cap (truncated samples) use the exact last-column ratio; otherwise the window ratio
// at a column that moves left by column_step per factor.
inline PeelResult coxeter_peel(const FoldedMatrix& X, const AffinePerm& c, int count, Index column, Index column_step = 1) {
    const int n = c.n();
    Word cw = coxeter_word(n, coxeter_first_part(c));
    PeelResult out{{}, {}, X};
    for (int k = 0; k < count; ++k) {
        const Index J = column - k * column_step;
        int i = cw[static_cast<std::size_t>(k % n)];
        const bool exact = detail::row_finite(out.residual, detail::row_rep(n, i) + 1);
        if (!exact && J < n + 2) throw DomainError("coxeter_peel: epsilon column exhausted after " + std::to_string(k) + " factors");
        auto e = epsilon_auto(out.residual, i, J);
        if (e.value < 0) throw DomainError("coxeter_peel: negative epsilon");
        out.params.push_back(e.value);
        out.gaps.push_back(e.gap);
        out.residual.left_mul_chevalley(i, -e.value);
    }
    return out;
}

struct AswCell {
    AffinePerm w, v;
    std::size_t l = 0;
    std::vector<AffinePerm> factors;  // v(N_1), v(N_2), ...
};

// Maps each curl to v(N) by the support of its parameters, finds the first index l after which
// lengths are constant and supports rotate by one (confirmed twice), and returns (w, v).
inline AswCell asw_cell_from_trace(const FactorizationTrace& t) {
    if (t.factors.empty()) throw DomainError("asw_cell: no curls extracted");
    const int n = t.residual.n();
    AswCell cell;
    for (const auto& f : t.factors) {
        auto supp = curl_support(f.params);
        if (static_cast<int>(supp.size()) == n) throw DomainError("asw_cell: curl is not degenerate");
        cell.factors.push_back(cyclically_increasing(n, supp));
    }
    const std::size_t S = cell.factors.size();
    for (std::size_t l = 1; l + 2 < S + 1; ++l) {
        bool stable = true;
        for (std::size_t j = l; j < S; ++j)
            if (length(cell.factors[j]) != length(cell.factors[l - 1]) || cell.factors[j] != rotate(cell.factors[j - 1], 1)) {
                stable = false;
                break;
            }
        if (stable && S - l >= 2) {
            cell.l = l;
            AffinePerm w = AffinePerm::identity(n);
            for (std::size_t j = 0; j < l; ++j) w = w * cell.factors[j];
            cell.w = w;
            cell.v = cell.factors[l];
            if (!compatible_pair(cell.w, cell.v)) throw DomainError("asw_cell: extracted pair is not compatible");
            return cell;
        }
    }
    throw DomainError("asw_cell: no stabilization within the extracted curls");
}

// Finitely supported inputs (truncated samples) are accepted as long as they do not
// factor completely within max_steps; such an input is not entire.
inline AswCell asw_cell(const FoldedMatrix& X, int max_steps, const AswOptions& opt = {}) {
    FactorizationTrace t;
    t.residual = X;
    AswOptions o = opt;
    if (o.column <= 0) o.column = default_column(X);
    for (int k = 0; k < max_steps; ++k, o.column -= opt.column_step) {
        if (is_identity(t.residual)) throw DomainError("asw_cell: input factors into finitely many curls");
        auto s = asw_step(t.residual, o);
        if (curl_support(s.params).empty()) throw DomainError("asw_cell: all epsilon vanish on a non-identity residual");
        t.factors.push_back({Factor::Kind::Curl, s.params, -1});
        t.residual = std::move(s.residual);
    }
    return asw_cell_from_trace(t);
}

}  // namespace tnnloop
