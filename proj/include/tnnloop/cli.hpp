#pragma once

// Subcommand front end. run() is the whole program; tools/main.cpp only forwards argv.
// Exit codes: 0 success, 1 domain error, 2 input error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tnnloop/json_io.hpp"
#include "tnnloop/positivity.hpp"

#ifndef TNNLOOP_FIXTURE_DIR
#define TNNLOOP_FIXTURE_DIR "tests/fixtures"
#endif

namespace tnnloop::cli {

using io::json;

struct Config {
    int cap = 15;
    Index window = 0;  // 0: use the largest window of the input
    Rational tolerance = Rational(1, 1000);
    std::uint64_t seed = 1;
    int steps = 5;
};

inline json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in " + where + ": " + e.what());
    }
}

inline std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline Config config_from(const json& j) {
    Config c;
    if (!j.is_object()) throw InputError("config must be a JSON object");
    if (j.contains("cap")) c.cap = io::get_as<int>(j["cap"], "cap");
    if (j.contains("window")) c.window = io::get_as<Index>(j["window"], "window");
    if (j.contains("tolerance")) c.tolerance = io::rat_from(j["tolerance"]);
    if (j.contains("seed")) c.seed = io::get_as<std::uint64_t>(j["seed"], "seed");
    if (j.contains("steps")) c.steps = io::get_as<int>(j["steps"], "steps");
    if (c.cap < 0 || c.window < 0 || c.steps < 0 || c.tolerance < 0) throw InputError("config values must be nonnegative");
    // n is not part of the config proper; when given, the window bound is checked right away
    if (j.contains("n")) {
        int n = io::get_as<int>(j["n"], "n");
        if (c.window > static_cast<Index>(n) * c.cap)
            throw InputError("config: window " + std::to_string(c.window) + " exceeds n*cap = " + std::to_string(n * c.cap));
    }
    return c;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\n") - b + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const char* what) {
    std::vector<T> out;
    if (trim(s).empty()) return out;
    for (const auto& tok : split(s, ',')) {
        auto t = trim(tok);
        try {
            std::size_t used = 0;
            long long v = std::stoll(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            out.push_back(static_cast<T>(v));
        } catch (const std::logic_error&) {
            throw InputError(std::string("bad integer \"") + t + "\" in " + what);
        }
    }
    return out;
}

inline std::vector<Rational> parse_rats(const std::string& s) {
    std::vector<Rational> out;
    if (trim(s).empty()) return out;
    for (const auto& tok : split(s, ',')) out.push_back(parse_rational(trim(tok)));
    return out;
}

// "1:0,1,2" is prefix 1 and period 012; without a colon the whole list is the period.
inline InfiniteWord parse_iword(const std::string& s, int n) {
    auto t = trim(s);
    if (!t.empty() && t[0] == '{') return io::iword_from(parse_json_text(t, "infinite word"));
    InfiniteWord w{n, {}, {}};
    auto colon = t.find(':');
    if (colon == std::string::npos) {
        w.period = parse_list<int>(t, "period");
    } else {
        w.prefix = parse_list<int>(t.substr(0, colon), "prefix");
        w.period = parse_list<int>(t.substr(colon + 1), "period");
    }
    w.validate();
    return w;
}

// A word "0,1,2" or a permutation object.
inline AffinePerm parse_perm(const std::string& s, int n) {
    auto t = trim(s);
    if (!t.empty() && t[0] == '{') return io::perm_from(parse_json_text(t, "permutation"));
    if (n < 1) throw InputError("--n is required with a word");
    return from_word(n, parse_list<int>(t, "word"));
}

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

inline std::vector<Rational> random_params(std::size_t k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(1, 9), den(1, 5);
    std::vector<Rational> p;
    for (std::size_t i = 0; i < k; ++i) {
        Rational q(num(rng), den(rng));
        q.canonicalize();
        p.push_back(q);
    }
    return p;
}

inline std::vector<Rational> residue_sums(const ParamWord& pw) {
    std::vector<Rational> s(static_cast<std::size_t>(pw.n));
    for (std::size_t k = 0; k < pw.size(); ++k) s[static_cast<std::size_t>(pw.letters[k])] += pw.params[k];
    return s;
}

// Fixture expectations: a JSON pointer into the output mapped to either a literal value or a
// matcher object ($approx with tol, $lt, $le, $gt, $ge, $size, $eq_ptr, $each). Returns "" when it holds.
inline std::string match(const json& out, const std::string& ptr, const json& m) {
    json::json_pointer p(ptr);
    if (!out.contains(p)) return ptr + ": missing";
    const json& v = out.at(p);
    auto fail = [&](const std::string& why) { return ptr + ": " + why + " (got " + v.dump() + ")"; };
    if (!m.is_object() || m.empty() || m.begin().key().empty() || m.begin().key()[0] != '$')
        return v == m ? "" : fail("expected " + m.dump());
    if (m.contains("$approx")) {
        Rational d = io::rat_from(v) - io::rat_from(m["$approx"]);
        return rabs(d) <= io::rat_from(io::field(m, "tol")) ? "" : fail("not within tolerance of " + m["$approx"].dump());
    }
    if (m.contains("$le")) return io::rat_from(v) <= io::rat_from(m["$le"]) ? "" : fail("expected <= " + m["$le"].dump());
    if (m.contains("$lt")) return io::rat_from(v) < io::rat_from(m["$lt"]) ? "" : fail("expected < " + m["$lt"].dump());
    if (m.contains("$gt")) return io::rat_from(v) > io::rat_from(m["$gt"]) ? "" : fail("expected > " + m["$gt"].dump());
    if (m.contains("$ge")) return io::rat_from(v) >= io::rat_from(m["$ge"]) ? "" : fail("expected >= " + m["$ge"].dump());
    if (m.contains("$size"))
        return v.is_array() && v.size() == m["$size"].get<std::size_t>() ? "" : fail("expected size " + m["$size"].dump());
    if (m.contains("$eq_ptr")) {
        json::json_pointer q(m["$eq_ptr"].get<std::string>());
        if (!out.contains(q)) return ptr + ": compared path missing";
        return v == out.at(q) ? "" : fail("expected equal to " + m["$eq_ptr"].get<std::string>());
    }
    if (m.contains("$each")) {
        if (!v.is_array()) return fail("expected an array");
        for (std::size_t k = 0; k < v.size(); ++k)
            for (const auto& [sub, mm] : m["$each"].items()) {
                auto e = match(v[k], sub, mm);
                if (!e.empty()) return ptr + "/" + std::to_string(k) + e;
            }
        return "";
    }
    throw InputError("unknown matcher " + m.begin().key());
}

}  // namespace detail

int run(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err);

namespace detail {

struct Args {
    std::string config_path;
    std::int64_t seed = -1;

    int n = 0, cap = -1, letter = 0, q = 2, steps = -1, count = 0, K = 2, factors = 0, pos = 0;
    Index window = -1, column = 0, column_step = 0, check_window = -1, r = 0;
    std::size_t meet_cap = 60, depth = 0;
    std::string word, window_s, lambda, a, b, input, params, rows, cols, kind, src, dst, c, block, fixtures, head;
    std::string rows2, order, field = "matrix", first_part;
    std::int64_t k = 0;
    bool apply = false;
    std::string delta, ratio, scale = "1", zero_threshold = "0", relative_zero = "0";
    bool stop_at_rise = false, has_word = false;
};

class Commands {
public:
    Commands(Args& a, std::istream& in) : A(a), in_(in) {}

    Args& A;
    Config cfg;
    int status = 0;

    json read_input() {
        std::string text;
        if (A.input.empty() || A.input == "-") {
            std::stringstream ss;
            ss << in_.rdbuf();
            text = ss.str();
        } else {
            text = slurp(A.input);
        }
        return parse_json_text(text, A.input.empty() ? "stdin" : A.input);
    }

    FoldedMatrix read_matrix(Rational* tail = nullptr) {
        json j = read_input();
        if (j.is_object() && j.contains(A.field)) {
            if (tail && j.contains("tail")) *tail = io::rat_from(j["tail"]);
            return io::matrix_from(j[A.field]);
        }
        return io::matrix_from(j);
    }

    int cap() const { return A.cap >= 0 ? A.cap : cfg.cap; }
    int steps() const { return A.steps >= 0 ? A.steps : cfg.steps; }

    Index window_for(const FoldedMatrix& X) const {
        Index w = A.window >= 0 ? A.window : cfg.window > 0 ? cfg.window : X.window_limit();
        if (w > X.window_limit())
            throw InputError("window " + std::to_string(w) + " exceeds n*cap = " + std::to_string(X.window_limit()));
        return w;
    }

    AffinePerm one_perm() {
        int given = !A.window_s.empty() + !A.lambda.empty() + A.has_word;
        if (given != 1) throw InputError("give exactly one of --word, --window, --lambda");
        if (!A.window_s.empty()) {
            auto w = parse_list<std::int64_t>(A.window_s, "window");
            return AffinePerm(static_cast<int>(w.size()), w);
        }
        if (!A.lambda.empty()) {
            auto l = parse_list<std::int64_t>(A.lambda, "lambda");
            return translation({static_cast<int>(l.size()), l});
        }
        return parse_perm(A.word, A.n);
    }

    // ---- perm
    json perm_from_word() { return io::to_json(from_word(A.n, parse_list<int>(A.word, "word"))); }
    json perm_length() { return {{"length", length(one_perm())}}; }
    json perm_m_table() { return {{"table", io::to_json(m_table_of(one_perm()))}}; }
    json perm_meet() { return io::to_json(weak_meet(parse_perm(A.a, A.n), parse_perm(A.b, A.n))); }
    json perm_asw() {
        json fs = json::array();
        for (const auto& v : asw_factor_perm(one_perm())) fs.push_back({{"perm", io::to_json(v)}, {"support", support_of(v)}});
        return {{"factors", fs}};
    }
    json perm_compatible() { return {{"compatible", compatible_pair(parse_perm(A.a, A.n), parse_perm(A.b, A.n))}}; }
    json perm_demazure() {
        auto w = demazure_reduce(A.n, parse_list<int>(A.word, "word"));
        return {{"word", w}, {"perm", io::to_json(from_word(A.n, w))}};
    }

    json perm_ci_factor() {
        auto f = cyclically_increasing_factor(one_perm());
        return {{"v", io::to_json(f.v)}, {"u", io::to_json(f.u)}, {"support", f.support}};
    }
    json perm_rotate() { return io::to_json(rotate(one_perm(), static_cast<int>(A.k))); }
    json perm_coxeter() {
        auto w = coxeter_word(A.n, parse_list<int>(A.first_part, "first part"));
        return {{"word", w}, {"perm", io::to_json(from_word(A.n, w))}};
    }
    json perm_show() {
        auto w = one_perm();
        return {{"n", w.n()}, {"window", w.window()}, {"length", length(w)}, {"word", reduced_word(w)}};
    }
    json perm_mul() { return io::to_json(parse_perm(A.a, A.n) * parse_perm(A.b, A.n)); }

    // ---- limit
    json limit_certify() {
        auto c = certify_reduced(parse_iword(A.word, A.n));
        return {{"reduced", c.reduced}, {"failure_index", c.failure_index}, {"checked", c.checked}};
    }
    json limit_m_table() { return {{"table", io::to_json(m_table(parse_iword(A.word, A.n)))}}; }
    json limit_block() { return {{"block", io::to_json(block_of(parse_iword(A.word, A.n)))}}; }
    json limit_leq() { return {{"leq", tnnloop::limit_leq(parse_iword(A.a, A.n), parse_iword(A.b, A.n))}}; }
    json limit_blocks() {
        json bs = json::array();
        auto all = blocks_enumerate(A.n);
        for (const auto& g : all) bs.push_back(io::to_json(g));
        return {{"count", all.size()}, {"blocks", bs}};
    }
    json limit_minimal_word() {
        auto g = io::composition_from(parse_json_text(A.block, "--block"));
        auto w = minimal_word_for_block(g);
        InfiniteWord inf{g.n, {}, w};
        bool red = certify_reduced(inf).reduced;
        return {{"word", w}, {"reduced", red}, {"block", red ? io::to_json(block_of(inf)) : json(nullptr)}};
    }
    // checks a candidate word for a block: w^inf reduced with the given block
    json limit_verify_word() {
        auto g = io::composition_from(parse_json_text(A.block, "--block"));
        InfiniteWord inf = parse_iword(A.word, g.n);
        bool red = certify_reduced(inf).reduced;
        bool same = red && block_of(inf) == g;
        return {{"reduced", red}, {"matches", same}};
    }
    json limit_check_walk() {
        auto lam = parse_list<int>(A.lambda, "lambda");
        auto w = parse_list<int>(A.word, "word");
        auto c = check_walk(lam, w);
        auto x = from_word(static_cast<int>(lam.size()), w);
        return {{"creates_descents", c.creates_descents}, {"all_pairs_swapped", c.all_pairs_swapped}, {"returns", c.returns},
                {"square", io::to_json(x * x)}};
    }
    json limit_fully_commutative() { return {{"fully_commutative", is_fully_commutative(parse_iword(A.word, A.n))}}; }
    json limit_exchange_trace() {
        json steps = json::array();
        for (const auto& st : infinite_exchange_trace(parse_iword(A.a, A.n), parse_iword(A.b, A.n), A.depth))
            steps.push_back({{"letter", st.letter}, {"crossed", st.crossed}, {"k", st.k}});
        return {{"steps", steps}};
    }
    json limit_block_leq() {
        return {{"leq", block_leq(io::composition_from(parse_json_text(A.a, "--a")), io::composition_from(parse_json_text(A.b, "--b")))}};
    }
    json limit_exchange() {
        auto k = exchange_step(parse_iword(A.word, A.n), A.letter);
        return {{"position", k ? json(*k) : json(nullptr)}};
    }
    json limit_meet_cmd() {
        auto m = limit_meet(parse_iword(A.a, A.n), parse_iword(A.b, A.n), A.meet_cap);
        if (m.kind == LimitMeet::Kind::Finite) return {{"kind", "finite"}, {"word", m.finite}};
        if (m.kind == LimitMeet::Kind::Periodic) return {{"kind", "periodic"}, {"word", io::to_json(m.word)}};
        return {{"kind", "undetermined"}, {"last", m.finite}};
    }

    // ---- matrix
    json matrix_example_x() { return io::to_json(example_X(cap(), parse_rational(A.a))); }
    json matrix_product() {
        return io::to_json(finite_product(A.n, cap(), parse_list<int>(A.word, "word"), parse_rats(A.params)));
    }
    json matrix_sample() {
        auto c = from_word(A.n, parse_list<int>(A.c, "coxeter word"));
        auto s = sample_Acinf(c, parse_rational(A.delta), A.K, A.factors, cap());
        return {{"matrix", io::to_json(s.matrix)}, {"word", s.word}, {"params", io::rats(s.params)}, {"tail", io::rat(s.tail_sum)}};
    }
    json matrix_entry() { return {{"value", io::rat(read_matrix().unfold(A.r, A.k))}}; }
    json matrix_eta() { return {{"eta", example_eta(A.r, A.k)}}; }
    json matrix_left_mul() {
        auto X = read_matrix();
        X.left_mul_chevalley(A.letter, parse_rational(A.a));
        return io::to_json(X);
    }
    json matrix_dominated() {
        auto w = from_word(A.n, parse_list<int>(A.word, "word"));
        return {{"dominated", w_dominated(cells_of(parse_list<Index>(A.rows, "rows"), parse_list<Index>(A.cols, "cols")), w)}};
    }
    json matrix_minor_ratio() {
        auto X = read_matrix();
        auto L = minor_ratio_limit(X, parse_list<Index>(A.rows, "rows"), parse_list<Index>(A.rows2, "rows2"), window_for(X));
        bool dec = true;
        for (std::size_t t = 1; t < L.terms.size(); ++t) dec = dec && L.terms[t] <= L.terms[t - 1];
        return {{"value", io::rat(L.value)}, {"gap", io::rat(L.gap)}, {"terms", io::rats(L.terms)}, {"decreasing", dec}};
    }
    json matrix_triple() {
        auto X = read_matrix();
        auto t = greedy_triple(X, A.letter, A.order, window_for(X));
        return {{"a1", io::rat(t.a1)}, {"a2", io::rat(t.a2)}, {"a3", io::rat(t.a3)}, {"gap", io::rat(t.gap)}};
    }
    json matrix_minor() {
        auto X = read_matrix();
        return {{"value", io::rat(minor(X, parse_list<Index>(A.rows, "rows"), parse_list<Index>(A.cols, "cols")))}};
    }
    json matrix_tnn() {
        auto X = read_matrix();
        Index w = A.window >= 0 ? A.window : 2 * X.n();
        auto bad = find_negative_minor(X, w);
        json wit = nullptr;
        if (bad) wit = {{"rows", bad->I}, {"cols", bad->J}, {"value", io::rat(bad->value)}};
        return {{"tnn", !bad}, {"window", w}, {"witness", wit}};
    }
    json matrix_epsilon() {
        auto X = read_matrix();
        Index J = A.column > 0 ? A.column : window_for(X);
        json es = json::array();
        bool ok = true;
        for (int i = 0; i < X.n(); ++i) {
            auto e = epsilon_auto(X, i, J, A.stop_at_rise);
            ok = ok && e.gap <= cfg.tolerance;
            json o = io::to_json(e);
            o["i"] = i;
            es.push_back(o);
        }
        return {{"epsilon", es}, {"tolerance", io::rat(cfg.tolerance)}, {"within_tolerance", ok}};
    }
    AswOptions asw_options(const FoldedMatrix& X) {
        AswOptions o;
        o.column = A.column > 0 ? A.column : 0;
        if (o.column > X.window_limit()) throw InputError("column exceeds n*cap");
        o.column_step = A.column_step;
        o.check_window = A.check_window;
        o.zero_threshold = parse_rational(A.zero_threshold);
        o.relative_zero = parse_rational(A.relative_zero);
        o.stop_at_rise = A.stop_at_rise;
        return o;
    }
    json matrix_asw() {
        Rational tail = 0;
        auto X = read_matrix(&tail);
        auto t = asw_factorize(X, steps(), asw_options(X));
        json o = io::to_json(t, tail);
        if (t.finite) o["word_reduced"] = is_reduced_word(X.n(), t.word);
        return o;
    }
    json matrix_mq() {
        auto X = read_matrix();
        auto m = mq_matrix(X, A.q, window_for(X));
        json gaps = json::array();
        for (const auto& row : m.gaps) gaps.push_back(io::rats(row));
        json o{{"matrix", io::to_json(m.matrix)}, {"gaps", gaps}};
        if (A.apply) o["applied"] = io::to_json(m.matrix * X);
        return o;
    }
    json matrix_greedy() {
        auto X = read_matrix();
        auto g = greedy_step(X, A.letter, window_for(X), A.check_window);
        return {{"a", io::rat(g.a)}, {"gap", io::rat(g.gap)}, {"residual", io::to_json(g.residual)}};
    }
    json matrix_peel() {
        Rational tail = 0;
        auto X = read_matrix(&tail);
        auto c = from_word(X.n(), parse_list<int>(A.c, "coxeter word"));
        Index col = A.column > 0 ? A.column : window_for(X);
        auto p = coxeter_peel(X, c, A.count, col, A.column_step > 0 ? A.column_step : 1);
        return {{"params", io::rats(p.params)}, {"gaps", io::rats(p.gaps)}, {"tail", io::rat(tail)}, {"residual", io::to_json(p.residual)}};
    }

    // ---- braid
    ParamWord param_word() {
        if (!A.input.empty() || A.n == 0) return io::paramword_from(read_input());
        ParamWord pw{A.n, parse_list<int>(A.word, "letters"), parse_rats(A.params)};
        pw.validate();
        return pw;
    }
    json braid_move() {
        auto pw = param_word();
        auto p = static_cast<std::size_t>(A.pos);
        if (A.pos < 0) throw InputError("--pos must be nonnegative");
        if (A.kind == "commute") return io::to_json(apply_commute(pw, p));
        if (A.kind == "braid") return io::to_json(apply_braid(pw, p));
        if (A.kind == "fuse") return io::to_json(fuse_adjacent(pw, p));
        throw InputError("--kind must be commute, braid or fuse");
    }
    json braid_rmap() {
        return {{"params", io::rats(rmap_finite(A.n, parse_list<int>(A.src, "src"), parse_list<int>(A.dst, "dst"), parse_rats(A.params)))}};
    }
    json braid_rmap_limit() {
        ParamStream s;
        if (!A.ratio.empty()) {
            s = ParamStream::geometric(parse_rational(A.scale), parse_rational(A.ratio));
            s.head = parse_rats(A.head);
        } else {
            s = ParamStream::explicit_list(parse_rats(A.head));
        }
        auto src = parse_iword(A.src, A.n), dst = parse_iword(A.dst, A.n);
        auto T = rmap_limit(src, s, dst, A.depth);
        json o{{"params", io::rats(T.params)}, {"source_used", T.source_used}, {"remainder", io::to_json(T.remainder)}};
        if (A.apply) {
            // e_src(a_1..a_L) = e_dst(params) e_remainder, exactly
            const int D = static_cast<int>(T.source_used) / src.n + 2;
            std::vector<Rational> a;
            for (std::size_t k = 0; k < T.source_used; ++k) a.push_back(s.at(k));
            auto lhs = finite_product(src.n, D, src.truncation(T.source_used), a);
            auto rhs = finite_product(src.n, D, dst.truncation(A.depth), T.params) * product_of(T.remainder, D);
            o["identity_holds"] = lhs == rhs;
        }
        return o;
    }
    json braid_tp_exchange() {
        return io::to_json(tp_exchange_check(A.n, static_cast<int>(A.r), parse_rational(A.a), parse_list<int>(A.word, "word"),
                                             parse_rats(A.params)));
    }
    json braid_join() { return io::to_json(tp_join(one_perm(), A.r)); }

    // ---- fixtures
    json verify_fixtures() {
        std::string dir = A.fixtures.empty() ? TNNLOOP_FIXTURE_DIR : A.fixtures;
        if (!std::filesystem::is_directory(dir)) throw InputError("no fixture directory " + dir);
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(dir))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        json results = json::array();
        std::size_t failed = 0;
        for (const auto& f : files) {
            json j = parse_json_text(slurp(f.string()), f.string());
            for (const auto& fx : j.is_array() ? j : json::array({j})) {
                auto problems = run_fixture(fx);
                failed += !problems.empty();
                results.push_back({{"name", io::field(fx, "name")}, {"ok", problems.empty()}, {"problems", problems}});
            }
        }
        if (failed) status = 1;
        return {{"fixtures", results.size()}, {"failed", failed}, {"results", results}};
    }

    static std::pair<int, json> invoke(const json& spec, const std::string& stdin_text) {
        auto args = io::get_as<std::vector<std::string>>(io::field(spec, "args"), "args");
        std::istringstream is(stdin_text);
        std::ostringstream os, es;
        int rc = run(args, is, os, es);
        auto text = os.str();
        json o = trim(text).empty() ? json(nullptr) : parse_json_text(text, "command output");
        if (rc != 0 && o.is_null() && !trim(es.str()).empty()) o = parse_json_text(es.str(), "error output");
        return {rc, o};
    }

    static std::string stdin_for(const json& fx) {
        if (!fx.contains("stdin")) return "";
        const auto& s = fx["stdin"];
        if (s.is_object() && s.contains("args")) {
            auto [rc, o] = invoke(s, stdin_for(s));
            if (rc != 0) throw InputError("fixture stdin command failed: " + o.dump());
            return o.dump();
        }
        return s.dump();
    }

    static std::vector<std::string> run_fixture(const json& fx) {
        std::vector<std::string> problems;
        auto [rc, o] = invoke(fx, stdin_for(fx));
        int want = fx.value("exit", 0);
        if (rc != want) problems.push_back("exit " + std::to_string(rc) + ", expected " + std::to_string(want) + ": " + o.dump());
        if (rc == 0 && fx.contains("expect"))
            for (const auto& [ptr, m] : fx["expect"].items()) {
                auto e = match(o, ptr, m);
                if (!e.empty()) problems.push_back(e);
            }
        // "compare": run other commands and match pointers across outputs, exactly, within "tol", or
    // after subtracting "offset"
        if (rc == 0 && fx.contains("compare"))
            for (const auto& cmp : fx["compare"]) {
                auto [rc2, o2] = invoke(cmp, stdin_for(cmp));
                if (rc2 != 0) {
                    problems.push_back("compared command failed: " + o2.dump());
                    continue;
                }
                for (const auto& [p1, p2v] : io::field(cmp, "pairs").items()) {
                    json::json_pointer q1(p1), q2(p2v.get<std::string>());
                    if (!o.contains(q1) || !o2.contains(q2)) {
                        problems.push_back(p1 + ": compared path missing");
                        continue;
                    }
                    bool same;
                    if (cmp.contains("tol") || cmp.contains("offset")) {
                        Rational d = io::rat_from(o.at(q1)) - io::rat_from(o2.at(q2));
                        if (cmp.contains("offset")) d -= io::rat_from(cmp["offset"]);
                        same = rabs(d) <= (cmp.contains("tol") ? io::rat_from(cmp["tol"]) : Rational(0));
                    } else {
                        same = o.at(q1) == o2.at(q2);
                    }
                    if (!same) problems.push_back(p1 + ": " + o.at(q1).dump() + " differs from " + o2.at(q2).dump());
                }
            }
        return problems;
    }

    // ---- batch: one JSON request per line, {"args": [...], "stdin": ...} or a bare argument array
    json batch(std::ostream& out) {
        std::string line;
        std::size_t count = 0;
        while (std::getline(in_, line)) {
            if (trim(line).empty()) continue;
            json req = parse_json_text(line, "batch line " + std::to_string(count + 1));
            if (req.is_array()) req = {{"args", req}};
            auto [rc, o] = invoke(req, stdin_for(req));
            out << json{{"exit", rc}, {"output", o}}.dump() << "\n";
            ++count;
        }
        return nullptr;
    }

    // ---- randomized property drivers
    std::uint64_t seed() const { return A.seed >= 0 ? static_cast<std::uint64_t>(A.seed) : cfg.seed; }

    json check(const std::string& which) {
        std::mt19937_64 rng(seed());
        std::size_t cases = 0, failures = 0;
        json first_failure = nullptr;
        auto fail = [&](json what) {
            if (!failures++) first_failure = std::move(what);
        };
        const int count = A.count > 0 ? A.count : 100;
        if (which == "moves") {
            const int D = A.cap >= 0 ? A.cap : 6;
            for (; static_cast<int>(cases) < count;) {
                const int n = 3 + static_cast<int>(rng() % 3);
                auto w = random_reduced_word(n, 3 + static_cast<int>(rng() % 8), rng);
                ParamWord pw{n, w, random_params(w.size(), rng)};
                ParamWord moved = pw;
                if (!random_move(moved, rng)) continue;
                ++cases;
                if (product_of(pw, D) != product_of(moved, D) || residue_sums(pw) != residue_sums(moved))
                    fail({{"before", io::to_json(pw)}, {"after", io::to_json(moved)}});
            }
        } else if (which == "exchange") {
            for (int guard = 0; static_cast<int>(cases) < count && guard < 100 * count; ++guard) {
                const int n = 3 + static_cast<int>(rng() % 2);
                auto w = random_reduced_word(n, 1 + static_cast<int>(rng() % 10), rng);
                const int r = static_cast<int>(rng() % static_cast<unsigned>(n));
                Word src{r};
                src.insert(src.end(), w.begin(), w.end());
                if (!is_reduced_word(n, src) || !exchange_letter(from_word(n, w), r)) continue;
                ++cases;
                auto p = random_params(w.size() + 1, rng);
                auto res = tp_exchange_check(n, r, p.back(), w, {p.begin(), p.end() - 1});
                for (const auto& rep : res.reports)
                    if (rep.slack < 0) {
                        fail({{"n", n}, {"r", r}, {"word", w}, {"m", rep.m}, {"x", rep.x}});
                        break;
                    }
            }
        } else if (which == "greedy") {
            for (; static_cast<int>(cases) < count; ++cases) {
                const int n = 3 + static_cast<int>(rng() % 2);
                auto w = random_reduced_word(n, 2 + static_cast<int>(rng() % 6), rng);
                ParamWord pw{n, w, random_params(w.size(), rng)};
                ParamWord walk = pw;
                for (int k = 0; k < 10; ++k) random_move(walk, rng);
                auto moved = rmap_finite(n, w, walk.letters, pw.params);
                if (!verify_greedy_finite(n, w, pw.params).greedy || !verify_greedy_finite(n, walk.letters, moved).greedy)
                    fail({{"word", w}, {"target", walk.letters}});
            }
        } else {
            throw InputError("unknown check " + which);
        }
        if (failures) status = 1;
        return {{"check", which}, {"seed", seed()}, {"cases", cases}, {"failures", failures}, {"first_failure", first_failure}};
    }

private:
    std::istream& in_;
};

}  // namespace detail

inline json error_json(const char* kind, const std::string& msg) { return {{"error", {{"kind", kind}, {"message", msg}}}}; }

inline int run(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
    detail::Args A;
    detail::Commands C(A, in);
    json result;
    bool streamed = false;

    CLI::App app{"Totally nonnegative loop group toolkit", "tnnloop"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--config", A.config_path, "JSON config file (cap, window, tolerance, seed, steps)");
    app.add_option("--seed", A.seed, "seed for randomized drivers");

    auto leaf = [&](CLI::App* parent, const char* name, const char* desc, std::function<json()> f) {
        auto* s = parent->add_subcommand(name, desc);
        s->callback([&result, f] { result = f(); });
        return s;
    };
    auto n_opt = [&](CLI::App* s) { s->add_option("--n", A.n, "number of strands")->required(); };
    auto perm_opts = [&](CLI::App* s) {
        s->add_option("--n", A.n, "n, for --word");
        s->add_option("--word", A.word, "reduced or unreduced word, comma separated")->each([&](const std::string&) { A.has_word = true; });
        s->add_option("--window", A.window_s, "window [w(1),...,w(n)]");
        s->add_option("--lambda", A.lambda, "translation vector");
    };
    auto input_opt = [&](CLI::App* s) {
        s->add_option("--input", A.input, "JSON input file, - for stdin (default)");
        s->add_option("--field", A.field, "key holding the matrix when the input is an object of results");
    };
    auto iword_opt = [&](CLI::App* s, const char* name, std::string& target) {
        s->add_option(name, target, "infinite word PREFIX:PERIOD or JSON")->required();
    };

    // perm
    auto* perm = app.add_subcommand("perm", "affine permutations");
    perm->require_subcommand(1);
    {
        auto* s = leaf(perm, "from-word", "window of a word", [&] { return C.perm_from_word(); });
        n_opt(s);
        s->add_option("--word", A.word, "word, comma separated")->required();
    }
    perm_opts(leaf(perm, "length", "Coxeter length", [&] { return C.perm_length(); }));
    perm_opts(leaf(perm, "m-table", "m_alpha values", [&] { return C.perm_m_table(); }));
    perm_opts(leaf(perm, "asw-perm", "cyclically increasing factorization", [&] { return C.perm_asw(); }));
    for (auto [name, desc, f] : {std::tuple<const char*, const char*, std::function<json()>>{"meet", "weak order meet", [&] { return C.perm_meet(); }},
                                 {"compatible", "compatible pair (a, b)", [&] { return C.perm_compatible(); }}}) {
        auto* s = leaf(perm, name, desc, f);
        s->add_option("--n", A.n, "n, for words");
        s->add_option("--a", A.a, "word or permutation JSON")->required();
        s->add_option("--b", A.b, "word or permutation JSON")->required();
    }
    perm_opts(leaf(perm, "show", "window, length and a reduced word", [&] { return C.perm_show(); }));
    perm_opts(leaf(perm, "ci-factor", "maximal cyclically increasing left factor", [&] { return C.perm_ci_factor(); }));
    {
        auto* s = leaf(perm, "rotate", "rotation s_i -> s_{i-k}", [&] { return C.perm_rotate(); });
        perm_opts(s);
        s->add_option("--k", A.k, "shift")->required();
    }
    {
        auto* s = leaf(perm, "coxeter", "Coxeter element from its first part", [&] { return C.perm_coxeter(); });
        n_opt(s);
        s->add_option("--first-part", A.first_part, "first part of the orientation")->required();
    }
    {
        auto* s = leaf(perm, "mul", "product a b", [&] { return C.perm_mul(); });
        s->add_option("--n", A.n, "n, for words");
        s->add_option("--a", A.a, "word or permutation JSON")->required();
        s->add_option("--b", A.b, "word or permutation JSON")->required();
    }
    {
        auto* s = leaf(perm, "demazure-reduce", "Demazure product word", [&] { return C.perm_demazure(); });
        n_opt(s);
        s->add_option("--word", A.word, "word")->required();
    }

    // limit
    auto* limit = app.add_subcommand("limit", "infinite reduced words");
    limit->require_subcommand(1);
    for (auto [name, desc, f] :
         {std::tuple<const char*, const char*, std::function<json()>>{"certify", "reducedness certificate", [&] { return C.limit_certify(); }},
          {"m-table", "m_alpha values", [&] { return C.limit_m_table(); }},
          {"block", "block set composition", [&] { return C.limit_block(); }},
          {"fully-commutative", "full commutativity", [&] { return C.limit_fully_commutative(); }}}) {
        auto* s = leaf(limit, name, desc, f);
        s->add_option("--n", A.n, "n, for PREFIX:PERIOD words");
        iword_opt(s, "--word", A.word);
    }
    for (auto [name, desc, f] : {std::tuple<const char*, const char*, std::function<json()>>{"leq", "limit weak order a <= b", [&] { return C.limit_leq(); }},
                                 {"meet", "limit weak order meet", [&] { return C.limit_meet_cmd(); }}}) {
        auto* s = leaf(limit, name, desc, f);
        s->add_option("--n", A.n, "n, for PREFIX:PERIOD words");
        iword_opt(s, "--a", A.a);
        iword_opt(s, "--b", A.b);
        if (std::string(name) == "meet") s->add_option("--cap", A.meet_cap, "truncation cap");
    }
    {
        auto* s = leaf(limit, "exchange-trace", "letters of b crossed out of a", [&] { return C.limit_exchange_trace(); });
        s->add_option("--n", A.n, "n, for PREFIX:PERIOD words");
        iword_opt(s, "--a", A.a);
        iword_opt(s, "--b", A.b);
        s->add_option("--depth", A.depth, "number of letters of b")->required();
    }
    {
        auto* s = leaf(limit, "block-leq", "order on blocks", [&] { return C.limit_block_leq(); });
        s->add_option("--a", A.a, "set composition JSON")->required();
        s->add_option("--b", A.b, "set composition JSON")->required();
    }
    {
        auto* s = leaf(limit, "verify-word", "check a word against a block", [&] { return C.limit_verify_word(); });
        iword_opt(s, "--word", A.word);
        s->add_option("--block", A.block, "set composition JSON")->required();
    }
    {
        auto* s = leaf(limit, "check-walk", "walk conditions for a translation word", [&] { return C.limit_check_walk(); });
        s->add_option("--lambda", A.lambda, "starting vector")->required();
        s->add_option("--word", A.word, "word")->required();
    }
    n_opt(leaf(limit, "blocks", "all blocks", [&] { return C.limit_blocks(); }));
    leaf(limit, "minimal-word", "minimal word for a block", [&] { return C.limit_minimal_word(); })
        ->add_option("--block", A.block, "set composition JSON, e.g. [[1],[2,3]]")
        ->required();
    {
        auto* s = leaf(limit, "exchange", "exchange position of a letter", [&] { return C.limit_exchange(); });
        s->add_option("--n", A.n, "n");
        iword_opt(s, "--word", A.word);
        s->add_option("--letter", A.letter, "letter placed in front")->required();
    }

    // matrix
    auto* matrix = app.add_subcommand("matrix", "folded loop group matrices");
    matrix->require_subcommand(1);
    {
        auto* s = leaf(matrix, "example-x", "the three-strand example matrix", [&] { return C.matrix_example_x(); });
        s->add_option("--a", A.a, "parameter a")->required();
        s->add_option("--cap", A.cap, "series cap");
    }
    {
        auto* s = leaf(matrix, "product", "finite Chevalley product", [&] { return C.matrix_product(); });
        n_opt(s);
        s->add_option("--word", A.word, "letters")->required();
        s->add_option("--params", A.params, "parameters")->required();
        s->add_option("--cap", A.cap, "series cap");
    }
    {
        auto* s = leaf(matrix, "sample-acinf", "truncated Coxeter power product", [&] { return C.matrix_sample(); });
        n_opt(s);
        s->add_option("--c", A.c, "Coxeter word")->required();
        s->add_option("--delta", A.delta, "ratio delta")->required();
        s->add_option("--K", A.K, "offset K");
        s->add_option("--factors", A.factors, "number of factors")->required();
        s->add_option("--cap", A.cap, "series cap");
    }
    {
        auto* s = leaf(matrix, "entry", "unfolded entry x_{i,j}", [&] { return C.matrix_entry(); });
        input_opt(s);
        s->add_option("--i", A.r, "row")->required();
        s->add_option("--j", A.k, "column")->required();
    }
    {
        auto* s = leaf(matrix, "example-eta", "exponent pattern of the example matrix", [&] { return C.matrix_eta(); });
        s->add_option("--i", A.r, "row")->required();
        s->add_option("--j", A.k, "column")->required();
    }
    {
        auto* s = leaf(matrix, "left-mul", "e_i(a) X", [&] { return C.matrix_left_mul(); });
        input_opt(s);
        s->add_option("--letter", A.letter, "letter i")->required();
        s->add_option("--a", A.a, "parameter")->required();
    }
    {
        auto* s = leaf(matrix, "dominated", "w-dominance of the cells of (I, J)", [&] { return C.matrix_dominated(); });
        n_opt(s);
        s->add_option("--word", A.word, "word of w")->required();
        s->add_option("--rows", A.rows, "row set")->required();
        s->add_option("--cols", A.cols, "column set")->required();
    }
    {
        auto* s = leaf(matrix, "minor-ratio", "limit of minor ratios", [&] { return C.matrix_minor_ratio(); });
        input_opt(s);
        s->add_option("--rows", A.rows, "row set I")->required();
        s->add_option("--rows2", A.rows2, "row set I'")->required();
        s->add_option("--window", A.window, "window");
    }
    {
        auto* s = leaf(matrix, "triple", "greedy parameters of a braid triple", [&] { return C.matrix_triple(); });
        input_opt(s);
        s->add_option("--letter", A.letter, "letter i")->required();
        s->add_option("--order", A.order, "iji or jij")->required();
        s->add_option("--window", A.window, "window");
    }
    {
        auto* s = leaf(matrix, "minor", "unfolded minor", [&] { return C.matrix_minor(); });
        input_opt(s);
        s->add_option("--rows", A.rows, "row set")->required();
        s->add_option("--cols", A.cols, "column set")->required();
    }
    {
        auto* s = leaf(matrix, "tnn-check", "search for a negative minor", [&] { return C.matrix_tnn(); });
        input_opt(s);
        s->add_option("--window", A.window, "window (default 2n)");
    }
    {
        auto* s = leaf(matrix, "epsilon", "epsilon values", [&] { return C.matrix_epsilon(); });
        input_opt(s);
        s->add_option("--column", A.column, "column J");
        s->add_flag("--stop-at-rise", A.stop_at_rise, "cut at the first increase");
    }
    {
        auto* s = leaf(matrix, "asw", "curl extraction", [&] { return C.matrix_asw(); });
        input_opt(s);
        s->add_option("--steps", A.steps, "number of curls");
        s->add_option("--column", A.column, "epsilon column");
        s->add_option("--column-step", A.column_step, "column shift per step");
        s->add_option("--check-window", A.check_window, "TNN check window for residuals");
        s->add_option("--zero-threshold", A.zero_threshold, "absolute zero threshold");
        s->add_option("--relative-zero", A.relative_zero, "relative zero threshold");
        s->add_flag("--stop-at-rise", A.stop_at_rise, "cut at the first increase");
    }
    {
        auto* s = leaf(matrix, "mq", "q-ASW matrix", [&] { return C.matrix_mq(); });
        input_opt(s);
        s->add_option("--q", A.q, "order q");
        s->add_option("--window", A.window, "window");
        s->add_flag("--apply", A.apply, "also output M_q(X) X under \"applied\"");
    }
    {
        auto* s = leaf(matrix, "greedy", "one greedy step", [&] { return C.matrix_greedy(); });
        input_opt(s);
        s->add_option("--letter", A.letter, "letter i")->required();
        s->add_option("--window", A.window, "window");
        s->add_option("--check-window", A.check_window, "TNN check window for the residual");
    }
    {
        auto* s = leaf(matrix, "peel", "peel Coxeter factors", [&] { return C.matrix_peel(); });
        input_opt(s);
        s->add_option("--c", A.c, "Coxeter word")->required();
        s->add_option("--count", A.count, "number of parameters")->required();
        s->add_option("--column", A.column, "column");
        s->add_option("--column-step", A.column_step, "column shift per factor");
    }

    // braid
    auto* braid = app.add_subcommand("braid", "braid moves and parameter transport");
    braid->require_subcommand(1);
    {
        auto* s = leaf(braid, "move", "one move on a parametrized word", [&] { return C.braid_move(); });
        input_opt(s);
        s->add_option("--n", A.n, "n");
        s->add_option("--letters", A.word, "letters");
        s->add_option("--params", A.params, "parameters");
        s->add_option("--kind", A.kind, "commute, braid or fuse")->required();
        s->add_option("--pos", A.pos, "0-based position")->required();
    }
    {
        auto* s = leaf(braid, "rmap", "transport parameters between reduced words", [&] { return C.braid_rmap(); });
        n_opt(s);
        s->add_option("--src", A.src, "source word")->required();
        s->add_option("--dst", A.dst, "target word")->required();
        s->add_option("--params", A.params, "source parameters")->required();
    }
    {
        auto* s = leaf(braid, "rmap-limit", "transport along a braid limit", [&] { return C.braid_rmap_limit(); });
        s->add_option("--n", A.n, "n");
        iword_opt(s, "--src", A.src);
        iword_opt(s, "--dst", A.dst);
        s->add_option("--head", A.head, "explicit leading parameters");
        s->add_option("--scale", A.scale, "geometric tail scale");
        s->add_option("--ratio", A.ratio, "geometric tail ratio");
        s->add_option("--depth", A.depth, "number of target parameters")->required();
        s->add_flag("--verify", A.apply, "check the product identity on the consumed prefix");
    }
    {
        auto* s = leaf(braid, "tp-exchange", "exchange inequalities", [&] { return C.braid_tp_exchange(); });
        n_opt(s);
        s->add_option("--r", A.r, "letter r")->required();
        s->add_option("--a", A.a, "parameter of e_r")->required();
        s->add_option("--word", A.word, "word of v")->required();
        s->add_option("--params", A.params, "parameters of v")->required();
    }
    {
        auto* s = leaf(braid, "join", "join of w and s_r w", [&] { return C.braid_join(); });
        perm_opts(s);
        s->add_option("--r", A.r, "integer r")->required();
    }
    for (auto* parent : {braid, &app})
        leaf(parent, "verify-paper-examples", "run the golden fixtures", [&] { return C.verify_fixtures(); })
            ->add_option("--fixtures", A.fixtures, "fixture directory");

    // batch and drivers
    leaf(&app, "batch", "one JSON request per stdin line", [&] {
        streamed = true;
        return C.batch(out);
    });
    auto* check = app.add_subcommand("check", "randomized property drivers");
    check->require_subcommand(1);
    for (const char* which : {"moves", "exchange", "greedy"}) {
        auto* s = leaf(check, which, "property driver", [&C, which] { return C.check(which); });
        s->add_option("--count", A.count, "number of cases");
        s->add_option("--cap", A.cap, "series cap");
    }

    // the config has to be loaded before any callback runs
    app.parse_complete_callback([&] {
        if (!A.config_path.empty()) C.cfg = config_from(parse_json_text(slurp(A.config_path), A.config_path));
    });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        int rc = app.exit(e, out, msg);
        if (rc == 0) return 0;
        err << error_json("input", msg.str().empty() ? e.what() : detail::trim(msg.str())).dump(2) << "\n";
        return 2;
    } catch (const InputError& e) {
        err << error_json("input", e.what()).dump(2) << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << error_json("input", e.what()).dump(2) << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << error_json("domain", e.what()).dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << error_json("domain", e.what()).dump(2) << "\n";
        return 1;
    }
    if (!streamed) out << result.dump(2) << "\n";
    return C.status;
}

}  // namespace tnnloop::cli
