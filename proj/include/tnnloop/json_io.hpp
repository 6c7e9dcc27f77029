#pragma once

// JSON encodings shared by the CLI and the fixtures. Every rational is a "p/q" string.

#include <string>
#include <vector>

#include <json.hpp>

#include "tnnloop/braid_engine.hpp"
#include "tnnloop/factorization.hpp"
#include "tnnloop/limit_words.hpp"

namespace tnnloop::io {

using json = nlohmann::json;

inline json rat(const Rational& q) { return to_string(q); }

inline json rats(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& q : v) a.push_back(to_string(q));
    return a;
}

inline Rational rat_from(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw InputError("expected a rational as a \"p/q\" string or an integer");
}

inline std::vector<Rational> rats_from(const json& j) {
    if (!j.is_array()) throw InputError("expected an array of rationals");
    std::vector<Rational> v;
    for (const auto& x : j) v.push_back(rat_from(x));
    return v;
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* what) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("bad value for ") + what);
    }
}

inline int int_field(const json& j, const char* key) { return get_as<int>(field(j, key), key); }

inline Word word_from(const json& j) { return get_as<Word>(j, "word"); }

// AffinePerm: {"n": 3, "window": [2, 0, 4]}
inline json to_json(const AffinePerm& w) { return {{"n", w.n()}, {"window", w.window()}}; }

inline AffinePerm perm_from(const json& j) {
    return AffinePerm(int_field(j, "n"), get_as<std::vector<std::int64_t>>(field(j, "window"), "window"));
}

// InfiniteWord: {"n": 3, "prefix": [1], "period": [0, 1, 2]}
inline json to_json(const InfiniteWord& w) { return {{"n", w.n}, {"prefix", w.prefix}, {"period", w.period}}; }

inline InfiniteWord iword_from(const json& j) {
    InfiniteWord w{int_field(j, "n"), j.contains("prefix") ? word_from(j.at("prefix")) : Word{}, word_from(field(j, "period"))};
    w.validate();
    return w;
}

// MAlphaTable: {"1,2": 0, "1,3": "+inf", ...}
inline json to_json(const MAlphaTable& t) {
    json o = json::object();
    for (auto [i, j] : t.roots()) {
        const auto& v = t.at(i, j);
        std::string key = std::to_string(i) + "," + std::to_string(j);
        if (v.is_finite())
            o[key] = v.value;
        else
            o[key] = v.str();
    }
    return o;
}

inline MAlphaTable mtable_from(const json& j, int n) {
    MAlphaTable t(n);
    for (auto [a, b] : t.roots()) {
        const auto& v = field(j, (std::to_string(a) + "," + std::to_string(b)).c_str());
        if (v.is_number_integer())
            t.at(a, b) = MValue::finite(v.get<std::int64_t>());
        else if (v == "+inf")
            t.at(a, b) = MValue::plus_inf();
        else if (v == "-inf")
            t.at(a, b) = MValue::minus_inf();
        else
            throw InputError("m-table entries are integers, \"+inf\" or \"-inf\"");
    }
    return t;
}

// SetComposition: [[1], [2, 3]]
inline json to_json(const SetComposition& g) { return g.parts; }

inline SetComposition composition_from(const json& j) {
    SetComposition g;
    g.parts = get_as<std::vector<std::vector<int>>>(j, "set composition");
    for (const auto& p : g.parts) g.n += static_cast<int>(p.size());
    g.validate();
    return g;
}

// FoldedMatrix: {"n": 3, "cap": 15, "entries": [[["1/1", "0/1", ...], ...], ...]}
// entries[r][c][k] is the coefficient of t^k in the folded entry (r, c).
inline json to_json(const FoldedMatrix& X) {
    json rows = json::array();
    for (int r = 0; r < X.n(); ++r) {
        json row = json::array();
        for (int c = 0; c < X.n(); ++c) row.push_back(rats(X.at(r, c).coeffs()));
        rows.push_back(std::move(row));
    }
    return {{"n", X.n()}, {"cap", X.cap()}, {"entries", std::move(rows)}};
}

inline FoldedMatrix matrix_from(const json& j) {
    const int n = int_field(j, "n"), D = int_field(j, "cap");
    if (n < 2 || D < 0) throw InputError("matrix: need n >= 2 and cap >= 0");
    const auto& e = field(j, "entries");
    if (!e.is_array() || e.size() != static_cast<std::size_t>(n)) throw InputError("matrix: entries must have n rows");
    FoldedMatrix X(n, D);
    for (int r = 0; r < n; ++r) {
        const auto& row = e[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) throw InputError("matrix: each row must have n entries");
        for (int c = 0; c < n; ++c) {
            auto cs = rats_from(row[static_cast<std::size_t>(c)]);
            if (cs.size() != static_cast<std::size_t>(D + 1)) throw InputError("matrix: each entry needs cap + 1 coefficients");
            for (int k = 0; k <= D; ++k) X.at(r, c)[k] = cs[static_cast<std::size_t>(k)];
        }
    }
    return X;
}

// Trace: {"factors": [{"kind": "curl", "params": [...]}], "residual": <matrix>, "tail": "p/q", "gaps": [...]}
inline json to_json(const FactorizationTrace& t, const Rational& tail = 0) {
    json fs = json::array();
    for (const auto& f : t.factors) {
        json o{{"kind", kind_name(f.kind)}, {"params", rats(f.params)}};
        if (f.kind == Factor::Kind::Chevalley) o["letter"] = f.letter;
        fs.push_back(std::move(o));
    }
    json out{{"factors", std::move(fs)}, {"residual", to_json(t.residual)}, {"tail", rat(tail)}, {"gaps", rats(t.gaps)}};
    if (t.finite) {
        out["word"] = t.word;
        out["params"] = rats(t.params);
    }
    return out;
}

inline FactorizationTrace trace_from(const json& j) {
    FactorizationTrace t;
    for (const auto& f : field(j, "factors")) {
        auto kind = get_as<std::string>(field(f, "kind"), "kind");
        Factor x{Factor::Kind::Curl, rats_from(field(f, "params")), -1};
        if (kind == "whirl") {
            x.kind = Factor::Kind::Whirl;
        } else if (kind == "chevalley") {
            x.kind = Factor::Kind::Chevalley;
            x.letter = int_field(f, "letter");
        } else if (kind != "curl") {
            throw InputError("unknown factor kind " + kind);
        }
        t.factors.push_back(std::move(x));
    }
    t.residual = matrix_from(field(j, "residual"));
    t.gaps = rats_from(field(j, "gaps"));
    if (j.contains("word")) {
        t.finite = true;
        t.word = word_from(j.at("word"));
        t.params = rats_from(field(j, "params"));
    }
    return t;
}

// ParamWord: {"n": 3, "letters": [0, 1, 0], "params": ["1/1", ...]}
inline json to_json(const ParamWord& pw) { return {{"n", pw.n}, {"letters", pw.letters}, {"params", rats(pw.params)}}; }

inline ParamWord paramword_from(const json& j) {
    ParamWord pw{int_field(j, "n"), word_from(field(j, "letters")), rats_from(field(j, "params"))};
    pw.validate();
    return pw;
}

inline json to_json(const ExchangeResult& r) {
    json reps = json::array();
    for (const auto& x : r.reports)
        reps.push_back({{"m", x.m}, {"x", x.x}, {"lhs_sum", rat(x.lhs_sum)}, {"rhs_sum", rat(x.rhs_sum)}, {"slack", rat(x.slack)}});
    return {{"j", r.j}, {"transported", rats(r.transported)}, {"a_prime", rat(r.a_prime)}, {"reports", std::move(reps)}};
}

inline json to_json(const EpsilonReport& e) {
    return {{"value", rat(e.value)}, {"gap", rat(e.gap)}, {"column", e.column_used}};
}

}  // namespace tnnloop::io
