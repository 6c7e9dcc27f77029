#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace tnnloop {

using Rational = mpq_class;

// Thrown for inputs that are well formed but mathematically invalid.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown for malformed input (bad syntax, wrong shapes).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Always "p/q", including integers ("3/1").
inline std::string to_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw InputError("empty rational");
    Rational q;
    if (q.set_str(s, 10) != 0) throw InputError("bad rational: " + s);
    if (q.get_den() == 0) throw InputError("zero denominator: " + s);
    q.canonicalize();
    return q;
}

inline Rational rpow(const Rational& a, long e) {
    Rational r = 1;
    Rational b = a;
    if (e < 0) {
        b = 1 / a;
        e = -e;
    }
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

inline Rational rabs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

}  // namespace tnnloop
