#pragma once

#include <string>
#include <vector>

#include "tnnloop/rational.hpp"

namespace tnnloop {

// Power series in t truncated after t^cap.
class Series {
public:
    Series() = default;
    explicit Series(int cap) : c_(static_cast<std::size_t>(cap + 1)) {
        if (cap < 0) throw InputError("Series: negative cap");
    }
    Series(int cap, const Rational& constant) : Series(cap) { c_[0] = constant; }

    int cap() const { return static_cast<int>(c_.size()) - 1; }
    const Rational& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    Rational& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
    const std::vector<Rational>& coeffs() const { return c_; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (x != 0) return false;
        return true;
    }

    Series& operator+=(const Series& o) {
        check(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Series& operator-=(const Series& o) {
        check(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Series& operator*=(const Rational& s) {
        for (auto& x : c_) x *= s;
        return *this;
    }

    // this += s * t^shift * o, truncated.
    void add_scaled(const Series& o, const Rational& s, int shift = 0) {
        check(o);
        if (s == 0) return;
        for (int k = 0; k + shift <= cap(); ++k)
            if (o[k] != 0) c_[static_cast<std::size_t>(k + shift)] += s * o[k];
    }

    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(const Series& a, const Series& b) {
        a.check(b);
        Series r(a.cap());
        for (int i = 0; i <= a.cap(); ++i) {
            if (a[i] == 0) continue;
            for (int j = 0; i + j <= a.cap(); ++j)
                if (b[j] != 0) r[i + j] += a[i] * b[j];
        }
        return r;
    }
    friend bool operator==(const Series& a, const Series& b) { return a.c_ == b.c_; }

    // Multiplicative inverse; requires a unit constant term.
    Series inverse() const {
        if (c_[0] == 0) throw DomainError("Series::inverse: constant term is zero");
        Series r(cap());
        r[0] = 1 / c_[0];
        for (int k = 1; k <= cap(); ++k) {
            Rational s = 0;
            for (int p = 1; p <= k; ++p) s += c_[static_cast<std::size_t>(p)] * r[k - p];
            r[k] = -s * r[0];
        }
        return r;
    }

private:
    void check(const Series& o) const {
        if (o.c_.size() != c_.size()) throw InputError("Series: mismatched caps");
    }

    std::vector<Rational> c_;
};

}  // namespace tnnloop
