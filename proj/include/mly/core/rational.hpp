#pragma once

#include <compare>
#include <string>

#include "mly/core/index.hpp"

namespace mly {

/// Exact rational with 128-bit numerator and denominator, always reduced and
/// with a positive denominator. Every operation is overflow-checked and throws
/// Error(Overflow) instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(Wide num);  // NOLINT(google-explicit-constructor)
    Rational(Wide num, Wide den);

    static Rational from_index(Index value);

    Wide num() const noexcept { return num_; }
    Wide den() const noexcept { return den_; }

    bool is_integer() const noexcept { return den_ == 1; }
    bool is_zero() const noexcept { return num_ == 0; }

    double to_double() const noexcept;
    std::string to_string() const;  // "p" or "p/q"

    /// Accepts "p", "-p", "p/q" and terminating decimals such as "2.5".
    static Rational parse(const std::string& text);

    Rational abs() const;

    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    void normalize();

    Wide num_ = 0;
    Wide den_ = 1;
};

}  // namespace mly
