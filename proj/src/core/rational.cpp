#include "mly/core/rational.hpp"

#include "mly/core/error.hpp"

namespace mly {
namespace {

constexpr Wide kWideMin = static_cast<Wide>(Index{1} << 127);

Wide gcd(Wide a, Wide b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const Wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Wide mul(Wide a, Wide b) {
    Wide out = 0;
    if (__builtin_mul_overflow(a, b, &out) || out == kWideMin) {
        throw Error(ErrorCode::Overflow, "rational multiplication overflow");
    }
    return out;
}

Wide add(Wide a, Wide b) {
    Wide out = 0;
    if (__builtin_add_overflow(a, b, &out) || out == kWideMin) {
        throw Error(ErrorCode::Overflow, "rational addition overflow");
    }
    return out;
}

}  // namespace

Rational::Rational(Wide num) : num_(num), den_(1) {
    if (num == kWideMin) throw Error(ErrorCode::Overflow, "rational numerator out of range");
}

Rational::Rational(Wide num, Wide den) : num_(num), den_(den) {
    if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
    if (num == kWideMin || den == kWideMin) throw Error(ErrorCode::Overflow, "rational out of range");
    normalize();
}

Rational Rational::from_index(Index value) {
    if (value > kMaxIndex) throw Error(ErrorCode::Overflow, "index does not fit a rational");
    return Rational(static_cast<Wide>(value));
}

void Rational::normalize() {
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const Wide g = gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
    if (num_ == 0) den_ = 1;
}

double Rational::to_double() const noexcept {
    if (den_ == 1) return static_cast<double>(num_);
    // split into integer and fractional parts so huge numerators keep precision
    const Wide whole = num_ / den_;
    const Wide rem = num_ % den_;
    return static_cast<double>(whole) +
           static_cast<double>(static_cast<long double>(rem) / static_cast<long double>(den_));
}

std::string Rational::to_string() const {
    if (den_ == 1) return to_string_signed(num_);
    return to_string_signed(num_) + "/" + to_string_signed(den_);
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw Error(ErrorCode::InvalidArgument, "empty rational literal");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const Rational num = parse(text.substr(0, slash));
        const Rational den = parse(text.substr(slash + 1));
        return num / den;
    }
    bool negative = false;
    std::string body = text;
    if (body.front() == '-' || body.front() == '+') {
        negative = body.front() == '-';
        body.erase(0, 1);
    }
    const auto dot = body.find('.');
    std::string digits = body;
    Wide den = 1;
    if (dot != std::string::npos) {
        const std::string frac = body.substr(dot + 1);
        digits = body.substr(0, dot) + frac;
        for (std::size_t k = 0; k < frac.size(); ++k) den = mul(den, 10);
    }
    if (digits.empty()) throw Error(ErrorCode::InvalidArgument, "malformed rational literal '" + text + "'");
    const Index magnitude = parse_index(digits);
    const Wide num = static_cast<Wide>(magnitude);
    return Rational(negative ? -num : num, den);
}

Rational Rational::abs() const {
    Rational out = *this;
    if (out.num_ < 0) out.num_ = -out.num_;
    return out;
}

Rational& Rational::operator+=(const Rational& rhs) {
    if (den_ == 1 && rhs.den_ == 1) {
        num_ = add(num_, rhs.num_);
        return *this;
    }
    const Wide g = gcd(den_, rhs.den_);
    const Wide left = mul(num_, rhs.den_ / g);
    const Wide right = mul(rhs.num_, den_ / g);
    num_ = add(left, right);
    den_ = mul(den_, rhs.den_ / g);
    normalize();
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
    return *this += -rhs;
}

Rational& Rational::operator*=(const Rational& rhs) {
    const Wide g1 = gcd(num_, rhs.den_);
    const Wide g2 = gcd(rhs.num_, den_);
    const Wide a = g1 > 1 ? num_ / g1 : num_;
    const Wide d = g1 > 1 ? rhs.den_ / g1 : rhs.den_;
    const Wide b = g2 > 1 ? rhs.num_ / g2 : rhs.num_;
    const Wide c = g2 > 1 ? den_ / g2 : den_;
    num_ = mul(a, b);
    den_ = mul(c, d);
    normalize();
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) throw Error(ErrorCode::InvalidArgument, "division by zero rational");
    Rational inv;
    inv.num_ = rhs.den_;
    inv.den_ = rhs.num_;
    inv.normalize();
    return *this *= inv;
}

Rational Rational::operator-() const {
    Rational out = *this;
    out.num_ = -out.num_;
    return out;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    const Rational diff = a - b;
    return diff.num_ <=> Wide{0};
}

}  // namespace mly
