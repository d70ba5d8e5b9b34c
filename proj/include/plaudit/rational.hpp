#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace plaudit {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational over arbitrary-precision integers.
///
/// Always normalized: denominator > 0, gcd(num, den) == 1, zero is 0/1.
/// All arithmetic and comparisons are exact; conversion to double happens
/// only where a caller explicitly asks for it (the risk layer).
class Rat {
public:
    Rat() : num_(0), den_(1) {}
    Rat(long long value) : num_(value), den_(1) {}  // implicit on purpose
    Rat(BigInt value) : num_(std::move(value)), den_(1) {}
    Rat(BigInt numerator, BigInt denominator)
        : num_(std::move(numerator)), den_(std::move(denominator)) {
        if (den_ == 0) throw std::domain_error("Rat: zero denominator");
        normalize();
    }

    /// Parses "n" or "n/d" with an optional leading sign on n.
    static Rat parse(const std::string& text) {
        auto slash = text.find('/');
        if (slash == std::string::npos) return Rat(parse_int(text), 1);
        return Rat(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    /// Largest integer not greater than the value.
    BigInt floor() const {
        BigInt q = num_ / den_;  // truncates toward zero
        if (num_ < 0 && q * den_ != num_) --q;
        return q;
    }

    Rat operator-() const {
        Rat r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    Rat& operator+=(const Rat& o) {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ *= o.den_;
        normalize();
        return *this;
    }
    Rat& operator-=(const Rat& o) {
        num_ = num_ * o.den_ - o.num_ * den_;
        den_ *= o.den_;
        normalize();
        return *this;
    }
    Rat& operator*=(const Rat& o) {
        num_ *= o.num_;
        den_ *= o.den_;
        normalize();
        return *this;
    }
    Rat& operator/=(const Rat& o) {
        if (o.num_ == 0) throw std::domain_error("Rat: division by zero");
        num_ *= o.den_;
        den_ *= o.num_;
        normalize();
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        BigInt lhs = a.num_ * b.den_;
        BigInt rhs = b.num_ * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    static const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }
    static const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

    double to_double() const {
        return num_.convert_to<double>() / den_.convert_to<double>();
    }

    std::string str() const {
        std::string s = num_.str();
        if (den_ != 1) {
            s += '/';
            s += den_.str();
        }
        return s;
    }

private:
    static BigInt parse_int(const std::string& text) {
        std::size_t i = 0;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
        std::size_t digits_from = i;
        if (i == text.size()) throw std::invalid_argument("Rat: empty number in '" + text + "'");
        for (; i < text.size(); ++i)
            if (text[i] < '0' || text[i] > '9')
                throw std::invalid_argument("Rat: bad number '" + text + "'");
        BigInt magnitude(text.substr(digits_from));
        return text[0] == '-' ? BigInt(-magnitude) : magnitude;
    }

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_;
    BigInt den_;
};

inline std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace plaudit
