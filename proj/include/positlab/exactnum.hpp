#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace positlab {

/// Arbitrary-precision signed integer.
///
/// Canonical by construction: zero is never negative and there are no
/// leading zero limbs. Division truncates toward zero; the remainder takes
/// the sign of the dividend.
class BigInt {
public:
    using backend_type = boost::multiprecision::cpp_int;

    BigInt() = default;
    BigInt(int v) : v_(v) {}
    BigInt(long v) : v_(v) {}
    BigInt(long long v) : v_(v) {}
    BigInt(unsigned v) : v_(v) {}
    BigInt(unsigned long v) : v_(v) {}
    BigInt(unsigned long long v) : v_(v) {}
    explicit BigInt(backend_type v) : v_(std::move(v)) {}

    /// Parses an optionally signed decimal integer. Throws std::invalid_argument.
    static BigInt parse(std::string_view text);

    /// 2^exp.
    static BigInt pow2(std::uint64_t exp);

    std::string to_string() const;

    bool is_zero() const { return v_.is_zero(); }
    bool is_negative() const { return v_.sign() < 0; }
    bool is_odd() const { return !v_.is_zero() && boost::multiprecision::bit_test(v_, 0); }
    int sign() const { return v_.sign(); }

    /// Number of significant bits of |x|; 0 for zero.
    std::uint64_t bit_length() const;
    /// Bit i of |x|.
    bool bit(std::uint64_t i) const
    {
        auto idx = static_cast<unsigned>(i);
        return v_.sign() < 0 ? boost::multiprecision::bit_test(abs_backend(), idx)
                             : boost::multiprecision::bit_test(v_, idx);
    }
    /// Number of trailing zero bits of |x|; x must be nonzero.
    std::uint64_t trailing_zeros() const;
    /// Low 64 bits of |x|.
    std::uint64_t low_u64() const;

    BigInt abs() const { return BigInt(boost::multiprecision::abs(v_)); }
    const backend_type& backend() const { return v_; }

    BigInt operator-() const { return BigInt(backend_type(-v_)); }

    BigInt& operator+=(const BigInt& o) { v_ += o.v_; return *this; }
    BigInt& operator-=(const BigInt& o) { v_ -= o.v_; return *this; }
    BigInt& operator*=(const BigInt& o) { v_ *= o.v_; return *this; }
    BigInt& operator/=(const BigInt& o);
    BigInt& operator%=(const BigInt& o);
    // Shifts act on the magnitude and keep the sign (right shift truncates toward zero).
    BigInt& operator<<=(std::uint64_t n);
    BigInt& operator>>=(std::uint64_t n);

    friend BigInt operator+(BigInt a, const BigInt& b) { return a += b; }
    friend BigInt operator-(BigInt a, const BigInt& b) { return a -= b; }
    friend BigInt operator*(BigInt a, const BigInt& b) { return a *= b; }
    friend BigInt operator/(BigInt a, const BigInt& b) { return a /= b; }
    friend BigInt operator%(BigInt a, const BigInt& b) { return a %= b; }
    friend BigInt operator<<(BigInt a, std::uint64_t n) { return a <<= n; }
    friend BigInt operator>>(BigInt a, std::uint64_t n) { return a >>= n; }

    friend bool operator==(const BigInt& a, const BigInt& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b)
    {
        int c = a.v_.compare(b.v_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const BigInt& x);

private:
    backend_type abs_backend() const { return v_.sign() < 0 ? backend_type(-v_) : v_; }

    backend_type v_;
};

/// Truncating quotient and remainder. Throws std::invalid_argument on zero divisor.
std::pair<BigInt, BigInt> divmod(const BigInt& a, const BigInt& b);
/// Non-negative greatest common divisor; gcd(0, 0) = 0.
BigInt gcd(const BigInt& a, const BigInt& b);
/// Non-negative least common multiple; lcm(x, 0) = 0.
BigInt lcm(const BigInt& a, const BigInt& b);
BigInt pow(const BigInt& base, std::uint64_t exp);

/// Binomial coefficient C(n, k); zero when k < 0 or k > n.
BigInt binomial(const BigInt& n, const BigInt& k);

/// Exact rational number, always normalized: gcd(|num|, den) = 1 and den > 0.
class BigRational {
public:
    BigRational() : num_(0), den_(1) {}
    BigRational(int v) : num_(v), den_(1) {}
    BigRational(long long v) : num_(v), den_(1) {}
    BigRational(BigInt v) : num_(std::move(v)), den_(1) {}
    /// Throws std::invalid_argument when den == 0.
    BigRational(BigInt num, BigInt den);

    /// Accepts "p/q", integers, and decimals with an optional exponent
    /// ("-12.5e-3"). The conversion is exact.
    static BigRational parse(std::string_view text);
    /// Exact value of a finite binary64; throws std::invalid_argument on NaN/Inf.
    static BigRational from_double(double v);
    static BigRational from_long_double(long double v);
    /// m * 2^exp.
    static BigRational dyadic(const BigInt& m, std::int64_t exp);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_negative() const { return num_.is_negative(); }
    bool is_integer() const { return den_ == BigInt(1); }
    int sign() const { return num_.sign(); }

    BigRational abs() const { return BigRational(num_.abs(), den_, Normalized{}); }
    BigRational reciprocal() const;

    /// floor(log2 |x|) for nonzero x.
    std::int64_t floor_log2() const;
    BigInt floor() const;

    /// Round to nearest binary64, ties to even; overflow gives +-inf.
    double to_double() const;
    long double to_long_double() const;

    /// "p/q", or "p" when the denominator is 1.
    std::string to_string() const;
    /// Correctly rounded decimal with `digits` significant digits in the style
    /// of printf's %g, except that the exponent is not zero-padded ("3.55393e-6").
    std::string to_general(int digits) const;
    /// Exact decimal expansion ("-0.0125"); nullopt when it does not terminate.
    std::optional<std::string> to_decimal_exact() const;

    BigRational operator-() const { return BigRational(-num_, den_, Normalized{}); }
    BigRational& operator+=(const BigRational& o);
    BigRational& operator-=(const BigRational& o);
    BigRational& operator*=(const BigRational& o);
    BigRational& operator/=(const BigRational& o);

    friend BigRational operator+(BigRational a, const BigRational& b) { return a += b; }
    friend BigRational operator-(BigRational a, const BigRational& b) { return a -= b; }
    friend BigRational operator*(BigRational a, const BigRational& b) { return a *= b; }
    friend BigRational operator/(BigRational a, const BigRational& b) { return a /= b; }

    friend bool operator==(const BigRational& a, const BigRational& b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const BigRational& a, const BigRational& b);

    friend std::ostream& operator<<(std::ostream& os, const BigRational& x);

private:
    struct Normalized {};
    BigRational(BigInt num, BigInt den, Normalized) : num_(std::move(num)), den_(std::move(den)) {}
    void normalize();

    BigInt num_;
    BigInt den_;
};

/// Result of rounding a nonzero rational to a binary significand of fixed width.
struct BinaryRounding {
    bool negative = false;
    std::uint64_t mantissa = 0;  ///< value = mantissa * 2^exponent
    std::int64_t exponent = 0;
    bool exact = true;
};

/// Rounds x to `precision` significant bits (<= 64), ties to even, with the
/// least significant bit never below 2^min_lsb_exponent (gradual underflow).
BinaryRounding round_to_binary(const BigRational& x, int precision, std::int64_t min_lsb_exponent);

}  // namespace positlab
