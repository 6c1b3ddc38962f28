#include "positlab/exactnum.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace positlab {

namespace mp = boost::multiprecision;

// ---------------------------------------------------------------- BigInt

BigInt BigInt::parse(std::string_view text)
{
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    if (i == text.size()) {
        throw std::invalid_argument("BigInt::parse: no digits in '" + std::string(text) + "'");
    }
    backend_type v = 0;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("BigInt::parse: bad digit in '" + std::string(text) + "'");
        }
        v *= 10;
        v += c - '0';
    }
    if (neg) {
        v = -v;
    }
    return BigInt(std::move(v));
}

BigInt BigInt::pow2(std::uint64_t exp)
{
    backend_type v = 0;
    mp::bit_set(v, static_cast<unsigned>(exp));
    return BigInt(std::move(v));
}

std::string BigInt::to_string() const { return v_.str(); }

std::uint64_t BigInt::bit_length() const
{
    if (v_.is_zero()) {
        return 0;
    }
    return mp::msb(abs_backend()) + 1;
}

std::uint64_t BigInt::trailing_zeros() const
{
    if (v_.is_zero()) {
        throw std::invalid_argument("BigInt::trailing_zeros of zero");
    }
    return mp::lsb(abs_backend());
}

std::uint64_t BigInt::low_u64() const
{
    if (v_.sign() < 0) {
        return static_cast<std::uint64_t>(abs_backend() & backend_type(std::numeric_limits<std::uint64_t>::max()));
    }
    return static_cast<std::uint64_t>(v_ & backend_type(std::numeric_limits<std::uint64_t>::max()));
}

BigInt& BigInt::operator/=(const BigInt& o)
{
    if (o.is_zero()) {
        throw std::invalid_argument("BigInt: division by zero");
    }
    v_ /= o.v_;
    return *this;
}

BigInt& BigInt::operator%=(const BigInt& o)
{
    if (o.is_zero()) {
        throw std::invalid_argument("BigInt: division by zero");
    }
    v_ %= o.v_;
    return *this;
}

BigInt& BigInt::operator<<=(std::uint64_t n)
{
    bool neg = v_.sign() < 0;
    backend_type m = abs_backend();
    m <<= static_cast<unsigned>(n);
    v_ = neg ? backend_type(-m) : m;
    return *this;
}

BigInt& BigInt::operator>>=(std::uint64_t n)
{
    bool neg = v_.sign() < 0;
    backend_type m = abs_backend();
    if (n >= mp::msb(m == 0 ? backend_type(1) : m) + 1) {
        m = 0;
    } else {
        m >>= static_cast<unsigned>(n);
    }
    v_ = (neg && m != 0) ? backend_type(-m) : m;
    return *this;
}

std::ostream& operator<<(std::ostream& os, const BigInt& x) { return os << x.to_string(); }

std::pair<BigInt, BigInt> divmod(const BigInt& a, const BigInt& b)
{
    if (b.is_zero()) {
        throw std::invalid_argument("divmod: division by zero");
    }
    BigInt::backend_type q, r;
    mp::divide_qr(a.backend(), b.backend(), q, r);
    return {BigInt(std::move(q)), BigInt(std::move(r))};
}

BigInt gcd(const BigInt& a, const BigInt& b)
{
    return BigInt(BigInt::backend_type(mp::gcd(a.abs().backend(), b.abs().backend())));
}

BigInt lcm(const BigInt& a, const BigInt& b)
{
    if (a.is_zero() || b.is_zero()) {
        return BigInt(0);
    }
    return (a.abs() / gcd(a, b)) * b.abs();
}

BigInt pow(const BigInt& base, std::uint64_t exp)
{
    return BigInt(BigInt::backend_type(mp::pow(base.backend(), static_cast<unsigned>(exp))));
}

BigInt binomial(const BigInt& n, const BigInt& k)
{
    if (k.is_negative() || k > n || n.is_negative()) {
        return BigInt(0);
    }
    BigInt kk = std::min(k, n - k);
    if (kk.bit_length() > 40) {
        throw std::invalid_argument("binomial: k too large");
    }
    std::uint64_t steps = kk.low_u64();
    BigInt base = n - kk;
    BigInt result(1);
    for (std::uint64_t i = 1; i <= steps; ++i) {
        result *= base + BigInt(i);
        result /= BigInt(i);  // exact: result is C(base + i, i)
    }
    return result;
}

// ----------------------------------------------------------- BigRational

BigRational::BigRational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den))
{
    if (den_.is_zero()) {
        throw std::invalid_argument("BigRational: zero denominator");
    }
    normalize();
}

void BigRational::normalize()
{
    if (den_.is_negative()) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    if (den_ == BigInt(1)) {
        return;
    }
    BigInt g = gcd(num_, den_);
    if (g != BigInt(1)) {
        num_ /= g;
        den_ /= g;
    }
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

BigInt ten_to(std::uint64_t n) { return pow(BigInt(10), n); }

}  // namespace

BigRational BigRational::parse(std::string_view text)
{
    std::string_view s = trim(text);
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        return BigRational(BigInt::parse(trim(s.substr(0, slash))), BigInt::parse(trim(s.substr(slash + 1))));
    }
    auto fail = [&] {
        throw std::invalid_argument("BigRational::parse: malformed number '" + std::string(text) + "'");
    };
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    std::int64_t frac_digits = 0;
    bool seen_point = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_point) {
                ++frac_digits;
            }
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (digits.empty()) {
        fail();
    }
    std::int64_t exp10 = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') {
            fail();
        }
        ++i;
        std::string_view e = s.substr(i);
        if (e.empty()) {
            fail();
        }
        BigInt ev = BigInt::parse(e);
        if (ev.bit_length() > 24) {
            throw std::invalid_argument("BigRational::parse: exponent out of range in '" + std::string(text) + "'");
        }
        exp10 = ev.is_negative() ? -static_cast<std::int64_t>(ev.low_u64()) : static_cast<std::int64_t>(ev.low_u64());
    }
    BigInt mant = BigInt::parse(digits);
    if (neg) {
        mant = -mant;
    }
    std::int64_t scale = exp10 - frac_digits;
    if (scale >= 0) {
        return BigRational(mant * ten_to(static_cast<std::uint64_t>(scale)));
    }
    return BigRational(mant, ten_to(static_cast<std::uint64_t>(-scale)));
}

BigRational BigRational::dyadic(const BigInt& m, std::int64_t exp)
{
    if (m.is_zero()) {
        return BigRational();
    }
    if (exp >= 0) {
        return BigRational(m << static_cast<std::uint64_t>(exp), BigInt(1), Normalized{});
    }
    std::uint64_t down = static_cast<std::uint64_t>(-exp);
    std::uint64_t tz = std::min<std::uint64_t>(m.trailing_zeros(), down);
    return BigRational(m >> tz, BigInt::pow2(down - tz), Normalized{});
}

BigRational BigRational::from_double(double v)
{
    if (!std::isfinite(v)) {
        throw std::invalid_argument("BigRational::from_double: non-finite value");
    }
    if (v == 0.0) {
        return BigRational();
    }
    int e = 0;
    double m = std::frexp(v, &e);
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    return dyadic(BigInt(static_cast<long long>(mant)), static_cast<std::int64_t>(e) - 53);
}

BigRational BigRational::from_long_double(long double v)
{
    if (!std::isfinite(v)) {
        throw std::invalid_argument("BigRational::from_long_double: non-finite value");
    }
    if (v == 0.0L) {
        return BigRational();
    }
    constexpr int digits = std::numeric_limits<long double>::digits;
    static_assert(digits <= 64, "long double significand wider than 64 bits");
    int e = 0;
    long double m = std::frexp(std::fabs(v), &e);
    auto mant = static_cast<unsigned long long>(std::ldexp(m, digits));
    BigInt bm(mant);
    if (v < 0) {
        bm = -bm;
    }
    return dyadic(bm, static_cast<std::int64_t>(e) - digits);
}

BigRational BigRational::reciprocal() const
{
    if (num_.is_zero()) {
        throw std::invalid_argument("BigRational: reciprocal of zero");
    }
    if (num_.is_negative()) {
        return BigRational(-den_, -num_, Normalized{});
    }
    return BigRational(den_, num_, Normalized{});
}

std::int64_t BigRational::floor_log2() const
{
    if (num_.is_zero()) {
        throw std::invalid_argument("BigRational::floor_log2 of zero");
    }
    BigInt a = num_.abs();
    auto e = static_cast<std::int64_t>(a.bit_length()) - static_cast<std::int64_t>(den_.bit_length());
    bool below = e >= 0 ? (a < (den_ << static_cast<std::uint64_t>(e)))
                        : ((a << static_cast<std::uint64_t>(-e)) < den_);
    return below ? e - 1 : e;
}

BigInt BigRational::floor() const
{
    auto [q, r] = divmod(num_, den_);
    if (r.is_negative()) {
        q -= BigInt(1);
    }
    return q;
}

BinaryRounding round_to_binary(const BigRational& x, int precision, std::int64_t min_lsb_exponent)
{
    if (x.is_zero()) {
        throw std::invalid_argument("round_to_binary: zero");
    }
    if (precision < 1 || precision > 64) {
        throw std::invalid_argument("round_to_binary: precision out of range");
    }
    BinaryRounding out;
    out.negative = x.is_negative();
    BigInt a = x.num().abs();
    const BigInt& b = x.den();
    std::int64_t lsb = std::max<std::int64_t>(x.floor_log2() - (precision - 1), min_lsb_exponent);
    // q2 = floor(|x| * 2^(1 - lsb)) keeps one guard bit below the target lsb.
    std::int64_t up = 1 - lsb;
    BigInt n = up >= 0 ? (a << static_cast<std::uint64_t>(up)) : a;
    BigInt d = up >= 0 ? b : (b << static_cast<std::uint64_t>(-up));
    auto [q2, rem] = divmod(n, d);
    bool guard = q2.is_odd();
    bool sticky = !rem.is_zero();
    BigInt m = q2 >> 1;
    if (guard && (sticky || m.is_odd())) {
        m += BigInt(1);
    }
    if (m.bit_length() > static_cast<std::uint64_t>(precision)) {
        m >>= 1;
        ++lsb;
    }
    out.mantissa = m.low_u64();
    out.exponent = lsb;
    out.exact = !guard && !sticky;
    return out;
}

namespace {

template <typename F>
F to_binary_float(const BigRational& x)
{
    if (x.is_zero()) {
        return F(0);
    }
    constexpr int digits = std::numeric_limits<F>::digits;
    constexpr std::int64_t min_lsb = std::numeric_limits<F>::min_exponent - digits;
    BinaryRounding r = round_to_binary(x, digits, min_lsb);
    std::int64_t e = std::clamp<std::int64_t>(r.exponent, -100000, 100000);
    F v = std::ldexp(static_cast<F>(r.mantissa), static_cast<int>(e));
    return r.negative ? -v : v;
}

}  // namespace

double BigRational::to_double() const { return to_binary_float<double>(*this); }

long double BigRational::to_long_double() const { return to_binary_float<long double>(*this); }

std::string BigRational::to_string() const
{
    if (den_ == BigInt(1)) {
        return num_.to_string();
    }
    return num_.to_string() + "/" + den_.to_string();
}

namespace {

// round(num / den) with ties to even; den > 0, num >= 0
BigInt round_half_even(const BigInt& num, const BigInt& den)
{
    auto [q, r] = divmod(num, den);
    BigInt twice = r << 1;
    if (twice > den || (twice == den && q.is_odd())) {
        q += BigInt(1);
    }
    return q;
}

}  // namespace

std::string BigRational::to_general(int digits) const
{
    if (digits < 1) {
        throw std::invalid_argument("to_general: digits must be positive");
    }
    if (is_zero()) {
        return "0";
    }
    const BigRational x = abs();
    // decimal exponent estimate from the binary one, then correct
    std::int64_t e10 = static_cast<std::int64_t>(std::floor(static_cast<double>(x.floor_log2()) * 0.30102999566398120));
    auto scaled = [&](std::int64_t e) {
        BigRational t = x;
        std::int64_t shift = digits - 1 - e;
        if (shift >= 0) {
            t *= BigRational(ten_to(static_cast<std::uint64_t>(shift)));
        } else {
            t /= BigRational(ten_to(static_cast<std::uint64_t>(-shift)));
        }
        return t;
    };
    const BigInt lo = ten_to(static_cast<std::uint64_t>(digits - 1));
    const BigInt hi = ten_to(static_cast<std::uint64_t>(digits));
    for (;;) {
        BigRational t = scaled(e10);
        if (t < BigRational(lo)) {
            --e10;
            continue;
        }
        if (t >= BigRational(hi)) {
            ++e10;
            continue;
        }
        break;
    }
    BigInt n = round_half_even(scaled(e10).num(), scaled(e10).den());
    if (n == hi) {
        n = lo;
        ++e10;
    }
    std::string ds = n.to_string();
    std::string out = is_negative() ? "-" : "";
    if (e10 < -4 || e10 >= digits) {
        std::string mant = ds.substr(0, 1);
        std::string rest = ds.substr(1);
        while (!rest.empty() && rest.back() == '0') {
            rest.pop_back();
        }
        if (!rest.empty()) {
            mant += "." + rest;
        }
        return out + mant + "e" + std::to_string(e10);
    }
    std::string body;
    if (e10 >= 0) {
        body = ds.substr(0, e10 + 1);
        std::string rest = ds.substr(e10 + 1);
        while (!rest.empty() && rest.back() == '0') {
            rest.pop_back();
        }
        if (!rest.empty()) {
            body += "." + rest;
        }
    } else {
        std::string rest = std::string(static_cast<std::size_t>(-e10 - 1), '0') + ds;
        while (!rest.empty() && rest.back() == '0') {
            rest.pop_back();
        }
        body = "0." + rest;
    }
    return out + body;
}

std::optional<std::string> BigRational::to_decimal_exact() const
{
    BigInt d = den_;
    std::int64_t twos = 0;
    std::int64_t fives = 0;
    while (!d.is_odd()) {
        d >>= 1;
        ++twos;
    }
    while (true) {
        auto [q, r] = divmod(d, BigInt(5));
        if (!r.is_zero()) {
            break;
        }
        d = q;
        ++fives;
    }
    if (d != BigInt(1)) {
        return std::nullopt;
    }
    const std::int64_t places = std::max(twos, fives);
    BigInt scaled = (num_ * ten_to(static_cast<std::uint64_t>(places))) / den_;
    std::string digits = scaled.abs().to_string();
    std::string out = is_negative() ? "-" : "";
    if (places == 0) {
        return out + digits;
    }
    if (static_cast<std::int64_t>(digits.size()) <= places) {
        digits = std::string(static_cast<std::size_t>(places) - digits.size() + 1, '0') + digits;
    }
    std::size_t point = digits.size() - static_cast<std::size_t>(places);
    return out + digits.substr(0, point) + "." + digits.substr(point);
}

BigRational& BigRational::operator+=(const BigRational& o)
{
    if (den_ == o.den_) {
        num_ += o.num_;
    } else {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ *= o.den_;
    }
    normalize();
    return *this;
}

BigRational& BigRational::operator-=(const BigRational& o)
{
    if (den_ == o.den_) {
        num_ -= o.num_;
    } else {
        num_ = num_ * o.den_ - o.num_ * den_;
        den_ *= o.den_;
    }
    normalize();
    return *this;
}

BigRational& BigRational::operator*=(const BigRational& o)
{
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
}

BigRational& BigRational::operator/=(const BigRational& o)
{
    if (o.num_.is_zero()) {
        throw std::invalid_argument("BigRational: division by zero");
    }
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
}

std::strong_ordering operator<=>(const BigRational& a, const BigRational& b)
{
    if (a.den_ == b.den_) {
        return a.num_ <=> b.num_;
    }
    return (a.num_ * b.den_) <=> (b.num_ * a.den_);
}

std::ostream& operator<<(std::ostream& os, const BigRational& x) { return os << x.to_string(); }

}  // namespace positlab
