#pragma once

// Scalar policies for the generic linear algebra and experiment code.
//
// Each policy owns the arithmetic of one number system and exposes the same
// members: value_type, name, zero, one, from_rational, to_rational, to_double,
// add, sub, mul, div, neg, less, is_zero, is_nan, format, and the constant
// has_fused. Policies with has_fused = true also provide accumulator().

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "positlab/exactnum.hpp"
#include "positlab/positarith.hpp"
#include "positlab/quire.hpp"

namespace positlab {

template <typename F>
struct HostFloatArith {
    using value_type = F;
    static constexpr bool has_fused = false;

    std::string name() const { return sizeof(F) == 8 ? "f64" : "f32"; }
    F zero() const { return F(0); }
    F one() const { return F(1); }
    F from_rational(const BigRational& x) const
    {
        if constexpr (sizeof(F) == 8) {
            return x.to_double();
        } else {
            // single rounding straight to binary32 (no double intermediate)
            if (x.is_zero()) {
                return F(0);
            }
            BinaryRounding r = round_to_binary(x, 24, -149);
            auto e = static_cast<int>(std::clamp<std::int64_t>(r.exponent, -400, 400));
            auto v = static_cast<F>(std::ldexp(static_cast<long double>(r.mantissa), e));
            return r.negative ? -v : v;
        }
    }
    BigRational to_rational(F v) const { return BigRational::from_double(static_cast<double>(v)); }
    double to_double(F v) const { return static_cast<double>(v); }
    /// to_double(a - b) without the intermediate rounding of a - b in F.
    double difference(F a, F b) const
    {
        return static_cast<double>(static_cast<long double>(a) - static_cast<long double>(b));
    }
    F add(F a, F b) const { return a + b; }
    F sub(F a, F b) const { return a - b; }
    F mul(F a, F b) const { return a * b; }
    F div(F a, F b) const { return a / b; }
    F neg(F a) const { return -a; }
    bool less(F a, F b) const { return a < b; }
    bool is_zero(F a) const { return a == F(0); }
    bool is_nan(F a) const { return !std::isfinite(a); }
    std::string format(F v) const
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.*g", sizeof(F) == 8 ? 17 : 9, static_cast<double>(v));
        return buf;
    }
};

using Float64Arith = HostFloatArith<double>;
using Float32Arith = HostFloatArith<float>;

struct PositArith {
    using value_type = PositPattern;
    static constexpr bool has_fused = true;

    PositConfig config;

    explicit PositArith(PositConfig c) : config(c) {}

    std::string name() const { return config.to_string(); }
    PositPattern zero() const { return PositPattern::zero(config); }
    PositPattern one() const { return encode(config, BigRational(1)); }
    PositPattern from_rational(const BigRational& x) const { return encode(config, x); }
    /// Throws std::domain_error for NaR.
    BigRational to_rational(const PositPattern& v) const
    {
        auto r = value_of(v);
        if (!r) {
            throw std::domain_error("NaR has no rational value");
        }
        return *r;
    }
    double to_double(const PositPattern& v) const { return to_host_float(v).value; }
    double difference(const PositPattern& a, const PositPattern& b) const
    {
        if (a.is_nar() || b.is_nar()) {
            return std::nan("");
        }
        return (*value_of(a) - *value_of(b)).to_double();
    }
    PositPattern add(const PositPattern& a, const PositPattern& b) const { return auto_add(a, b).pattern; }
    PositPattern sub(const PositPattern& a, const PositPattern& b) const { return auto_sub(a, b).pattern; }
    PositPattern mul(const PositPattern& a, const PositPattern& b) const { return auto_mul(a, b).pattern; }
    PositPattern div(const PositPattern& a, const PositPattern& b) const { return auto_div(a, b).pattern; }
    PositPattern neg(const PositPattern& a) const { return negate(a); }
    bool less(const PositPattern& a, const PositPattern& b) const
    {
        return compare(a, b) == std::strong_ordering::less;
    }
    bool is_zero(const PositPattern& a) const { return a.is_zero(); }
    bool is_nan(const PositPattern& a) const { return a.is_nar(); }
    /// Exact decimal expansion of the value (posit values are dyadic).
    std::string format(const PositPattern& v) const
    {
        auto r = value_of(v);
        return r ? *r->to_decimal_exact() : "NaN";
    }
    Quire accumulator() const { return Quire(config); }
};

struct RationalArith {
    using value_type = BigRational;
    static constexpr bool has_fused = false;

    std::string name() const { return "rational"; }
    BigRational zero() const { return BigRational(0); }
    BigRational one() const { return BigRational(1); }
    BigRational from_rational(const BigRational& x) const { return x; }
    BigRational to_rational(const BigRational& v) const { return v; }
    double to_double(const BigRational& v) const { return v.to_double(); }
    double difference(const BigRational& a, const BigRational& b) const { return (a - b).to_double(); }
    BigRational add(const BigRational& a, const BigRational& b) const { return a + b; }
    BigRational sub(const BigRational& a, const BigRational& b) const { return a - b; }
    BigRational mul(const BigRational& a, const BigRational& b) const { return a * b; }
    BigRational div(const BigRational& a, const BigRational& b) const { return a / b; }
    BigRational neg(const BigRational& a) const { return -a; }
    bool less(const BigRational& a, const BigRational& b) const { return a < b; }
    bool is_zero(const BigRational& a) const { return a.is_zero(); }
    bool is_nan(const BigRational&) const { return false; }
    /// Exact decimal when it terminates, otherwise "p/q".
    std::string format(const BigRational& v) const
    {
        auto d = v.to_decimal_exact();
        return d ? *d : v.to_string();
    }
};

using AnyArith = std::variant<Float64Arith, Float32Arith, PositArith, RationalArith>;

/// Scalar names: "f64" ("double"), "f32" ("float"), "rational",
/// "positN_E" or "posit<N,E>". Throws std::invalid_argument otherwise.
AnyArith parse_arith(std::string_view name);

/// Short scalar name as accepted by parse_arith ("posit32_2", "f64", ...).
std::string arith_id(const AnyArith& a);

}  // namespace positlab
