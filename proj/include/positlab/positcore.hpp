#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "positlab/exactnum.hpp"

namespace positlab {

/// Posit format descriptor: total bits and maximum exponent-field width.
///
/// nbits and es are independent; es >= nbits is a legal configuration
/// (the exponent field is then always truncated).
struct PositConfig {
    static constexpr unsigned kMaxNbits = 256;
    static constexpr unsigned kMaxEs = 16;

    unsigned nbits = 8;
    unsigned es = 0;

    constexpr PositConfig() = default;
    /// Throws std::invalid_argument when nbits is outside [2, 256] or es > 16.
    PositConfig(unsigned nbits_, unsigned es_);

    /// "posit<16,3>"
    std::string to_string() const;
    /// Parses "N,E" (as taken on the command line).
    static PositConfig parse(std::string_view text);

    /// 2^es, the exponent-field radix of the regime.
    std::uint64_t regime_step() const { return std::uint64_t{1} << es; }
    /// Scale of maxpos: (nbits - 2) * 2^es.
    std::int64_t max_scale() const { return static_cast<std::int64_t>(nbits - 2) << es; }

    friend bool operator==(const PositConfig&, const PositConfig&) = default;
    friend auto operator<=>(const PositConfig&, const PositConfig&) = default;
};

/// Fixed 256-bit unsigned container for raw patterns. Patterns of up to 64
/// bits occupy limb 0 only.
class PatternWord {
public:
    static constexpr unsigned kLimbs = 4;
    static constexpr unsigned kBits = 64 * kLimbs;

    constexpr PatternWord() = default;
    constexpr explicit PatternWord(std::uint64_t v) : limbs_{v, 0, 0, 0} {}

    constexpr std::uint64_t limb(unsigned i) const { return limbs_[i]; }
    constexpr std::uint64_t& limb(unsigned i) { return limbs_[i]; }
    constexpr std::uint64_t low64() const { return limbs_[0]; }

    constexpr bool bit(unsigned i) const { return (limbs_[i / 64] >> (i % 64)) & 1U; }
    constexpr void set_bit(unsigned i, bool v)
    {
        std::uint64_t m = std::uint64_t{1} << (i % 64);
        limbs_[i / 64] = v ? (limbs_[i / 64] | m) : (limbs_[i / 64] & ~m);
    }

    constexpr bool is_zero() const { return (limbs_[0] | limbs_[1] | limbs_[2] | limbs_[3]) == 0; }

    /// Bits at index >= n cleared.
    constexpr PatternWord masked(unsigned n) const
    {
        PatternWord r = *this;
        for (unsigned i = 0; i < kLimbs; ++i) {
            unsigned lo = 64 * i;
            if (n <= lo) {
                r.limbs_[i] = 0;
            } else if (n < lo + 64) {
                r.limbs_[i] &= (std::uint64_t{1} << (n - lo)) - 1;
            }
        }
        return r;
    }

    /// Two's complement negation modulo 2^n.
    constexpr PatternWord negated(unsigned n) const
    {
        PatternWord r;
        std::uint64_t carry = 1;
        for (unsigned i = 0; i < kLimbs; ++i) {
            std::uint64_t v = ~limbs_[i];
            r.limbs_[i] = v + carry;
            carry = (carry != 0 && r.limbs_[i] == 0) ? 1 : 0;
        }
        return r.masked(n);
    }

    constexpr PatternWord shifted_left(unsigned s) const
    {
        PatternWord r;
        unsigned limb_shift = s / 64;
        unsigned bit_shift = s % 64;
        for (int i = kLimbs - 1; i >= 0; --i) {
            int src = i - static_cast<int>(limb_shift);
            if (src < 0) {
                continue;
            }
            std::uint64_t v = limbs_[src] << bit_shift;
            if (bit_shift != 0 && src > 0) {
                v |= limbs_[src - 1] >> (64 - bit_shift);
            }
            r.limbs_[i] = v;
        }
        return r;
    }

    /// Adds 1, wrapping modulo 2^256.
    constexpr void increment()
    {
        for (unsigned i = 0; i < kLimbs; ++i) {
            if (++limbs_[i] != 0) {
                return;
            }
        }
    }

    BigInt to_bigint() const;
    /// Low 256 bits of a non-negative integer.
    static PatternWord from_bigint(const BigInt& v);

    friend constexpr bool operator==(const PatternWord&, const PatternWord&) = default;
    /// Unsigned comparison.
    friend constexpr std::strong_ordering operator<=>(const PatternWord& a, const PatternWord& b)
    {
        for (int i = kLimbs - 1; i >= 0; --i) {
            if (a.limbs_[i] != b.limbs_[i]) {
                return a.limbs_[i] < b.limbs_[i] ? std::strong_ordering::less : std::strong_ordering::greater;
            }
        }
        return std::strong_ordering::equal;
    }

private:
    std::array<std::uint64_t, kLimbs> limbs_{};
};

/// A raw nbits-wide posit bit pattern together with its configuration.
class PositPattern {
public:
    PositPattern() = default;
    /// Throws std::invalid_argument when bits has any bit at index >= nbits set.
    PositPattern(PositConfig config, PatternWord bits);
    static PositPattern from_bits(PositConfig config, std::uint64_t bits) { return {config, PatternWord(bits)}; }

    static PositPattern zero(PositConfig config) { return {config, PatternWord()}; }
    static PositPattern nar(PositConfig config);
    static PositPattern minpos(PositConfig config) { return {config, PatternWord(1)}; }
    static PositPattern maxpos(PositConfig config);

    /// Parses "0x..." (hex) or "0b..." (binary) for the given config.
    static PositPattern parse(PositConfig config, std::string_view text);

    const PositConfig& config() const { return config_; }
    const PatternWord& bits() const { return bits_; }
    std::uint64_t low64() const { return bits_.low64(); }

    bool is_zero() const { return bits_.is_zero(); }
    bool is_nar() const;
    bool sign_bit() const { return bits_.bit(config_.nbits - 1); }

    /// Zero-padded upper-case hex, e.g. "0x0DDD".
    std::string hex() const;
    /// Canonical text form, e.g. "0x0DDD:posit<16,3>".
    std::string to_string() const;

    friend bool operator==(const PositPattern&, const PositPattern&) = default;

private:
    PositConfig config_;
    PatternWord bits_;
};

/// Exact unpacked value: (-1)^negative * 2^scale * significand / 2^fraction_bits,
/// with 2^fraction_bits <= significand < 2^(fraction_bits + 1).
struct ValueTriple {
    bool negative = false;
    std::int64_t scale = 0;
    BigInt significand{1};
    std::uint64_t fraction_bits = 0;

    BigRational to_rational() const;
};

struct Decoded {
    enum class Kind { Zero, NaR, Finite };

    Kind kind = Kind::Zero;
    ValueTriple triple;  ///< meaningful only for Finite

    bool is_zero() const { return kind == Kind::Zero; }
    bool is_nar() const { return kind == Kind::NaR; }
    bool is_finite() const { return kind == Kind::Finite; }
    /// Exact value; nullopt for NaR.
    std::optional<BigRational> value() const;
};

/// Field breakdown of a pattern. For negative patterns the fields are those
/// of the two's complement magnitude.
struct PositFields {
    bool sign = false;
    std::string regime;    ///< regime run plus terminator (if present)
    std::string exponent;  ///< exponent bits actually present (may be truncated)
    std::string fraction;
    std::int64_t k = 0;
    BigInt e;              ///< exponent value, missing low bits taken as zero
    BigInt fraction_value;
    unsigned fraction_bits = 0;

    /// "s:0 r:0001 e:101 f:11011101"
    std::string to_string() const;
};

Decoded decode(const PositPattern& p);
/// Field breakdown of a finite nonzero pattern; throws std::invalid_argument for zero/NaR.
PositFields decode_fields(const PositPattern& p);
/// Exact value of p; nullopt for NaR.
std::optional<BigRational> value_of(const PositPattern& p);

/// Exact input to the rounding step: (-1)^negative * significand * 2^lsb_exponent,
/// with `sticky` marking a nonzero tail strictly below the last significand bit.
/// When sticky is set, the significand must carry at least nbits + 2 bits.
struct RoundingInput {
    bool negative = false;
    BigInt significand;
    std::int64_t lsb_exponent = 0;
    bool sticky = false;
};

struct EncodeResult {
    PositPattern pattern;
    bool exact = true;
};

/// Rounds to nearest, ties to the even pattern; nonzero values saturate at
/// minpos/maxpos instead of rounding to zero or NaR.
EncodeResult encode_rounded(PositConfig config, const RoundingInput& in);
PositPattern encode(PositConfig config, const BigRational& value);
PositPattern encode(PositConfig config, const ValueTriple& value);
/// Rational-to-rounding-input conversion with nbits + 4 significant bits plus sticky.
RoundingInput rounding_input(PositConfig config, const BigRational& value);

struct ConfigExtrema {
    BigInt useed;
    BigRational minpos;
    BigRational maxpos;
    /// maxpos / minpos = useed^dynamic_range_exponent
    std::int64_t dynamic_range_exponent = 0;
    /// log2 of useed (= 2^es)
    std::uint64_t useed_log2 = 0;
};

ConfigExtrema config_extrema(PositConfig config);

PositPattern negate(const PositPattern& p);
PositPattern abs(const PositPattern& p);
/// Same value in posit<nbits + 1, es>.
PositPattern embed(const PositPattern& p);

struct HostConversion {
    double value = 0.0;
    bool exact = true;
};

/// Nearest binary64 to the exact posit value; NaR maps to quiet NaN (inexact).
HostConversion to_host_float(const PositPattern& p);
/// Exact binary64 value rounded once to the config; NaN and +-Inf map to NaR.
PositPattern from_host_float(PositConfig config, double v);

}  // namespace positlab
