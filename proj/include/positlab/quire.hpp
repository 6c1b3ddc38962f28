#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "positlab/positcore.hpp"

namespace positlab {

/// Kulisch-style accumulator for one posit configuration.
///
/// The register is a two's complement fixed-point integer of
/// width() = 4 * 2^es * (nbits - 2) + 31 bits whose binary point sits
/// frac_bits() = 2 * 2^es * (nbits - 2) places from the bottom, so every
/// product of two posits lands on it exactly. Products and sums are added
/// without rounding; extract() rounds once.
///
/// NaR is sticky. Leaving the W-bit range throws std::overflow_error.
class Quire {
public:
    static constexpr unsigned kGuardBits = 30;

    explicit Quire(PositConfig config);

    static std::uint64_t width(PositConfig config);
    static std::uint64_t frac_bits(PositConfig config);

    PositConfig config() const { return config_; }
    std::uint64_t width() const { return width(config_); }
    bool is_nar() const { return nar_; }
    bool is_zero() const;

    /// q += a * b, exactly.
    Quire& add_product(const PositPattern& a, const PositPattern& b);
    /// q -= a * b, exactly.
    Quire& sub_product(const PositPattern& a, const PositPattern& b);
    /// q += a, exactly.
    Quire& add(const PositPattern& a);
    /// Exact merge of another accumulator of the same config.
    Quire& operator+=(const Quire& other);

    void clear();

    /// Register value rounded once; NaR when poisoned.
    PositPattern extract() const;
    /// Exact register value; nullopt when poisoned.
    std::optional<BigRational> value() const;

    /// Raw register limbs, least significant first (for bit-identity checks).
    const std::vector<std::uint64_t>& limbs() const { return limbs_; }

    friend bool operator==(const Quire&, const Quire&) = default;

private:
    void require_config(const PositPattern& p) const;
    void accumulate(bool negative, std::span<const std::uint64_t> magnitude, std::uint64_t position);
    void check_range();
    BigInt magnitude() const;
    bool register_negative() const { return (limbs_.back() >> 63) != 0; }

    PositConfig config_;
    std::uint64_t frac_bits_;
    std::uint64_t width_;
    bool nar_ = false;
    std::vector<std::uint64_t> limbs_;
};

/// Fused dot product: exact sum of xs[i] * ys[i], rounded once.
/// Throws std::invalid_argument on length or config mismatch.
PositPattern fdp(PositConfig config, std::span<const PositPattern> xs, std::span<const PositPattern> ys);

}  // namespace positlab
