#include "positlab/quire.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <string>

namespace positlab {

namespace {

std::int64_t lsb_of(const ValueTriple& t) { return t.scale - static_cast<std::int64_t>(t.fraction_bits); }

std::vector<std::uint64_t> magnitude_words(const BigInt& v)
{
    std::vector<std::uint64_t> out;
    boost::multiprecision::export_bits(v.abs().backend(), std::back_inserter(out), 64, false);
    return out;
}

}  // namespace

std::uint64_t Quire::frac_bits(PositConfig config)
{
    return 2 * static_cast<std::uint64_t>(config.max_scale());
}

std::uint64_t Quire::width(PositConfig config) { return 2 * frac_bits(config) + kGuardBits + 1; }

Quire::Quire(PositConfig config)
    : config_(config), frac_bits_(frac_bits(config)), width_(width(config)), limbs_((width_ + 63) / 64 + 1, 0)
{
}

void Quire::require_config(const PositPattern& p) const
{
    if (p.config() != config_) {
        throw std::invalid_argument("quire for " + config_.to_string() + " given a " + p.config().to_string() +
                                    " operand");
    }
}

bool Quire::is_zero() const
{
    if (nar_) {
        return false;
    }
    for (std::uint64_t l : limbs_) {
        if (l != 0) {
            return false;
        }
    }
    return true;
}

void Quire::clear()
{
    nar_ = false;
    std::fill(limbs_.begin(), limbs_.end(), 0);
}

void Quire::accumulate(bool negative, std::span<const std::uint64_t> magnitude, std::uint64_t position)
{
    const std::size_t n = limbs_.size();
    std::size_t idx = position / 64;
    const unsigned off = position % 64;
    std::uint64_t carry = 0;  // carry (add) or borrow (sub)
    std::uint64_t spill = 0;
    std::size_t i = 0;
    for (; i <= magnitude.size() && idx < n; ++i, ++idx) {
        std::uint64_t w = i < magnitude.size() ? magnitude[i] : 0;
        std::uint64_t word = (w << off) | spill;
        spill = off == 0 ? 0 : (w >> (64 - off));
        if (!negative) {
            std::uint64_t s = limbs_[idx] + word;
            std::uint64_t c1 = s < word ? 1 : 0;
            std::uint64_t s2 = s + carry;
            std::uint64_t c2 = s2 < carry ? 1 : 0;
            limbs_[idx] = s2;
            carry = c1 | c2;
        } else {
            std::uint64_t cur = limbs_[idx];
            std::uint64_t d = cur - word;
            std::uint64_t b1 = cur < word ? 1 : 0;
            std::uint64_t d2 = d - carry;
            std::uint64_t b2 = d < carry ? 1 : 0;
            limbs_[idx] = d2;
            carry = b1 | b2;
        }
    }
    for (; carry != 0 && idx < n; ++idx) {
        if (!negative) {
            carry = ++limbs_[idx] == 0 ? 1 : 0;
        } else {
            carry = limbs_[idx]-- == 0 ? 1 : 0;
        }
    }
    check_range();
}

void Quire::check_range()
{
    // bits width_-1 .. top must all equal the sign bit
    const bool neg = register_negative();
    const std::uint64_t top_bits = 64 * limbs_.size();
    for (std::uint64_t b = width_ - 1; b < top_bits;) {
        std::size_t idx = b / 64;
        unsigned off = b % 64;
        std::uint64_t mask = ~std::uint64_t{0} << off;
        std::uint64_t want = neg ? mask : 0;
        if ((limbs_[idx] & mask) != want) {
            throw std::overflow_error("quire overflow for " + config_.to_string() + ": more than " +
                                      std::to_string(width_) + " register bits needed");
        }
        b = 64 * (idx + 1);
    }
}

Quire& Quire::add_product(const PositPattern& a, const PositPattern& b)
{
    require_config(a);
    require_config(b);
    if (nar_) {
        return *this;
    }
    Decoded da = decode(a);
    Decoded db = decode(b);
    if (da.is_nar() || db.is_nar()) {
        nar_ = true;
        return *this;
    }
    if (da.is_zero() || db.is_zero()) {
        return *this;
    }
    const bool negative = da.triple.negative != db.triple.negative;
    const std::int64_t pos = lsb_of(da.triple) + lsb_of(db.triple) + static_cast<std::int64_t>(frac_bits_);
    if (pos < 0) {
        throw std::logic_error("product below the quire's least significant bit");
    }
    if (da.triple.fraction_bits < 64 && db.triple.fraction_bits < 64) {
        using u128 = unsigned __int128;
        u128 p = static_cast<u128>(da.triple.significand.low_u64()) * db.triple.significand.low_u64();
        std::uint64_t words[2] = {static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(p >> 64)};
        accumulate(negative, words, static_cast<std::uint64_t>(pos));
    } else {
        auto words = magnitude_words(da.triple.significand * db.triple.significand);
        accumulate(negative, words, static_cast<std::uint64_t>(pos));
    }
    return *this;
}

Quire& Quire::sub_product(const PositPattern& a, const PositPattern& b) { return add_product(negate(a), b); }

Quire& Quire::add(const PositPattern& a)
{
    require_config(a);
    if (nar_) {
        return *this;
    }
    Decoded da = decode(a);
    if (da.is_nar()) {
        nar_ = true;
        return *this;
    }
    if (da.is_zero()) {
        return *this;
    }
    const std::int64_t pos = lsb_of(da.triple) + static_cast<std::int64_t>(frac_bits_);
    auto words = magnitude_words(da.triple.significand);
    accumulate(da.triple.negative, words, static_cast<std::uint64_t>(pos));
    return *this;
}

Quire& Quire::operator+=(const Quire& other)
{
    if (other.config_ != config_) {
        throw std::invalid_argument("cannot merge quires of " + config_.to_string() + " and " +
                                    other.config_.to_string());
    }
    if (nar_ || other.nar_) {
        nar_ = true;
        return *this;
    }
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t s = limbs_[i] + other.limbs_[i];
        std::uint64_t c1 = s < limbs_[i] ? 1 : 0;
        std::uint64_t s2 = s + carry;
        std::uint64_t c2 = s2 < carry ? 1 : 0;
        limbs_[i] = s2;
        carry = c1 | c2;
    }
    check_range();
    return *this;
}

BigInt Quire::magnitude() const
{
    std::vector<std::uint64_t> mag = limbs_;
    if (register_negative()) {
        std::uint64_t carry = 1;
        for (auto& l : mag) {
            l = ~l + carry;
            carry = (carry != 0 && l == 0) ? 1 : 0;
        }
    }
    BigInt::backend_type m;
    boost::multiprecision::import_bits(m, mag.begin(), mag.end(), 64, false);
    return BigInt(std::move(m));
}

std::optional<BigRational> Quire::value() const
{
    if (nar_) {
        return std::nullopt;
    }
    const bool neg = register_negative();
    BigInt v = magnitude();
    return BigRational::dyadic(neg ? -v : v, -static_cast<std::int64_t>(frac_bits_));
}

PositPattern Quire::extract() const
{
    if (nar_) {
        return PositPattern::nar(config_);
    }
    if (is_zero()) {
        return PositPattern::zero(config_);
    }
    RoundingInput in;
    in.negative = register_negative();
    in.significand = magnitude();
    in.lsb_exponent = -static_cast<std::int64_t>(frac_bits_);
    return encode_rounded(config_, in).pattern;
}

PositPattern fdp(PositConfig config, std::span<const PositPattern> xs, std::span<const PositPattern> ys)
{
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("fdp: vectors of length " + std::to_string(xs.size()) + " and " +
                                    std::to_string(ys.size()));
    }
    Quire q(config);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        q.add_product(xs[i], ys[i]);
    }
    return q.extract();
}

}  // namespace positlab
