#include "positlab/oracle.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace positlab {

std::optional<BigRational> reference_value(const BigInt& bits, unsigned nbits, unsigned es)
{
    const BigInt modulus = BigInt::pow2(nbits);
    const BigInt nar = BigInt::pow2(nbits - 1);
    if (bits.is_negative() || bits >= modulus) {
        throw std::invalid_argument("reference_value: pattern out of range");
    }
    if (bits.is_zero()) {
        return BigRational();
    }
    if (bits == nar) {
        return std::nullopt;
    }
    const bool negative = bits.bit(nbits - 1);
    const BigInt p = negative ? modulus - bits : bits;

    int pos = static_cast<int>(nbits) - 2;
    auto next_bit = [&](bool& out) {
        if (pos < 0) {
            return false;
        }
        out = p.bit(static_cast<std::uint64_t>(pos--));
        return true;
    };

    bool first = false;
    next_bit(first);
    std::int64_t run = 1;
    bool b = false;
    bool terminated = false;
    while (next_bit(b)) {
        if (b != first) {
            terminated = true;
            break;
        }
        ++run;
    }
    (void)terminated;
    const std::int64_t k = first ? run - 1 : -run;

    std::int64_t e = 0;
    for (unsigned i = 0; i < es; ++i) {
        bool eb = false;
        e = 2 * e + (next_bit(eb) && eb ? 1 : 0);
    }

    BigInt frac_num(1);
    std::int64_t fs = 0;
    while (next_bit(b)) {
        frac_num = frac_num * BigInt(2) + BigInt(b ? 1 : 0);
        ++fs;
    }
    // sign * useed^k * 2^e * f with useed = 2^(2^es) and f = frac_num / 2^fs
    const std::int64_t useed_log2 = std::int64_t{1} << es;
    BigRational v = BigRational::dyadic(frac_num, k * useed_log2 + e - fs);
    return negative ? -v : v;
}

// ---------------------------------------------------- enumeration path

EnumerationOracle::EnumerationOracle(PositConfig config) : config_(config)
{
    if (config.nbits > kMaxNbits) {
        throw std::invalid_argument("EnumerationOracle: " + config.to_string() + " is too wide to enumerate");
    }
    const std::uint64_t count = (std::uint64_t{1} << (config.nbits - 1)) - 1;
    values_.reserve(count);
    boundaries_.reserve(count);
    for (std::uint64_t p = 1; p <= count; ++p) {
        values_.push_back(*reference_value(BigInt(static_cast<unsigned long long>(p)), config.nbits, config.es));
        if (p < count) {
            boundaries_.push_back(
                *reference_value(BigInt(static_cast<unsigned long long>(2 * p + 1)), config.nbits + 1, config.es));
        }
    }
}

PositPattern EnumerationOracle::round(const BigRational& x) const
{
    if (x.is_zero()) {
        return PositPattern::zero(config_);
    }
    const BigRational ax = x.abs();
    std::uint64_t pattern = 0;
    if (ax <= values_.front()) {
        pattern = 1;
    } else if (ax >= values_.back()) {
        pattern = values_.size();
    } else {
        // values_[i] holds pattern i + 1; find the last value <= ax
        auto it = std::upper_bound(values_.begin(), values_.end(), ax);
        std::size_t i = static_cast<std::size_t>(it - values_.begin()) - 1;
        if (values_[i] == ax) {
            pattern = i + 1;
        } else {
            auto c = ax <=> boundaries_[i];
            if (c < 0) {
                pattern = i + 1;
            } else if (c > 0) {
                pattern = i + 2;
            } else {
                pattern = ((i + 1) % 2 == 0) ? i + 1 : i + 2;
            }
        }
    }
    PositPattern r = PositPattern::from_bits(config_, pattern);
    return x.is_negative() ? negate(r) : r;
}

std::shared_ptr<const EnumerationOracle> enumeration_oracle(PositConfig config)
{
    static std::mutex mu;
    static std::map<PositConfig, std::shared_ptr<const EnumerationOracle>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(config); it != cache.end()) {
            return it->second;
        }
    }
    auto built = std::make_shared<const EnumerationOracle>(config);
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(config, std::move(built));
    return it->second;
}

PositPattern oracle_round_enumerated(PositConfig config, const BigRational& x)
{
    return enumeration_oracle(config)->round(x);
}

// ------------------------------------------------------ bisection path

PositPattern oracle_round_bisect(PositConfig config, const BigRational& x)
{
    if (x.is_zero()) {
        return PositPattern::zero(config);
    }
    const unsigned n = config.nbits;
    const BigRational ax = x.abs();
    auto value = [&](const BigInt& p) { return *reference_value(p, n, config.es); };

    const BigInt one(1);
    const BigInt top = BigInt::pow2(n - 1) - one;  // maxpos pattern
    BigInt chosen;
    if (ax <= value(one)) {
        chosen = one;
    } else if (ax >= value(top)) {
        chosen = top;
    } else {
        // invariant: value(lo) <= ax < value(hi)
        BigInt lo = one;
        BigInt hi = top;
        while (hi - lo > one) {
            BigInt mid = (lo + hi) >> 1;
            if (value(mid) <= ax) {
                lo = std::move(mid);
            } else {
                hi = std::move(mid);
            }
        }
        if (value(lo) == ax) {
            chosen = lo;
        } else {
            BigRational boundary = *reference_value(lo * BigInt(2) + one, n + 1, config.es);
            auto c = ax <=> boundary;
            if (c < 0) {
                chosen = lo;
            } else if (c > 0) {
                chosen = hi;
            } else {
                chosen = lo.is_odd() ? hi : lo;
            }
        }
    }
    PositPattern r(config, PatternWord::from_bigint(chosen));
    return x.is_negative() ? negate(r) : r;
}

PositPattern oracle_round(PositConfig config, const BigRational& x)
{
    if (config.nbits <= 10) {
        return oracle_round_enumerated(config, x);
    }
    return oracle_round_bisect(config, x);
}

}  // namespace positlab
