#pragma once

// Test-only oracles. Nothing here calls into the decode/encode/rounding code
// under test; values are derived from the posit value equation on bit strings.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "positlab/exactnum.hpp"
#include "positlab/positcore.hpp"

namespace testsupport {

using positlab::BigInt;
using positlab::BigRational;
using positlab::PositConfig;
using positlab::PositPattern;

inline PositPattern P(PositConfig cfg, std::uint64_t bits) { return PositPattern::from_bits(cfg, bits); }

/// Value of an nbits pattern (nbits <= 63) read from its binary string; nullopt for NaR.
inline std::optional<BigRational> naive_value(unsigned nbits, unsigned es, std::uint64_t bits)
{
    if (bits == 0) {
        return BigRational();
    }
    if (bits == (std::uint64_t{1} << (nbits - 1))) {
        return std::nullopt;
    }
    bool neg = (bits >> (nbits - 1)) & 1;
    std::uint64_t mag = neg ? ((std::uint64_t{1} << nbits) - bits) : bits;
    std::string s;
    for (int i = static_cast<int>(nbits) - 2; i >= 0; --i) {
        s.push_back(((mag >> i) & 1) ? '1' : '0');
    }
    std::size_t run = 1;
    while (run < s.size() && s[run] == s[0]) {
        ++run;
    }
    long long k = s[0] == '1' ? static_cast<long long>(run) - 1 : -static_cast<long long>(run);
    std::string rest = run < s.size() ? s.substr(run + 1) : std::string();
    std::string ebits = rest.substr(0, std::min<std::size_t>(es, rest.size()));
    while (ebits.size() < es) {
        ebits.push_back('0');
    }
    std::string fbits = rest.size() > es ? rest.substr(es) : std::string();
    BigRational useed(BigInt::pow2(std::uint64_t{1} << es));
    BigRational scale(1);
    for (long long i = 0; i < (k < 0 ? -k : k); ++i) {
        scale = k < 0 ? scale / useed : scale * useed;
    }
    long long e = 0;
    for (char c : ebits) {
        e = 2 * e + (c == '1');
    }
    scale *= BigRational(BigInt::pow2(static_cast<std::uint64_t>(e)));
    BigRational f(1);
    BigRational w(1);
    for (char c : fbits) {
        w = w / BigRational(2);
        if (c == '1') {
            f += w;
        }
    }
    BigRational v = scale * f;
    return neg ? -v : v;
}

/// Brute-force rounding: nearest positive pattern with boundaries taken from
/// the (nbits+1)-bit midpoint patterns, ties to the even pattern, saturating.
/// Returns the pattern bits.
inline std::uint64_t brute_round(unsigned nbits, unsigned es, const BigRational& x)
{
    if (x.is_zero()) {
        return 0;
    }
    BigRational ax = x.abs();
    std::uint64_t top = (std::uint64_t{1} << (nbits - 1)) - 1;
    std::uint64_t best = 0;
    if (ax <= *naive_value(nbits, es, 1)) {
        best = 1;
    } else if (ax >= *naive_value(nbits, es, top)) {
        best = top;
    } else {
        for (std::uint64_t p = 1; p < top; ++p) {
            BigRational lo = *naive_value(nbits, es, p);
            BigRational hi = *naive_value(nbits, es, p + 1);
            if (lo <= ax && ax < hi) {
                if (lo == ax) {
                    best = p;
                } else {
                    BigRational mid = *naive_value(nbits + 1, es, 2 * p + 1);
                    if (ax < mid) {
                        best = p;
                    } else if (ax > mid) {
                        best = p + 1;
                    } else {
                        best = (p % 2 == 0) ? p : p + 1;
                    }
                }
                break;
            }
        }
    }
    std::uint64_t mask = (nbits == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << nbits) - 1);
    return x.is_negative() ? ((0 - best) & mask) : best;
}

inline std::uint64_t mask_bits(unsigned nbits)
{
    return nbits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << nbits) - 1);
}

inline BigRational random_rational(std::mt19937_64& rng, int max_bits = 40)
{
    std::uniform_int_distribution<long long> num(-(1LL << max_bits), 1LL << max_bits);
    std::uniform_int_distribution<long long> den(1, 1LL << max_bits);
    return BigRational(BigInt(num(rng)), BigInt(den(rng)));
}

}  // namespace testsupport
