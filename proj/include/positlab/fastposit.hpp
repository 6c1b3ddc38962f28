#pragma once

// Integer-only kernels for the standard posit configurations. Patterns are
// plain unsigned integers; no allocation anywhere.

#include <bit>
#include <cstdint>
#include <type_traits>

namespace positlab::fast {

using u128 = unsigned __int128;

inline int countl_zero128(u128 x)
{
    auto hi = static_cast<std::uint64_t>(x >> 64);
    return hi != 0 ? std::countl_zero(hi) : 64 + std::countl_zero(static_cast<std::uint64_t>(x));
}

template <unsigned N>
using storage_t = std::conditional_t<
    N == 8, std::uint8_t,
    std::conditional_t<N == 16, std::uint16_t, std::conditional_t<N == 32, std::uint32_t, std::uint64_t>>>;

template <unsigned N, unsigned ES>
struct Posit {
    static_assert(N == 8 || N == 16 || N == 32 || N == 64, "fast kernels exist for 8/16/32/64-bit posits");
    static_assert(ES <= 5);

    using storage = storage_t<N>;

    static constexpr std::uint64_t kMask = N == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << N) - 1;
    static constexpr std::uint64_t kNaR = std::uint64_t{1} << (N - 1);
    static constexpr std::uint64_t kMaxpos = kNaR - 1;
    static constexpr int kMaxScale = static_cast<int>(N - 2) << ES;

    struct Unpacked {
        bool negative;
        int scale;
        std::uint64_t sig;  // hidden bit at 63
    };

    /// p must be neither zero nor NaR.
    static Unpacked unpack(std::uint64_t p)
    {
        bool negative = ((p >> (N - 1)) & 1) != 0;
        if (negative) {
            p = (0 - p) & kMask;
        }
        std::uint64_t y = p << (64 - N + 1);
        bool first = (y >> 63) != 0;
        int run = first ? std::countl_one(y) : std::countl_zero(y);
        int k = first ? run - 1 : -run;
        int consumed = run + 1;
        std::uint64_t body = consumed >= 64 ? 0 : (y << consumed);
        int e = 0;
        if constexpr (ES > 0) {
            e = static_cast<int>(body >> (64 - ES));
            body <<= ES;
        }
        return {negative, k * (1 << ES) + e, (std::uint64_t{1} << 63) | (body >> 1)};
    }

    /// sig has its leading one at bit 127; sticky marks a nonzero tail below it.
    static std::uint64_t pack(bool negative, int scale, u128 sig, bool sticky, bool& inexact)
    {
        std::uint64_t mag;
        if (scale >= kMaxScale) {
            mag = kMaxpos;
            inexact = scale > kMaxScale || (sig << 1) != 0 || sticky;
        } else if (scale < -kMaxScale) {
            mag = 1;
            inexact = true;
        } else {
            int k = scale >> ES;
            int e = scale & ((1 << ES) - 1);
            int regime_len;
            std::uint64_t regime;
            if (k >= 0) {
                regime_len = k + 2;
                regime = ((std::uint64_t{1} << (k + 1)) - 1) << 1;
            } else {
                regime_len = 1 - k;
                regime = 1;
            }
            int room = static_cast<int>(N) - 1 - regime_len;
            u128 frac = sig << 1;
            u128 tail;
            bool st = sticky;
            if constexpr (ES > 0) {
                tail = (static_cast<u128>(e) << (128 - ES)) | (frac >> ES);
                st |= (frac & ((u128{1} << ES) - 1)) != 0;
            } else {
                tail = frac;
            }
            bool guard;
            if (room == 0) {
                mag = regime;
                guard = (tail >> 127) != 0;
                st |= (tail << 1) != 0;
            } else {
                mag = (regime << room) | static_cast<std::uint64_t>(tail >> (128 - room));
                guard = ((tail >> (127 - room)) & 1) != 0;
                st |= (tail << (room + 1)) != 0;
            }
            if (guard && (st || (mag & 1) != 0)) {
                ++mag;
            }
            inexact = guard || st;
        }
        return negative ? (0 - mag) & kMask : mag;
    }

    static storage add(storage a_, storage b_, bool* inexact_out = nullptr)
    {
        std::uint64_t a = a_;
        std::uint64_t b = b_;
        bool inexact = false;
        std::uint64_t r;
        if (a == kNaR || b == kNaR) {
            r = kNaR;
            inexact = true;
        } else if (a == 0) {
            r = b;
        } else if (b == 0) {
            r = a;
        } else {
            Unpacked ua = unpack(a);
            Unpacked ub = unpack(b);
            if (ua.scale < ub.scale) {
                std::swap(ua, ub);
            }
            u128 x = static_cast<u128>(ua.sig) << 63;
            u128 y = static_cast<u128>(ub.sig) << 63;
            int d = ua.scale - ub.scale;
            if (d >= 127) {
                y = 1;
            } else if (d > 0) {
                bool lost = (y & ((u128{1} << d) - 1)) != 0;
                y >>= d;
                if (lost) {
                    y |= 1;
                }
            }
            u128 s;
            bool negative;
            if (ua.negative == ub.negative) {
                s = x + y;
                negative = ua.negative;
            } else if (x >= y) {
                s = x - y;
                negative = ua.negative;
            } else {
                s = y - x;
                negative = ub.negative;
            }
            if (s == 0) {
                r = 0;
            } else {
                int lz = countl_zero128(s);
                r = pack(negative, ua.scale + 1 - lz, s << lz, false, inexact);
            }
        }
        if (inexact_out != nullptr) {
            *inexact_out = inexact;
        }
        return static_cast<storage>(r);
    }

    static storage sub(storage a, storage b, bool* inexact_out = nullptr)
    {
        return add(a, static_cast<storage>((0 - static_cast<std::uint64_t>(b)) & kMask), inexact_out);
    }

    static storage mul(storage a_, storage b_, bool* inexact_out = nullptr)
    {
        std::uint64_t a = a_;
        std::uint64_t b = b_;
        bool inexact = false;
        std::uint64_t r;
        if (a == kNaR || b == kNaR) {
            r = kNaR;
            inexact = true;
        } else if (a == 0 || b == 0) {
            r = 0;
        } else {
            Unpacked ua = unpack(a);
            Unpacked ub = unpack(b);
            u128 p = static_cast<u128>(ua.sig) * ub.sig;
            int scale = ua.scale + ub.scale;
            if ((p >> 127) != 0) {
                ++scale;
            } else {
                p <<= 1;
            }
            r = pack(ua.negative != ub.negative, scale, p, false, inexact);
        }
        if (inexact_out != nullptr) {
            *inexact_out = inexact;
        }
        return static_cast<storage>(r);
    }

    static storage div(storage a_, storage b_, bool* inexact_out = nullptr)
    {
        std::uint64_t a = a_;
        std::uint64_t b = b_;
        bool inexact = false;
        std::uint64_t r;
        if (a == kNaR || b == kNaR || b == 0) {
            r = kNaR;
            inexact = true;
        } else if (a == 0) {
            r = 0;
        } else {
            Unpacked ua = unpack(a);
            Unpacked ub = unpack(b);
            u128 num = static_cast<u128>(ua.sig) << 64;
            u128 q = num / ub.sig;
            bool sticky = (num % ub.sig) != 0;
            int lz = countl_zero128(q);
            int lead = 127 - lz;
            r = pack(ua.negative != ub.negative, ua.scale - ub.scale + lead - 64, q << lz, sticky, inexact);
        }
        if (inexact_out != nullptr) {
            *inexact_out = inexact;
        }
        return static_cast<storage>(r);
    }
};

using posit8 = Posit<8, 0>;
using posit16 = Posit<16, 1>;
using posit32 = Posit<32, 2>;
using posit64 = Posit<64, 3>;

}  // namespace positlab::fast
