#include "positlab/positarith.hpp"

#include <cmath>
#include <utility>

#include "positlab/fastposit.hpp"

namespace positlab {

namespace {

void require_same_config(const PositPattern& a, const PositPattern& b)
{
    if (a.config() != b.config()) {
        throw std::invalid_argument("posit operands have different configs: " + a.config().to_string() + " vs " +
                                    b.config().to_string());
    }
}

ArithResult nar_result(PositConfig cfg) { return {PositPattern::nar(cfg), false}; }

std::int64_t lsb_of(const ValueTriple& t) { return t.scale - static_cast<std::int64_t>(t.fraction_bits); }

ArithResult round_signed(PositConfig cfg, BigInt value, std::int64_t lsb, bool sticky)
{
    if (value.is_zero() && !sticky) {
        return {PositPattern::zero(cfg), true};
    }
    RoundingInput in;
    in.negative = value.is_negative();
    in.significand = value.abs();
    in.lsb_exponent = lsb;
    in.sticky = sticky;
    EncodeResult r = encode_rounded(cfg, in);
    return {r.pattern, r.exact};
}

ArithResult add_triples(PositConfig cfg, const ValueTriple& ta, const ValueTriple& tb)
{
    const ValueTriple* big = &ta;
    const ValueTriple* small = &tb;
    if (big->scale < small->scale) {
        std::swap(big, small);
    }
    const std::int64_t lsb_big = lsb_of(*big);
    const std::int64_t lsb_small = lsb_of(*small);
    const std::int64_t limit = 3 * static_cast<std::int64_t>(cfg.nbits) + 64;

    BigInt x = big->negative ? -big->significand : big->significand;
    if (lsb_big - lsb_small > limit) {
        // The smaller operand lies entirely below every rounding boundary of
        // the result: replace it by one unit at a position under the guard bit.
        const std::uint64_t pad = cfg.nbits + 8;
        x <<= pad;
        x += BigInt(small->negative ? -1 : 1);
        return round_signed(cfg, std::move(x), lsb_big - static_cast<std::int64_t>(pad), false);
    }
    BigInt y = small->negative ? -small->significand : small->significand;
    const std::int64_t lsb = std::min(lsb_big, lsb_small);
    x <<= static_cast<std::uint64_t>(lsb_big - lsb);
    y <<= static_cast<std::uint64_t>(lsb_small - lsb);
    return round_signed(cfg, x + y, lsb, false);
}

}  // namespace

ArithResult add(const PositPattern& a, const PositPattern& b)
{
    require_same_config(a, b);
    const PositConfig cfg = a.config();
    Decoded da = decode(a);
    Decoded db = decode(b);
    if (da.is_nar() || db.is_nar()) {
        return nar_result(cfg);
    }
    if (da.is_zero()) {
        return {b, true};
    }
    if (db.is_zero()) {
        return {a, true};
    }
    return add_triples(cfg, da.triple, db.triple);
}

ArithResult sub(const PositPattern& a, const PositPattern& b)
{
    require_same_config(a, b);
    return add(a, negate(b));
}

ArithResult mul(const PositPattern& a, const PositPattern& b)
{
    require_same_config(a, b);
    const PositConfig cfg = a.config();
    Decoded da = decode(a);
    Decoded db = decode(b);
    if (da.is_nar() || db.is_nar()) {
        return nar_result(cfg);
    }
    if (da.is_zero() || db.is_zero()) {
        return {PositPattern::zero(cfg), true};
    }
    BigInt p = da.triple.significand * db.triple.significand;
    if (da.triple.negative != db.triple.negative) {
        p = -p;
    }
    return round_signed(cfg, std::move(p), lsb_of(da.triple) + lsb_of(db.triple), false);
}

ArithResult div(const PositPattern& a, const PositPattern& b)
{
    require_same_config(a, b);
    const PositConfig cfg = a.config();
    Decoded da = decode(a);
    Decoded db = decode(b);
    if (da.is_nar() || db.is_nar() || db.is_zero()) {
        return nar_result(cfg);
    }
    if (da.is_zero()) {
        return {PositPattern::zero(cfg), true};
    }
    // quotient carries at least nbits + 4 significant bits
    const std::uint64_t shift = db.triple.fraction_bits + cfg.nbits + 4;
    auto [q, r] = divmod(da.triple.significand << shift, db.triple.significand);
    if (da.triple.negative != db.triple.negative) {
        q = -q;
    }
    const std::int64_t lsb = lsb_of(da.triple) - lsb_of(db.triple) - static_cast<std::int64_t>(shift);
    return round_signed(cfg, std::move(q), lsb, !r.is_zero());
}

std::strong_ordering compare(const PositPattern& a, const PositPattern& b)
{
    require_same_config(a, b);
    bool sa = a.sign_bit();
    bool sb = b.sign_bit();
    if (sa != sb) {
        return sa ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    // equal sign bits: two's complement order agrees with unsigned order
    return a.bits() <=> b.bits();
}

// ------------------------------------------------------------ fast paths

bool has_fast_path(PositConfig cfg)
{
    return (cfg.nbits == 8 && cfg.es == 0) || (cfg.nbits == 16 && cfg.es == 1) || (cfg.nbits == 32 && cfg.es == 2) ||
           (cfg.nbits == 64 && cfg.es == 3);
}

namespace {

enum class Op { Add, Sub, Mul, Div };

template <typename P>
ArithResult run_fast(Op op, const PositPattern& a, const PositPattern& b)
{
    using S = typename P::storage;
    auto x = static_cast<S>(a.low64());
    auto y = static_cast<S>(b.low64());
    bool inexact = false;
    S r{};
    switch (op) {
    case Op::Add:
        r = P::add(x, y, &inexact);
        break;
    case Op::Sub:
        r = P::sub(x, y, &inexact);
        break;
    case Op::Mul:
        r = P::mul(x, y, &inexact);
        break;
    case Op::Div:
        r = P::div(x, y, &inexact);
        break;
    }
    return {PositPattern::from_bits(a.config(), r), !inexact};
}

ArithResult dispatch_fast(Op op, const PositPattern& a, const PositPattern& b)
{
    require_same_config(a, b);
    const PositConfig cfg = a.config();
    if (cfg.nbits == 8 && cfg.es == 0) {
        return run_fast<fast::posit8>(op, a, b);
    }
    if (cfg.nbits == 16 && cfg.es == 1) {
        return run_fast<fast::posit16>(op, a, b);
    }
    if (cfg.nbits == 32 && cfg.es == 2) {
        return run_fast<fast::posit32>(op, a, b);
    }
    if (cfg.nbits == 64 && cfg.es == 3) {
        return run_fast<fast::posit64>(op, a, b);
    }
    throw UnsupportedConfig("no integer-specialized path for " + cfg.to_string());
}

}  // namespace

ArithResult fast_add(const PositPattern& a, const PositPattern& b) { return dispatch_fast(Op::Add, a, b); }
ArithResult fast_sub(const PositPattern& a, const PositPattern& b) { return dispatch_fast(Op::Sub, a, b); }
ArithResult fast_mul(const PositPattern& a, const PositPattern& b) { return dispatch_fast(Op::Mul, a, b); }
ArithResult fast_div(const PositPattern& a, const PositPattern& b) { return dispatch_fast(Op::Div, a, b); }

ArithResult auto_add(const PositPattern& a, const PositPattern& b)
{
    return has_fast_path(a.config()) ? fast_add(a, b) : add(a, b);
}
ArithResult auto_sub(const PositPattern& a, const PositPattern& b)
{
    return has_fast_path(a.config()) ? fast_sub(a, b) : sub(a, b);
}
ArithResult auto_mul(const PositPattern& a, const PositPattern& b)
{
    return has_fast_path(a.config()) ? fast_mul(a, b) : mul(a, b);
}
ArithResult auto_div(const PositPattern& a, const PositPattern& b)
{
    return has_fast_path(a.config()) ? fast_div(a, b) : div(a, b);
}

// --------------------------------------------------------- math fallback

namespace {

enum class Domain { All, Positive, NonNegative };

template <typename F>
PositPattern via_long_double(const PositPattern& x, Domain domain, F&& fn)
{
    const PositConfig cfg = x.config();
    if (cfg.nbits > 64) {
        throw UnsupportedConfig("math fallback supports at most 64-bit posits, got " + cfg.to_string());
    }
    auto v = value_of(x);
    if (!v) {
        return PositPattern::nar(cfg);
    }
    if ((domain == Domain::Positive && v->sign() <= 0) || (domain == Domain::NonNegative && v->is_negative())) {
        return PositPattern::nar(cfg);
    }
    long double r = fn(v->to_long_double());
    if (std::isnan(r)) {
        return PositPattern::nar(cfg);
    }
    if (std::isinf(r)) {
        // a finite argument produced a value beyond the host range
        return r > 0 ? PositPattern::maxpos(cfg) : negate(PositPattern::maxpos(cfg));
    }
    return encode(cfg, BigRational::from_long_double(r));
}

}  // namespace

PositPattern exp(const PositPattern& x)
{
    PositPattern r = via_long_double(x, Domain::All, [](long double v) { return std::exp(v); });
    // exp never vanishes; host underflow must not become posit zero
    return r.is_zero() ? PositPattern::minpos(x.config()) : r;
}

PositPattern log(const PositPattern& x)
{
    return via_long_double(x, Domain::Positive, [](long double v) { return std::log(v); });
}

PositPattern sin(const PositPattern& x)
{
    return via_long_double(x, Domain::All, [](long double v) { return std::sin(v); });
}

PositPattern cos(const PositPattern& x)
{
    return via_long_double(x, Domain::All, [](long double v) { return std::cos(v); });
}

PositPattern sqrt(const PositPattern& x)
{
    return via_long_double(x, Domain::NonNegative, [](long double v) { return std::sqrt(v); });
}

}  // namespace positlab
