#include "positlab/positcore.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace positlab {

// ------------------------------------------------------------ PositConfig

PositConfig::PositConfig(unsigned nbits_, unsigned es_) : nbits(nbits_), es(es_)
{
    if (nbits < 2 || nbits > kMaxNbits) {
        throw std::invalid_argument("posit nbits must lie in [2, 256], got " + std::to_string(nbits));
    }
    if (es > kMaxEs) {
        throw std::invalid_argument("posit es must lie in [0, 16], got " + std::to_string(es));
    }
}

std::string PositConfig::to_string() const
{
    return "posit<" + std::to_string(nbits) + "," + std::to_string(es) + ">";
}

PositConfig PositConfig::parse(std::string_view text)
{
    std::string_view s = text;
    if (s.starts_with("posit<") && s.ends_with(">")) {
        s = s.substr(6, s.size() - 7);
    }
    auto comma = s.find(',');
    auto bad = [&] { return std::invalid_argument("malformed posit config '" + std::string(text) + "', expected N,E"); };
    if (comma == std::string_view::npos) {
        throw bad();
    }
    unsigned n = 0;
    unsigned e = 0;
    auto a = s.substr(0, comma);
    auto b = s.substr(comma + 1);
    auto ra = std::from_chars(a.data(), a.data() + a.size(), n);
    auto rb = std::from_chars(b.data(), b.data() + b.size(), e);
    if (a.empty() || b.empty() || ra.ec != std::errc() || ra.ptr != a.data() + a.size() || rb.ec != std::errc() ||
        rb.ptr != b.data() + b.size()) {
        throw bad();
    }
    return PositConfig(n, e);
}

// ------------------------------------------------------------ PatternWord

BigInt PatternWord::to_bigint() const
{
    BigInt r;
    for (int i = kLimbs - 1; i >= 0; --i) {
        r <<= 64;
        r += BigInt(static_cast<unsigned long long>(limbs_[i]));
    }
    return r;
}

PatternWord PatternWord::from_bigint(const BigInt& v)
{
    if (v.is_negative()) {
        throw std::invalid_argument("PatternWord::from_bigint: negative value");
    }
    PatternWord w;
    BigInt t = v;
    for (unsigned i = 0; i < kLimbs && !t.is_zero(); ++i) {
        w.limbs_[i] = t.low_u64();
        t >>= 64;
    }
    return w;
}

// ----------------------------------------------------------- PositPattern

PositPattern::PositPattern(PositConfig config, PatternWord bits) : config_(config), bits_(bits)
{
    if (bits.masked(config.nbits) != bits) {
        throw std::invalid_argument("pattern does not fit in " + std::to_string(config.nbits) + " bits");
    }
}

PositPattern PositPattern::nar(PositConfig config)
{
    PatternWord w;
    w.set_bit(config.nbits - 1, true);
    return {config, w};
}

PositPattern PositPattern::maxpos(PositConfig config)
{
    PatternWord w;
    for (unsigned i = 0; i + 1 < config.nbits; ++i) {
        w.set_bit(i, true);
    }
    return {config, w};
}

bool PositPattern::is_nar() const { return bits_ == nar(config_).bits_; }

PositPattern PositPattern::parse(PositConfig config, std::string_view text)
{
    auto bad = [&](const std::string& why) {
        return std::invalid_argument("bad pattern '" + std::string(text) + "': " + why);
    };
    if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X' && text[1] != 'b' && text[1] != 'B')) {
        throw bad("expected 0x... or 0b... prefix");
    }
    bool hex = text[1] == 'x' || text[1] == 'X';
    unsigned radix_bits = hex ? 4 : 1;
    BigInt v;
    for (char c : text.substr(2)) {
        if (c == '_' || c == '\'') {
            continue;
        }
        int d = -1;
        if (c >= '0' && c <= '9') {
            d = c - '0';
        } else if (hex && c >= 'a' && c <= 'f') {
            d = c - 'a' + 10;
        } else if (hex && c >= 'A' && c <= 'F') {
            d = c - 'A' + 10;
        }
        if (d < 0 || d >= (1 << radix_bits)) {
            throw bad("invalid digit");
        }
        v <<= radix_bits;
        v += BigInt(d);
    }
    if (v.bit_length() > config.nbits) {
        throw bad("does not fit in " + std::to_string(config.nbits) + " bits");
    }
    return {config, PatternWord::from_bigint(v)};
}

std::string PositPattern::hex() const
{
    static constexpr char digits[] = "0123456789ABCDEF";
    unsigned nd = (config_.nbits + 3) / 4;
    std::string s = "0x";
    for (int d = static_cast<int>(nd) - 1; d >= 0; --d) {
        unsigned v = 0;
        for (int b = 3; b >= 0; --b) {
            unsigned idx = static_cast<unsigned>(4 * d + b);
            v = (v << 1) | (idx < PatternWord::kBits && bits_.bit(idx) ? 1U : 0U);
        }
        s.push_back(digits[v]);
    }
    return s;
}

std::string PositPattern::to_string() const { return hex() + ":" + config_.to_string(); }

// ------------------------------------------------------------- decoding

BigRational ValueTriple::to_rational() const
{
    BigInt m = negative ? -significand : significand;
    return BigRational::dyadic(m, scale - static_cast<std::int64_t>(fraction_bits));
}

std::optional<BigRational> Decoded::value() const
{
    switch (kind) {
    case Kind::Zero:
        return BigRational();
    case Kind::NaR:
        return std::nullopt;
    case Kind::Finite:
        break;
    }
    return triple.to_rational();
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

// Fields of a positive magnitude; positions counted from bit nbits-2 downward.
struct RawFields {
    std::int64_t k = 0;
    unsigned run = 0;        // regime run length
    bool terminated = false;  // terminator bit present
    unsigned exp_present = 0;
    std::uint64_t e = 0;
    unsigned fs = 0;
};

RawFields scan_fields(const PatternWord& mag, PositConfig cfg)
{
    RawFields f;
    int idx = static_cast<int>(cfg.nbits) - 2;
    bool first = mag.bit(static_cast<unsigned>(idx));
    while (idx >= 0 && mag.bit(static_cast<unsigned>(idx)) == first) {
        ++f.run;
        --idx;
    }
    f.k = first ? static_cast<std::int64_t>(f.run) - 1 : -static_cast<std::int64_t>(f.run);
    if (idx >= 0) {
        f.terminated = true;
        --idx;
    }
    for (unsigned i = 0; i < cfg.es; ++i) {
        f.e <<= 1;
        if (idx >= 0) {
            f.e |= mag.bit(static_cast<unsigned>(idx)) ? 1U : 0U;
            ++f.exp_present;
            --idx;
        }
    }
    f.fs = static_cast<unsigned>(idx + 1);
    return f;
}

Decoded decode_small(const PatternWord& mag, PositConfig cfg, bool negative)
{
    const unsigned avail = cfg.nbits - 1;
    std::uint64_t y = mag.low64() << (64 - avail);
    bool first = (y >> 63) != 0;
    unsigned run = first ? static_cast<unsigned>(std::countl_one(y)) : static_cast<unsigned>(std::countl_zero(y));
    run = std::min(run, avail);
    unsigned consumed = std::min(run + 1, avail);
    unsigned rest = avail - consumed;
    std::uint64_t body = consumed >= 64 ? 0 : (y << consumed);
    std::uint64_t e = cfg.es == 0 ? 0 : (body >> (64 - cfg.es));
    unsigned fs = rest > cfg.es ? rest - cfg.es : 0;
    std::uint64_t frac = fs == 0 ? 0 : ((body << cfg.es) >> (64 - fs));
    std::int64_t k = first ? static_cast<std::int64_t>(run) - 1 : -static_cast<std::int64_t>(run);

    Decoded d;
    d.kind = Decoded::Kind::Finite;
    d.triple.negative = negative;
    d.triple.scale = k * static_cast<std::int64_t>(cfg.regime_step()) + static_cast<std::int64_t>(e);
    d.triple.fraction_bits = fs;
    d.triple.significand = BigInt(static_cast<unsigned long long>((std::uint64_t{1} << fs) | frac));
    return d;
}

}  // namespace

Decoded decode(const PositPattern& p)
{
    const PositConfig& cfg = p.config();
    if (p.is_zero()) {
        return {Decoded::Kind::Zero, {}};
    }
    if (p.is_nar()) {
        return {Decoded::Kind::NaR, {}};
    }
    bool negative = p.sign_bit();
    PatternWord mag = negative ? p.bits().negated(cfg.nbits) : p.bits();
    if (cfg.nbits <= 64) {
        return decode_small(mag, cfg, negative);
    }
    RawFields f = scan_fields(mag, cfg);
    Decoded d;
    d.kind = Decoded::Kind::Finite;
    d.triple.negative = negative;
    d.triple.scale = f.k * static_cast<std::int64_t>(cfg.regime_step()) + static_cast<std::int64_t>(f.e);
    d.triple.fraction_bits = f.fs;
    BigInt sig = mag.masked(f.fs).to_bigint();
    sig += BigInt::pow2(f.fs);
    d.triple.significand = std::move(sig);
    return d;
}

std::optional<BigRational> value_of(const PositPattern& p) { return decode(p).value(); }

PositFields decode_fields(const PositPattern& p)
{
    if (p.is_zero() || p.is_nar()) {
        throw std::invalid_argument("decode_fields: pattern " + p.to_string() + " has no fields");
    }
    const PositConfig& cfg = p.config();
    PositFields out;
    out.sign = p.sign_bit();
    PatternWord mag = out.sign ? p.bits().negated(cfg.nbits) : p.bits();
    RawFields f = scan_fields(mag, cfg);
    int idx = static_cast<int>(cfg.nbits) - 2;
    auto take = [&](unsigned count, std::string& dst) {
        for (unsigned i = 0; i < count; ++i, --idx) {
            dst.push_back(mag.bit(static_cast<unsigned>(idx)) ? '1' : '0');
        }
    };
    take(f.run + (f.terminated ? 1U : 0U), out.regime);
    take(f.exp_present, out.exponent);
    take(f.fs, out.fraction);
    out.k = f.k;
    out.e = BigInt(static_cast<unsigned long long>(f.e));
    out.fraction_bits = f.fs;
    out.fraction_value = mag.masked(f.fs).to_bigint();
    return out;
}

std::string PositFields::to_string() const
{
    return std::string("s:") + (sign ? "1" : "0") + " r:" + regime + " e:" + exponent + " f:" + fraction;
}

// ------------------------------------------------------------- encoding

EncodeResult encode_rounded(PositConfig cfg, const RoundingInput& in)
{
    const unsigned n = cfg.nbits;
    const std::int64_t max_scale = cfg.max_scale();
    PatternWord mag;
    bool exact = true;

    if (in.significand.is_zero()) {
        if (!in.sticky) {
            return {PositPattern::zero(cfg), true};
        }
        mag = PatternWord(1);
        exact = false;
    } else {
        const BigInt sig = in.significand.abs();
        const std::uint64_t len = sig.bit_length();
        const std::int64_t scale = static_cast<std::int64_t>(len) - 1 + in.lsb_exponent;
        if (scale >= max_scale) {
            mag = PositPattern::maxpos(cfg).bits();
            exact = scale == max_scale && sig.trailing_zeros() == len - 1 && !in.sticky;
        } else if (scale < -max_scale) {
            mag = PatternWord(1);
            exact = false;
        } else {
            const auto step = static_cast<std::int64_t>(cfg.regime_step());
            const std::int64_t k = floor_div(scale, step);
            const std::int64_t e = scale - k * step;
            std::uint64_t regime_len = 0;
            BigInt stream;
            if (k >= 0) {
                regime_len = static_cast<std::uint64_t>(k) + 2;
                stream = (BigInt::pow2(static_cast<std::uint64_t>(k) + 1) - BigInt(1)) << 1;
            } else {
                regime_len = static_cast<std::uint64_t>(-k) + 1;
                stream = BigInt(1);
            }
            stream <<= cfg.es;
            stream += BigInt(static_cast<long long>(e));
            const std::uint64_t frac_bits = len - 1;
            stream <<= frac_bits;
            stream += sig - BigInt::pow2(frac_bits);

            const std::uint64_t total = regime_len + cfg.es + frac_bits;
            const std::uint64_t avail = n - 1;
            if (total <= avail) {
                if (in.sticky) {
                    throw std::logic_error("encode_rounded: sticky input with too few significand bits");
                }
                mag = PatternWord::from_bigint(stream << (avail - total));
            } else {
                const std::uint64_t cut = total - avail;
                BigInt kept = stream >> cut;
                const bool guard = stream.bit(cut - 1);
                const bool sticky = in.sticky || (cut >= 2 && stream.trailing_zeros() < cut - 1);
                if (guard && (sticky || kept.is_odd())) {
                    kept += BigInt(1);
                }
                exact = !guard && !sticky;
                mag = PatternWord::from_bigint(kept);
            }
        }
    }
    PatternWord bits = in.negative ? mag.negated(n) : mag;
    return {PositPattern(cfg, bits), exact};
}

RoundingInput rounding_input(PositConfig cfg, const BigRational& value)
{
    RoundingInput in;
    if (value.is_zero()) {
        return in;
    }
    in.negative = value.is_negative();
    const std::int64_t e = value.floor_log2();
    const std::int64_t max_scale = cfg.max_scale();
    if (e > max_scale) {
        in.significand = BigInt(1);
        in.lsb_exponent = max_scale + 1;
        return in;
    }
    if (e < -max_scale - 1) {
        in.significand = BigInt(1);
        in.lsb_exponent = -max_scale - 2;
        return in;
    }
    const std::int64_t lsb = e - static_cast<std::int64_t>(cfg.nbits + 3);
    BigInt num = value.num().abs();
    BigInt den = value.den();
    if (lsb < 0) {
        num <<= static_cast<std::uint64_t>(-lsb);
    } else {
        den <<= static_cast<std::uint64_t>(lsb);
    }
    auto [q, r] = divmod(num, den);
    in.significand = std::move(q);
    in.lsb_exponent = lsb;
    in.sticky = !r.is_zero();
    return in;
}

PositPattern encode(PositConfig cfg, const BigRational& value)
{
    return encode_rounded(cfg, rounding_input(cfg, value)).pattern;
}

PositPattern encode(PositConfig cfg, const ValueTriple& value)
{
    RoundingInput in;
    in.negative = value.negative;
    in.significand = value.significand;
    in.lsb_exponent = value.scale - static_cast<std::int64_t>(value.fraction_bits);
    return encode_rounded(cfg, in).pattern;
}

ConfigExtrema config_extrema(PositConfig cfg)
{
    ConfigExtrema x;
    x.useed_log2 = cfg.regime_step();
    x.useed = BigInt::pow2(x.useed_log2);
    x.minpos = BigRational::dyadic(BigInt(1), -cfg.max_scale());
    x.maxpos = BigRational::dyadic(BigInt(1), cfg.max_scale());
    x.dynamic_range_exponent = 2 * static_cast<std::int64_t>(cfg.nbits) - 4;
    return x;
}

PositPattern negate(const PositPattern& p)
{
    return {p.config(), p.bits().negated(p.config().nbits)};
}

PositPattern abs(const PositPattern& p) { return p.sign_bit() ? negate(p) : p; }

PositPattern embed(const PositPattern& p)
{
    PositConfig wider(p.config().nbits + 1, p.config().es);
    return {wider, p.bits().shifted_left(1).masked(wider.nbits)};
}

HostConversion to_host_float(const PositPattern& p)
{
    Decoded d = decode(p);
    if (d.is_nar()) {
        return {std::numeric_limits<double>::quiet_NaN(), false};
    }
    if (d.is_zero()) {
        return {0.0, true};
    }
    BigRational v = d.triple.to_rational();
    BinaryRounding r = round_to_binary(v, std::numeric_limits<double>::digits,
                                       std::numeric_limits<double>::min_exponent - std::numeric_limits<double>::digits);
    double out = v.to_double();
    return {out, r.exact && std::isfinite(out)};
}

PositPattern from_host_float(PositConfig cfg, double v)
{
    if (!std::isfinite(v)) {
        return PositPattern::nar(cfg);
    }
    return encode(cfg, BigRational::from_double(v));
}

}  // namespace positlab
