#include "positlab/validation.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "positlab/oracle.hpp"

namespace positlab {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

PositPattern next_up(const PositPattern& p)
{
    PatternWord w = p.bits();
    w.increment();
    return PositPattern(p.config(), w.masked(p.config().nbits));
}

PositPattern next_down(const PositPattern& p)
{
    PatternWord w = p.bits();
    for (unsigned i = 0; i < PatternWord::kLimbs; ++i) {
        if (w.limb(i)-- != 0) {
            break;
        }
    }
    return PositPattern(p.config(), w.masked(p.config().nbits));
}

void check_pair(BinaryOp op, const PositBinaryFn& fn, const PositPattern& a, const PositPattern& b,
                std::vector<Mismatch>& out)
{
    PositPattern expected = expected_result(op, a, b);
    PositPattern actual = fn(a, b);
    if (!(actual == expected)) {
        out.push_back({a, b, expected, actual});
    }
}

ValidationReport exhaustive_impl(PositConfig config, BinaryOp op, const PositBinaryFn& fn, bool parallel)
{
    if (config.nbits > kMaxExhaustiveBits) {
        throw std::invalid_argument("exhaustive_check: " + config.to_string() + " has more than " +
                                    std::to_string(kMaxExhaustiveBits) + " bits; use randomized mode");
    }
    auto t0 = Clock::now();
    const std::uint64_t count = std::uint64_t{1} << config.nbits;
    std::vector<PositPattern> patterns;
    std::vector<std::optional<BigRational>> values;
    for (std::uint64_t v = 0; v < count; ++v) {
        patterns.push_back(PositPattern::from_bits(config, v));
        values.push_back(value_of(patterns.back()));
    }
    auto oracle = enumeration_oracle(config);
    std::vector<std::vector<Mismatch>> rows(count);
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& a = patterns[static_cast<std::size_t>(i)];
        const auto& va = values[static_cast<std::size_t>(i)];
        for (std::uint64_t j = 0; j < count; ++j) {
            const auto& b = patterns[j];
            const auto& vb = values[j];
            PositPattern expected;
            if (!va || !vb || (op == BinaryOp::Div && vb->is_zero())) {
                expected = PositPattern::nar(config);
            } else {
                BigRational r;
                switch (op) {
                case BinaryOp::Add:
                    r = *va + *vb;
                    break;
                case BinaryOp::Sub:
                    r = *va - *vb;
                    break;
                case BinaryOp::Mul:
                    r = *va * *vb;
                    break;
                case BinaryOp::Div:
                    r = *va / *vb;
                    break;
                }
                expected = oracle->round(r);
            }
            PositPattern actual = fn(a, b);
            if (!(actual == expected)) {
                rows[static_cast<std::size_t>(i)].push_back({a, b, expected, actual});
            }
        }
    }
    ValidationReport rep;
    rep.config = config;
    rep.op = to_string(op);
    rep.cases = count * count;
    for (auto& r : rows) {
        rep.mismatches.insert(rep.mismatches.end(), r.begin(), r.end());
    }
    rep.seconds = since(t0);
    return rep;
}

}  // namespace

const char* to_string(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Add:
        return "add";
    case BinaryOp::Sub:
        return "sub";
    case BinaryOp::Mul:
        return "mul";
    case BinaryOp::Div:
        return "div";
    }
    return "?";
}

BinaryOp parse_op(std::string_view name)
{
    for (BinaryOp op : {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div}) {
        if (name == to_string(op)) {
            return op;
        }
    }
    throw std::invalid_argument("unknown operation '" + std::string(name) + "' (expected add, sub, mul or div)");
}

const char* to_string(ArithPath p)
{
    switch (p) {
    case ArithPath::Generic:
        return "generic";
    case ArithPath::Fast:
        return "fast";
    case ArithPath::Auto:
        return "auto";
    }
    return "?";
}

ArithPath parse_path(std::string_view name)
{
    for (ArithPath p : {ArithPath::Generic, ArithPath::Fast, ArithPath::Auto}) {
        if (name == to_string(p)) {
            return p;
        }
    }
    throw std::invalid_argument("unknown arithmetic path '" + std::string(name) + "' (expected generic, fast or auto)");
}

PositBinaryFn op_function(BinaryOp op, ArithPath path)
{
    using F = ArithResult (*)(const PositPattern&, const PositPattern&);
    static constexpr F table[3][4] = {{add, sub, mul, div},
                                      {fast_add, fast_sub, fast_mul, fast_div},
                                      {auto_add, auto_sub, auto_mul, auto_div}};
    F f = table[static_cast<int>(path)][static_cast<int>(op)];
    return [f](const PositPattern& a, const PositPattern& b) { return f(a, b).pattern; };
}

PositPattern expected_result(BinaryOp op, const PositPattern& a, const PositPattern& b)
{
    const PositConfig c = a.config();
    auto va = value_of(a);
    auto vb = value_of(b);
    if (!va || !vb || (op == BinaryOp::Div && vb->is_zero())) {
        return PositPattern::nar(c);
    }
    switch (op) {
    case BinaryOp::Add:
        return oracle_round(c, *va + *vb);
    case BinaryOp::Sub:
        return oracle_round(c, *va - *vb);
    case BinaryOp::Mul:
        return oracle_round(c, *va * *vb);
    case BinaryOp::Div:
        return oracle_round(c, *va / *vb);
    }
    return PositPattern::nar(c);
}

void ValidationReport::write(std::ostream& out, bool timing) const
{
    for (const auto& m : mismatches) {
        out << "MISMATCH op=" << op << " a=" << m.a.hex() << " b=" << (m.b ? m.b->hex() : std::string("-"))
            << " expected=" << m.expected.hex() << " actual=" << m.actual.hex() << "\n";
    }
    out << (pass() ? "PASS " : "FAIL ") << config.to_string() << " " << op << " " << cases << " " << mismatches.size();
    if (timing) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", seconds);
        out << " " << buf;
    }
    out << "\n";
}

std::string ValidationReport::to_string(bool timing) const
{
    std::ostringstream os;
    write(os, timing);
    return os.str();
}

std::vector<EnumEntry> enumerate(PositConfig config)
{
    if (config.nbits > kMaxEnumerateBits) {
        throw std::invalid_argument("enumerate: " + config.to_string() + " has 2^" + std::to_string(config.nbits) +
                                    " patterns (limit 2^" + std::to_string(kMaxEnumerateBits) +
                                    "); use randomized mode instead");
    }
    const std::uint64_t count = std::uint64_t{1} << config.nbits;
    const std::uint64_t half = count / 2;
    std::vector<EnumEntry> out;
    out.reserve(count);
    // two's complement order: 10..0 (NaR) up to 11..1, then 0 up to 01..1
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t bits = (i + half) & (count - 1);
        PositPattern p = PositPattern::from_bits(config, bits);
        out.push_back({p, value_of(p)});
    }
    return out;
}

ValidationReport exhaustive_check(PositConfig config, BinaryOp op, const PositBinaryFn& fn)
{
    return exhaustive_impl(config, op, fn, true);
}

ValidationReport exhaustive_check(PositConfig config, BinaryOp op, ArithPath path)
{
    return exhaustive_impl(config, op, op_function(op, path), true);
}

ValidationReport exhaustive_check_serial(PositConfig config, BinaryOp op, const PositBinaryFn& fn)
{
    return exhaustive_impl(config, op, fn, false);
}

ValidationReport embedding_check(PositConfig config)
{
    if (config.nbits > kMaxEmbeddingBits) {
        throw std::invalid_argument("embedding_check: " + config.to_string() + " has more than " +
                                    std::to_string(kMaxEmbeddingBits) + " bits");
    }
    auto t0 = Clock::now();
    const PositConfig wide(config.nbits + 1, config.es);
    auto small = enumerate(config);
    auto big = enumerate(wide);
    std::vector<std::pair<BigRational, PositPattern>> big_values;
    for (const auto& e : big) {
        if (e.value) {
            big_values.emplace_back(*e.value, e.pattern);
        }
    }
    std::sort(big_values.begin(), big_values.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    ValidationReport rep;
    rep.config = config;
    rep.op = "embed";
    rep.cases = small.size();
    for (const auto& e : small) {
        PositPattern up = embed(e.pattern);
        std::optional<PositPattern> in_wide;
        if (!e.value) {
            in_wide = PositPattern::nar(wide);
        } else {
            auto it = std::lower_bound(big_values.begin(), big_values.end(), *e.value,
                                       [](const auto& x, const BigRational& v) { return x.first < v; });
            if (it != big_values.end() && it->first == *e.value) {
                in_wide = it->second;
            }
        }
        bool ok = in_wide.has_value() && up == *in_wide && value_of(up) == e.value;
        if (!ok) {
            rep.mismatches.push_back({e.pattern, std::nullopt, in_wide.value_or(PositPattern::nar(wide)), up});
        }
    }
    rep.seconds = since(t0);
    return rep;
}

std::vector<PositPattern> boundary_patterns(PositConfig config)
{
    std::vector<PositPattern> base;
    base.push_back(PositPattern::zero(config));
    base.push_back(PositPattern::minpos(config));
    base.push_back(PositPattern::maxpos(config));
    PositPattern one = encode(config, BigRational(1));
    base.push_back(one);
    base.push_back(next_up(one));
    base.push_back(next_down(one));
    const std::int64_t kmax = std::min<std::int64_t>(24, static_cast<std::int64_t>(config.nbits) - 2);
    const auto step = static_cast<std::int64_t>(config.regime_step());
    for (std::int64_t k = -kmax; k <= kmax; ++k) {
        PositPattern p = encode(config, BigRational::dyadic(BigInt(1), k * step));
        base.push_back(p);
        base.push_back(next_up(p));
        if (!p.is_zero()) {
            base.push_back(next_down(p));
        }
    }
    std::vector<PositPattern> out;
    out.push_back(PositPattern::nar(config));
    for (const auto& p : base) {
        if (p.is_nar() || p.sign_bit()) {
            continue;
        }
        out.push_back(p);
        out.push_back(negate(p));
    }
    std::sort(out.begin(), out.end(),
              [](const PositPattern& x, const PositPattern& y) { return x.bits() < y.bits(); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ValidationReport randomized_check(PositConfig config, BinaryOp op, const PositBinaryFn& fn, std::uint64_t trials,
                                  std::uint64_t seed)
{
    if (trials < 1) {
        throw std::invalid_argument("randomized_check: trials must be at least 1");
    }
    auto t0 = Clock::now();
    const auto boundary = boundary_patterns(config);
    const PositPattern one = encode(config, BigRational(1));
    const std::vector<PositPattern> core{PositPattern::zero(config),    PositPattern::nar(config),
                                         one,                           negate(one),
                                         PositPattern::minpos(config),  negate(PositPattern::minpos(config)),
                                         PositPattern::maxpos(config),  negate(PositPattern::maxpos(config))};
    ValidationReport rep;
    rep.config = config;
    rep.op = to_string(op);
    for (const auto& b : boundary) {
        const bool b_in_core = std::find(core.begin(), core.end(), b) != core.end();
        for (const auto& c : core) {
            check_pair(op, fn, b, c, rep.mismatches);
            ++rep.cases;
            // core x core pairs are already covered in the first order
            if (!b_in_core) {
                check_pair(op, fn, c, b, rep.mismatches);
                ++rep.cases;
            }
        }
    }
    std::mt19937_64 rng(seed);
    auto draw = [&]() {
        if (rng() % 4 == 0) {
            return boundary[rng() % boundary.size()];
        }
        PatternWord w;
        for (unsigned i = 0; i < PatternWord::kLimbs; ++i) {
            w.limb(i) = rng();
        }
        return PositPattern(config, w.masked(config.nbits));
    };
    for (std::uint64_t t = 0; t < trials; ++t) {
        PositPattern a = draw();
        PositPattern b = draw();
        check_pair(op, fn, a, b, rep.mismatches);
        ++rep.cases;
    }
    rep.seconds = since(t0);
    return rep;
}

ValidationReport randomized_check(PositConfig config, BinaryOp op, std::uint64_t trials, std::uint64_t seed,
                                  ArithPath path)
{
    return randomized_check(config, op, op_function(op, path), trials, seed);
}

ValidationReport conversion_check(PositConfig config)
{
    auto t0 = Clock::now();
    ValidationReport rep;
    rep.config = config;
    rep.op = "convert";
    for (const auto& p : boundary_patterns(config)) {
        ++rep.cases;
        HostConversion h = to_host_float(p);
        PositPattern back = from_host_float(config, h.value);
        auto v = value_of(p);
        bool representable = v && std::isfinite(h.value) && BigRational::from_double(h.value) == *v;
        bool ok = h.exact == representable && (!representable || back == p);
        if (p.is_nar()) {
            ok = !h.exact && std::isnan(h.value) && back.is_nar();
        }
        if (!ok) {
            rep.mismatches.push_back({p, std::nullopt, p, back});
        }
    }
    rep.seconds = since(t0);
    return rep;
}

PositBinaryFn inject_fault(PositBinaryFn fn, PositPattern a, PositPattern b)
{
    return [fn = std::move(fn), a, b](const PositPattern& x, const PositPattern& y) {
        PositPattern r = fn(x, y);
        return (x == a && y == b) ? next_up(r) : r;
    };
}

}  // namespace positlab
