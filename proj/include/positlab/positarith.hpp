#pragma once

#include <compare>
#include <stdexcept>

#include "positlab/positcore.hpp"

namespace positlab {

struct ArithResult {
    PositPattern pattern;
    bool exact = true;  ///< the infinite-precision result is representable
};

/// Raised by operations that are not available for a configuration.
class UnsupportedConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Generic path: decode to exact triples, compute the exact result, round once.
// NaR absorbs; x / 0 = NaR; operands must share one config.

ArithResult add(const PositPattern& a, const PositPattern& b);
ArithResult sub(const PositPattern& a, const PositPattern& b);
ArithResult mul(const PositPattern& a, const PositPattern& b);
ArithResult div(const PositPattern& a, const PositPattern& b);

/// Two's complement integer order of the raw patterns. NaR sorts below every
/// real value; for real operands this is the value order.
std::strong_ordering compare(const PositPattern& a, const PositPattern& b);

// Integer-specialized paths for posit<8,0>, posit<16,1>, posit<32,2>, posit<64,3>.
// Bit-identical to the generic path. Throw UnsupportedConfig for other configs.

bool has_fast_path(PositConfig config);
ArithResult fast_add(const PositPattern& a, const PositPattern& b);
ArithResult fast_sub(const PositPattern& a, const PositPattern& b);
ArithResult fast_mul(const PositPattern& a, const PositPattern& b);
ArithResult fast_div(const PositPattern& a, const PositPattern& b);

/// Fast path when the config has one, otherwise the generic path.
ArithResult auto_add(const PositPattern& a, const PositPattern& b);
ArithResult auto_sub(const PositPattern& a, const PositPattern& b);
ArithResult auto_mul(const PositPattern& a, const PositPattern& b);
ArithResult auto_div(const PositPattern& a, const PositPattern& b);

// Elementary functions by conversion through the host's widest binary float
// (long double) and back. Faithful to about one ulp, NOT correctly rounded.
// Out-of-domain arguments give NaR. nbits > 64 throws UnsupportedConfig.

PositPattern exp(const PositPattern& x);
PositPattern log(const PositPattern& x);
PositPattern sin(const PositPattern& x);
PositPattern cos(const PositPattern& x);
PositPattern sqrt(const PositPattern& x);

}  // namespace positlab
