#pragma once

// Differential validation of posit arithmetic against the rational oracle.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "positlab/positarith.hpp"

namespace positlab {

enum class BinaryOp { Add, Sub, Mul, Div };

const char* to_string(BinaryOp op);
/// "add", "sub", "mul", "div"; throws std::invalid_argument otherwise.
BinaryOp parse_op(std::string_view name);

/// Which implementation is under test.
enum class ArithPath { Generic, Fast, Auto };

const char* to_string(ArithPath p);
ArithPath parse_path(std::string_view name);

using PositBinaryFn = std::function<PositPattern(const PositPattern&, const PositPattern&)>;

PositBinaryFn op_function(BinaryOp op, ArithPath path = ArithPath::Generic);

/// Correct result by definition: NaR operands or a zero divisor give NaR,
/// otherwise the exact rational result rounded by the oracle.
PositPattern expected_result(BinaryOp op, const PositPattern& a, const PositPattern& b);

struct Mismatch {
    PositPattern a;
    std::optional<PositPattern> b;  ///< absent for unary checks
    PositPattern expected;
    PositPattern actual;
};

struct ValidationReport {
    PositConfig config;
    std::string op;
    std::uint64_t cases = 0;
    std::vector<Mismatch> mismatches;
    double seconds = 0;

    bool pass() const { return mismatches.empty(); }
    /// One `MISMATCH op=.. a=.. b=.. expected=.. actual=..` line per failure,
    /// then `PASS|FAIL <config> <op> <cases> <mismatches> <seconds>`.
    /// Without timing the seconds field is omitted and the text is
    /// reproducible byte for byte.
    void write(std::ostream& out, bool timing = true) const;
    std::string to_string(bool timing = true) const;
};

struct EnumEntry {
    PositPattern pattern;
    std::optional<BigRational> value;  ///< nullopt for NaR
};

/// Largest configuration enumerate() accepts.
inline constexpr unsigned kMaxEnumerateBits = 20;
/// Largest configuration exhaustive_check() accepts.
inline constexpr unsigned kMaxExhaustiveBits = 10;
/// Largest configuration embedding_check() accepts.
inline constexpr unsigned kMaxEmbeddingBits = 12;

/// Every pattern with its exact value, in two's complement order (NaR first).
/// Throws std::invalid_argument above kMaxEnumerateBits.
std::vector<EnumEntry> enumerate(PositConfig config);

/// All 2^(2 nbits) operand pairs, rows distributed over OpenMP threads.
ValidationReport exhaustive_check(PositConfig config, BinaryOp op, const PositBinaryFn& fn);
ValidationReport exhaustive_check(PositConfig config, BinaryOp op, ArithPath path = ArithPath::Generic);
/// Single-threaded reference for exhaustive_check.
ValidationReport exhaustive_check_serial(PositConfig config, BinaryOp op, const PositBinaryFn& fn);

/// value(embed(p)) == value(p) for every p, and every value of the
/// configuration occurs in the enumeration of posit<nbits+1, es>.
ValidationReport embedding_check(PositConfig config);

/// Patterns always exercised by randomized_check: zero, NaR, +-minpos,
/// +-maxpos, +-1, the neighbours of +-1, and for every regime value useed^k
/// (|k| <= 24) the pattern of useed^k and its two neighbours, all negated as well.
/// Sorted by pattern, no duplicates.
std::vector<PositPattern> boundary_patterns(PositConfig config);

/// Every boundary pattern is paired with every element of the core set
/// {0, NaR, +-1, +-minpos, +-maxpos} in both operand orders (each pair once),
/// then `trials` seeded pairs follow. A quarter of random operands are drawn from the
/// boundary set, the rest uniformly from all patterns.
ValidationReport randomized_check(PositConfig config, BinaryOp op, const PositBinaryFn& fn, std::uint64_t trials,
                                  std::uint64_t seed);
ValidationReport randomized_check(PositConfig config, BinaryOp op, std::uint64_t trials, std::uint64_t seed,
                                  ArithPath path = ArithPath::Generic);

/// Host conversion on the boundary patterns: to_host_float must be flagged
/// exact exactly when binary64 holds the value, and exact values must come
/// back unchanged through from_host_float. Reported as op "convert"; a
/// mismatch lists the pattern as a and the round-tripped pattern as actual.
ValidationReport conversion_check(PositConfig config);

/// Wraps fn so that the single pair (a, b) returns the next pattern up.
PositBinaryFn inject_fault(PositBinaryFn fn, PositPattern a, PositPattern b);

}  // namespace positlab
