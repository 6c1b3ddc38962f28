#pragma once

// Golden-value oracle: rounds exact rationals to any posit configuration using
// nothing but exact rational comparisons against representable values.

#include <memory>
#include <optional>
#include <vector>

#include "positlab/exactnum.hpp"
#include "positlab/positcore.hpp"

namespace positlab {

/// Value of an nbits-wide pattern read bit by bit from the posit value
/// equation; nullopt for NaR. Independent of positcore's decoder and valid
/// for any width (used at nbits + 1 to obtain rounding midpoints).
std::optional<BigRational> reference_value(const BigInt& bits, unsigned nbits, unsigned es);

/// Full enumeration of the positive half of a small configuration, with the
/// rounding boundary between each pair of neighbours.
///
/// The boundary between patterns p and p+1 is the value of pattern 2p+1 in
/// posit<nbits+1, es>; values strictly between round to the nearer side of it
/// and exact ties go to the even pattern.
class EnumerationOracle {
public:
    static constexpr unsigned kMaxNbits = 16;

    explicit EnumerationOracle(PositConfig config);

    PositPattern round(const BigRational& x) const;
    PositConfig config() const { return config_; }

    /// Values of patterns 1 .. 2^(nbits-1)-1, ascending.
    const std::vector<BigRational>& positive_values() const { return values_; }

private:
    PositConfig config_;
    std::vector<BigRational> values_;
    std::vector<BigRational> boundaries_;  // boundaries_[i] sits between values_[i] and values_[i+1]
};

/// Shared, lazily built enumeration table (thread-safe).
std::shared_ptr<const EnumerationOracle> enumeration_oracle(PositConfig config);

/// Enumeration path; requires nbits <= EnumerationOracle::kMaxNbits.
PositPattern oracle_round_enumerated(PositConfig config, const BigRational& x);
/// Bisection over the pattern order using reference_value; any nbits.
PositPattern oracle_round_bisect(PositConfig config, const BigRational& x);
/// Enumeration for nbits <= 10, bisection above.
PositPattern oracle_round(PositConfig config, const BigRational& x);

}  // namespace positlab
