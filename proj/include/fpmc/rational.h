#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace fpmc {

using Rational = mpq_class;

/// Parses "3", "-0.125", "1/8", "2.5e-3" into an exact rational.
/// Throws ParseError (column relative to the string) on malformed text.
Rational parse_rational(std::string_view text);

/// Exact rendering: a terminating decimal when the denominator only has the
/// prime factors 2 and 5, otherwise "p/q".
std::string to_string(Rational const& value);

/// Always "p/q" (or "p" for integers).
std::string to_fraction_string(Rational const& value);

double to_double(Rational const& value);

/// Approximate decimal rendering with the given number of fractional digits.
std::string to_fixed(double value, int digits);

/// Bit size of numerator plus denominator; used as a pivot cost.
std::size_t bit_size(Rational const& value);

}  // namespace fpmc
