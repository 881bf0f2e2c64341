#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace bsynth {

using Rational = mpq_class;
using Integer = mpz_class;

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& q);

/// Accepts "p", "p/q" and plain decimals such as "0.05" (converted exactly).
Rational parse_rational(std::string_view text);

Rational abs(const Rational& q);

Integer lcm(const Integer& a, const Integer& b);

/// n^k as an exact integer.
Integer power(std::uint64_t n, std::uint64_t k);

/// n (n-1) ... (n-k+1); zero when k > n.
Integer falling_factorial(std::uint64_t n, std::uint64_t k);

Integer factorial(std::uint64_t n);

/// Nearest multiple of 1/grid, ties rounded away from zero.
Rational round_to_grid(const Rational& q, const Integer& grid);

/// Closest rational with denominator <= max_denominator.
Rational limit_denominator(const Rational& q, const Integer& max_denominator);

double to_double(const Rational& q);

}  // namespace bsynth
