#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace harmonic {

// Exact rational carrier for every closed-form quantity in the library.
// cpp_rational keeps values reduced with a positive denominator, so
// operator== is structural equality. to_double() is the single crossing
// point into floating point; nothing upstream of it rounds.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline double to_double(const Rat& x) { return x.convert_to<double>(); }

// base^e with integer e of either sign. Throws std::domain_error on 0^negative.
Rat pow_rat(const Rat& base, long long e);

// Accepts "3", "-7", "2/5", "-11/4" and finite decimals like "0.4" (exactly 2/5).
// Throws std::invalid_argument on anything else, including zero denominators.
Rat parse_rat(const std::string& text);

// Canonical text form: "p" for integers, "p/q" otherwise, q > 0.
std::string format_rat(const Rat& x);

}  // namespace harmonic
