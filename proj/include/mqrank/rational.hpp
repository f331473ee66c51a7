#pragma once

// Exact rational arithmetic for the game core.
//
// Every finite decimal read from JSON or the command line is converted to the
// rational it denotes ("0.3" -> 3/10), so equality-at-peak comparisons never
// depend on binary floating point.

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "json.hpp"

namespace mqrank {

using Rational = mpq_class;

/// Parses "3/4", "-2", "0.45", "1e-3", "2.5E+2". Throws InputError.
Rational parse_rational(std::string_view text);

/// The rational denoted by the shortest decimal that round-trips to `value`.
/// 0.1 becomes 1/10, not the dyadic 3602879701896397/36028797018963968.
Rational rational_from_double(double value);

/// Canonical "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Exact decimal text when the expansion terminates, otherwise empty.
std::string terminating_decimal(const Rational& value);

/// Terminating decimal if there is one, otherwise "p/q". For messages.
std::string display(const Rational& value);

/// JSON number when the value round-trips through a double's shortest
/// decimal form, otherwise the "p/q" string.
nlohmann::json to_json(const Rational& value);

/// Accepts JSON numbers and strings in any form parse_rational understands.
Rational rational_from_json(const nlohmann::json& value);

inline Rational floor_div(const Rational& a) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
    return Rational(q);
}

}  // namespace mqrank
