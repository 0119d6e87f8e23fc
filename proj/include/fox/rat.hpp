#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace fox {

// Exact rational weights. mpq_class keeps values canonical as long as every
// construction goes through canonicalize(), which the helpers below do.
using Rat = mpq_class;

inline Rat make_rat(long num, unsigned long den = 1) {
  Rat r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

// "num/den", always with an explicit denominator ("1/1", "0/1").
std::string to_fraction(const Rat& r);

// Human form: "1/2", "1", "0".
std::string to_string(const Rat& r);

// Decimal approximation, only for display next to the exact value.
std::string to_decimal(const Rat& r, int digits = 6);

// Accepts "n", "n/d", "-n/d". Throws std::invalid_argument otherwise.
Rat parse_rat(std::string_view text);

inline bool in_unit_interval(const Rat& r) { return r >= 0 && r <= 1; }

Rat rat_pow(const Rat& base, std::uint64_t exponent);

}  // namespace fox
