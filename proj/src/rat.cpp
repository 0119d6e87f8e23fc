#include "fox/rat.hpp"

#include <stdexcept>

namespace fox {

std::string to_fraction(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const Rat& r) { return r.get_str(); }

std::string to_decimal(const Rat& r, int digits) {
  mpz_class scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  mpz_class num = r.get_num();
  bool negative = num < 0;
  if (negative) num = -num;
  // round half up on the magnitude
  mpz_class scaled = (num * scale * 2 + r.get_den()) / (r.get_den() * 2);
  mpz_class whole = scaled / scale;
  mpz_class frac = scaled % scale;
  std::string frac_str = frac.get_str();
  frac_str.insert(0, static_cast<std::size_t>(digits) - frac_str.size(), '0');
  std::string out = (negative && scaled != 0 ? "-" : "") + whole.get_str();
  if (digits > 0) out += "." + frac_str;
  return out;
}

Rat parse_rat(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto valid_int = [](const std::string& part, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && !part.empty() && part[0] == '-') i = 1;
    if (i >= part.size()) return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false))
    throw std::invalid_argument("malformed rational: " + s);
  mpz_class d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + s);
  Rat r(mpz_class(num), d);
  r.canonicalize();
  return r;
}

Rat rat_pow(const Rat& base, std::uint64_t exponent) {
  Rat result = 1;
  Rat b = base;
  while (exponent > 0) {
    if (exponent & 1U) result *= b;
    b *= b;
    exponent >>= 1U;
  }
  return result;
}

}  // namespace fox
