#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace selgames {

using BigInt =
    boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                  boost::multiprecision::et_off>;

// Exact arbitrary-precision rational, kept in lowest terms with a positive
// denominator by the backend - exactly the invariant the referee needs.
// Every scalar in the library (radii, measures, function values) goes
// through this type. No floating point anywhere. Expression templates are
// off so arithmetic composes with std::min/max and friends.
using Rat = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline BigInt rat_num(const Rat& r) { return numerator(r); }
inline BigInt rat_den(const Rat& r) { return denominator(r); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline BigInt int_pow2(unsigned d) { return BigInt(1) << d; }

// 1 / 2^d
inline Rat rat_pow2_inv(unsigned d) { return Rat(BigInt(1), int_pow2(d)); }

// True iff r has a power-of-two denominator (1 counts: 2^0).
inline bool rat_is_dyadic(const Rat& r) {
  const BigInt d = rat_den(r);
  return d == (BigInt(1) << boost::multiprecision::msb(d));
}

// Depth of a dyadic rational: the exponent of its reduced denominator.
inline unsigned dyadic_depth(const Rat& r) {
  return boost::multiprecision::msb(rat_den(r));
}

// floor(r * 2^d) as an integer; correct for negative values too.
inline BigInt floor_scaled(const Rat& r, unsigned d) {
  const BigInt n = rat_num(r) << d;
  const BigInt den = rat_den(r);
  BigInt q = n / den;
  if (n < 0 && q * den != n) --q;
  return q;
}

inline BigInt ceil_scaled(const Rat& r, unsigned d) {
  const BigInt n = rat_num(r) << d;
  const BigInt den = rat_den(r);
  BigInt q = n / den;
  if (n > 0 && q * den != n) ++q;
  return q;
}

inline std::string format_rat(const Rat& r) {
  std::string s = rat_num(r).str();
  s += '/';
  s += rat_den(r).str();
  return s;
}

std::optional<Rat> parse_rat(std::string_view s);

}  // namespace selgames
