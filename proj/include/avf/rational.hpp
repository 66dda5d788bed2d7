#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace avf {

/// Arbitrary-precision exact rational.
using Rational = boost::multiprecision::cpp_rational;

inline Rational factorial(int n) {
  Rational r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

/// Renders as "p/q" (always with a denominator, q > 0).
inline std::string to_pq(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational make_rational(std::int64_t p, std::int64_t q = 1) {
  return Rational(p) / Rational(q);
}

}  // namespace avf
