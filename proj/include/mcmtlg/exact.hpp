#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace mcmtlg
{

/// Arbitrary-precision rational; every finite double converts exactly.
using Rational = boost::multiprecision::cpp_rational;

inline Rational to_rational( double v ) { return Rational( v ); }

inline double to_double( Rational const& r ) { return r.convert_to<double>(); }

} // namespace mcmtlg
