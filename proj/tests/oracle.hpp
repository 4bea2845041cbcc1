#pragma once

// Test-only reference models. They share nothing with the library's
// evaluation path: conductance sums are built from exact rationals and the
// truth table is enumerated directly.

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle
{

using Q = boost::multiprecision::cpp_rational;

/// Exact CA value: 1 iff S(x) > g_T, or S(x) within relative 1e-9 of g_T and
/// input_wins. The band is evaluated exactly, not in floating point.
inline int gate_output( std::vector<double> const& m, std::vector<double> const& th, std::uint32_t row,
                        bool input_wins )
{
  auto const n = m.size();
  Q s = 0, t = 0;
  for ( std::size_t i = 0; i < n; ++i )
    if ( ( row >> ( n - 1 - i ) ) & 1u )
      s += Q( 1 ) / Q( m[i] );
  for ( auto r : th )
    t += Q( 1 ) / Q( r );
  Q diff = s - t;
  if ( diff < 0 )
    diff = -diff;
  Q const scale = s > t ? s : t;
  bool const tie = diff * Q( 1000000000 ) <= scale; // |s - t| <= 1e-9 * max
  if ( tie )
    return input_wins ? 1 : 0;
  return s > t ? 1 : 0;
}

inline std::vector<std::uint8_t> truth_table( std::vector<double> const& m, std::vector<double> const& th,
                                              bool input_wins )
{
  std::vector<std::uint8_t> out;
  for ( std::uint32_t k = 0; k < ( 1u << m.size() ); ++k )
    out.push_back( static_cast<std::uint8_t>( gate_output( m, th, k, input_wins ) ) );
  return out;
}

/// Whether a table is realizable as [sum w_i x_i >= T] with small integer
/// weights 0..wmax and threshold 1..n*wmax, by exhaustive search.
inline bool integer_threshold_realizable( std::vector<std::uint8_t> const& tt, std::size_t n, int wmax )
{
  std::vector<int> w( n, 0 );
  for ( ;; )
  {
    for ( int t = 1; t <= static_cast<int>( n ) * wmax + 1; ++t )
    {
      bool ok = true;
      for ( std::uint32_t k = 0; k < tt.size() && ok; ++k )
      {
        int s = 0;
        for ( std::size_t i = 0; i < n; ++i )
          if ( ( k >> ( n - 1 - i ) ) & 1u )
            s += w[i];
        ok = ( s >= t ) == ( tt[k] != 0 );
      }
      if ( ok )
        return true;
    }
    std::size_t i = 0;
    while ( i < n && ++w[i] > wmax )
      w[i++] = 0;
    if ( i == n )
      return false;
  }
}

} // namespace oracle
