#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace mcmtlg
{

inline constexpr int max_fan_in = 16;

/// Relative tolerance under which branch currents count as equal.
inline constexpr double tie_epsilon = 1e-9;

struct VoltageLevels
{
  double v_dd = 0.65;  ///< read supply of the differential branches
  double v_high = 0.9; ///< clock / input logic-high
  double v_low = 0.0;

  void validate( double v_prog_threshold = 1.0 ) const
  {
    if ( !( v_low < v_dd ) || !( v_dd < v_high ) )
      throw PreconditionError( "levels: require v_low < v_dd < v_high" );
    if ( !( v_dd < v_prog_threshold ) )
      throw PreconditionError( "levels: v_dd would program the memristors" );
  }

  bool operator==( VoltageLevels const& ) const = default;
};

/// Which side wins when both branches carry the same current.
enum class TieRule
{
  input_wins,
  threshold_wins
};

inline std::string to_string( TieRule r ) { return r == TieRule::input_wins ? "InputWins" : "ThresholdWins"; }

/*! \brief One memristive current-mode threshold gate.

  `inputs` holds the input-branch memristances M1..Mn, `thresholds` the
  threshold-branch memristances TH1..THm. Threshold elements sit in parallel and
  are always conducting unless `threshold_active` is given explicitly.
*/
struct GateConfig
{
  std::vector<double> inputs;
  std::vector<double> thresholds;
  VoltageLevels levels{};
  TieRule tie_rule = TieRule::input_wins;
  /// empty = every threshold element active
  std::vector<bool> threshold_active{};

  std::size_t num_inputs() const { return inputs.size(); }

  void validate() const
  {
    if ( inputs.empty() )
      throw PreconditionError( "gate: at least one input memristance required" );
    if ( thresholds.empty() )
      throw PreconditionError( "gate: at least one threshold memristance required" );
    if ( inputs.size() > static_cast<std::size_t>( max_fan_in ) )
      throw PreconditionError( "gate: fan-in above " + std::to_string( max_fan_in ) );
    auto positive = []( double r ) { return r > 0.0 && std::isfinite( r ); };
    if ( !std::all_of( inputs.begin(), inputs.end(), positive ) ||
         !std::all_of( thresholds.begin(), thresholds.end(), positive ) )
      throw PreconditionError( "gate: memristances must be positive" );
    if ( !threshold_active.empty() && threshold_active.size() != thresholds.size() )
      throw DimensionError( "gate: threshold_active length differs from threshold count" );
  }

  double input_conductance( std::size_t i ) const { return 1.0 / inputs[i]; }

  /// Total conductance of the (active) threshold branch.
  double threshold_conductance() const
  {
    double g = 0.0;
    for ( std::size_t j = 0; j < thresholds.size(); ++j )
      if ( threshold_active.empty() || threshold_active[j] )
        g += 1.0 / thresholds[j];
    return g;
  }

  /// Every memristance multiplied by `lambda`.
  GateConfig scaled( double lambda ) const
  {
    auto c = *this;
    for ( auto& r : c.inputs )
      r *= lambda;
    for ( auto& r : c.thresholds )
      r *= lambda;
    return c;
  }

  bool operator==( GateConfig const& ) const = default;
};

/// Logical input vector; bit i drives input memristor M(i+1).
class InputVector
{
public:
  InputVector() = default;
  explicit InputVector( std::vector<std::uint8_t> bits ) : bits_( std::move( bits ) )
  {
    for ( auto b : bits_ )
      if ( b > 1 )
        throw PreconditionError( "input vector bits must be 0 or 1" );
  }

  /// Row `index` of an n-input table; x1 is the most significant bit.
  static InputVector from_index( std::uint32_t index, std::size_t n )
  {
    std::vector<std::uint8_t> bits( n );
    for ( std::size_t i = 0; i < n; ++i )
      bits[i] = ( index >> ( n - 1 - i ) ) & 1u;
    return InputVector( std::move( bits ) );
  }

  std::uint32_t index() const
  {
    std::uint32_t k = 0;
    for ( auto b : bits_ )
      k = ( k << 1 ) | b;
    return k;
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[]( std::size_t i ) const { return bits_[i] != 0; }
  std::vector<std::uint8_t> const& bits() const { return bits_; }

  std::string to_string() const
  {
    std::string s;
    for ( auto b : bits_ )
      s.push_back( b ? '1' : '0' );
    return s;
  }

  bool operator==( InputVector const& ) const = default;

private:
  std::vector<std::uint8_t> bits_;
};

struct BranchCurrents
{
  double i_in;
  double i_th;
};

struct GateOutput
{
  int ca;
  int co;
  bool tie; ///< currents equal within tie_epsilon; decided by the tie rule

  bool operator==( GateOutput const& ) const = default;
};

inline BranchCurrents branch_currents( GateConfig const& config, InputVector const& input )
{
  if ( input.size() != config.num_inputs() )
    throw DimensionError( "input vector has " + std::to_string( input.size() ) + " bits, gate has " +
                          std::to_string( config.num_inputs() ) + " inputs" );
  double g_in = 0.0;
  for ( std::size_t i = 0; i < input.size(); ++i )
    if ( input[i] )
      g_in += config.input_conductance( i );
  double const v = config.levels.v_dd;
  return { v * g_in, v * config.threshold_conductance() };
}

/// Sense-amplifier decision on a pair of currents (or conductance sums).
inline GateOutput compare( double in, double th, TieRule rule )
{
  double const scale = std::max( std::abs( in ), std::abs( th ) );
  bool const tie = std::abs( in - th ) <= tie_epsilon * scale;
  int const ca = tie ? ( rule == TieRule::input_wins ) : ( in > th );
  return { ca, 1 - ca, tie };
}

inline GateOutput evaluate( GateConfig const& config, InputVector const& input )
{
  auto const c = branch_currents( config, input );
  return compare( c.i_in, c.i_th, config.tie_rule );
}

/// n-input Boolean function; outputs[k] is the value at InputVector::from_index(k, n).
struct TruthTable
{
  std::size_t n = 0;
  std::vector<std::uint8_t> outputs;

  TruthTable() = default;
  TruthTable( std::size_t n, std::vector<std::uint8_t> outs ) : n( n ), outputs( std::move( outs ) )
  {
    if ( n > static_cast<std::size_t>( max_fan_in ) )
      throw PreconditionError( "truth table: too many inputs" );
    if ( outputs.size() != ( std::size_t{ 1 } << n ) )
      throw DimensionError( "truth table: length must be 2^n" );
  }

  std::size_t rows() const { return outputs.size(); }
  bool operator[]( std::size_t k ) const { return outputs[k] != 0; }

  TruthTable complement() const
  {
    auto t = *this;
    for ( auto& b : t.outputs )
      b ^= 1u;
    return t;
  }

  /// Bitstring with the all-ones row first (MSB) and the all-zeros row last.
  std::string to_bitstring() const
  {
    std::string s;
    for ( auto k = rows(); k-- > 0; )
      s.push_back( outputs[k] ? '1' : '0' );
    return s;
  }

  static TruthTable from_bitstring( std::string const& s )
  {
    std::size_t n = 0;
    while ( ( std::size_t{ 1 } << n ) < s.size() )
      ++n;
    if ( s.empty() || ( std::size_t{ 1 } << n ) != s.size() )
      throw PreconditionError( "truth table bitstring length must be a power of two" );
    std::vector<std::uint8_t> outs( s.size() );
    for ( std::size_t i = 0; i < s.size(); ++i )
    {
      if ( s[i] != '0' && s[i] != '1' )
        throw PreconditionError( "truth table bitstring may only contain 0 and 1" );
      outs[s.size() - 1 - i] = s[i] == '1';
    }
    return TruthTable( n, std::move( outs ) );
  }

  bool operator==( TruthTable const& ) const = default;
};

inline TruthTable truth_table( GateConfig const& config )
{
  config.validate();
  auto const n = config.num_inputs();
  std::vector<std::uint8_t> outs( std::size_t{ 1 } << n );
  for ( std::uint32_t k = 0; k < outs.size(); ++k )
    outs[k] = evaluate( config, InputVector::from_index( k, n ) ).ca;
  return TruthTable( n, std::move( outs ) );
}

enum class GateKind
{
  constant_zero,
  constant_one,
  and_gate,
  or_gate,
  nand_gate,
  nor_gate,
  majority,
  dictator,
  other_threshold,
  non_monotone
};

struct GateClass
{
  GateKind kind;
  int param = 0; ///< k of MAJ-k, 0-based variable of a dictator

  bool operator==( GateClass const& ) const = default;
};

inline std::string to_string( GateClass const& c, std::size_t n = 0 )
{
  switch ( c.kind )
  {
  case GateKind::constant_zero:
    return "CONST0";
  case GateKind::constant_one:
    return "CONST1";
  case GateKind::and_gate:
    return n ? "AND (MAJ-" + std::to_string( n ) + ")" : "AND";
  case GateKind::or_gate:
    return "OR (MAJ-1)";
  case GateKind::nand_gate:
    return "NAND";
  case GateKind::nor_gate:
    return "NOR";
  case GateKind::majority:
    return "MAJ-" + std::to_string( c.param );
  case GateKind::dictator:
    return "DICT(x" + std::to_string( c.param + 1 ) + ")";
  case GateKind::other_threshold:
    return "OTHER_MONOTONE";
  case GateKind::non_monotone:
    return "NON_MONOTONE";
  }
  return "?";
}

/// True iff raising any input from 0 to 1 never lowers the output.
inline bool is_monotone( TruthTable const& tt )
{
  for ( std::size_t k = 0; k < tt.rows(); ++k )
    for ( std::size_t i = 0; i < tt.n; ++i )
      if ( !( k & ( std::size_t{ 1 } << i ) ) && tt[k] && !tt[k | ( std::size_t{ 1 } << i )] )
        return false;
  return true;
}

/*! \brief Names a truth table.

  Constants come first, then the symmetric families (AND = MAJ-n, OR = MAJ-1,
  MAJ-k in between, NAND, NOR), then single-variable dictators. Anything else
  monotone is reported as `other_threshold`; note that this tag does not prove
  linear separability (see synth::check_separability for that).
  For n = 1 the identity is reported as a dictator and negation as NOR.
*/
inline GateClass classify( TruthTable const& tt )
{
  auto const rows = tt.rows();
  auto const ones = std::count( tt.outputs.begin(), tt.outputs.end(), std::uint8_t{ 1 } );
  if ( ones == 0 )
    return { GateKind::constant_zero };
  if ( static_cast<std::size_t>( ones ) == rows )
    return { GateKind::constant_one };

  if ( tt.n == 1 )
    return tt[1] ? GateClass{ GateKind::dictator, 0 } : GateClass{ GateKind::nor_gate };

  // symmetric: output depends on popcount only
  std::vector<int> by_weight( tt.n + 1, -1 );
  bool symmetric = true;
  for ( std::size_t k = 0; k < rows && symmetric; ++k )
  {
    auto const w = std::popcount( k );
    if ( by_weight[w] == -1 )
      by_weight[w] = tt[k];
    else if ( by_weight[w] != static_cast<int>( tt[k] ) )
      symmetric = false;
  }
  if ( symmetric )
  {
    // threshold at k: 0 below, 1 from k on
    for ( std::size_t k = 1; k <= tt.n; ++k )
    {
      bool match = true;
      for ( std::size_t w = 0; w <= tt.n; ++w )
        match = match && ( by_weight[w] == ( w >= k ? 1 : 0 ) );
      if ( match )
      {
        if ( k == 1 )
          return { GateKind::or_gate, 1 };
        if ( k == tt.n )
          return { GateKind::and_gate, static_cast<int>( k ) };
        return { GateKind::majority, static_cast<int>( k ) };
      }
    }
    bool nand = by_weight[tt.n] == 0, nor = by_weight[0] == 1;
    for ( std::size_t w = 0; w < tt.n; ++w )
      nand = nand && by_weight[w] == 1;
    for ( std::size_t w = 1; w <= tt.n; ++w )
      nor = nor && by_weight[w] == 0;
    if ( nand )
      return { GateKind::nand_gate };
    if ( nor )
      return { GateKind::nor_gate };
  }

  for ( std::size_t i = 0; i < tt.n; ++i )
  {
    bool dict = true;
    for ( std::size_t k = 0; k < rows && dict; ++k )
      dict = tt[k] == static_cast<bool>( ( k >> ( tt.n - 1 - i ) ) & 1u );
    if ( dict )
      return { GateKind::dictator, static_cast<int>( i ) };
  }

  return is_monotone( tt ) ? GateClass{ GateKind::other_threshold } : GateClass{ GateKind::non_monotone };
}

/// Decision hyperplane sum_i a_i g_i = g_T over relaxed activations a in [0,1]^n.
struct Hyperplane
{
  std::vector<double> g;
  double g_t;
};

inline Hyperplane hyperplane( GateConfig const& config )
{
  config.validate();
  Hyperplane h{ {}, config.threshold_conductance() };
  for ( std::size_t i = 0; i < config.num_inputs(); ++i )
    h.g.push_back( config.input_conductance( i ) );
  return h;
}

/*! \brief Classification of a regular grid over the relaxed input space.

  Axis values are a = j / (resolution - 1). Cells are stored row-major with
  the first input as the slowest axis.
*/
struct BoundaryGrid
{
  std::size_t n;
  std::size_t resolution;
  std::vector<std::uint8_t> cells;
  Hyperplane plane;

  double axis_value( std::size_t j ) const { return static_cast<double>( j ) / static_cast<double>( resolution - 1 ); }

  std::uint8_t at( std::vector<std::size_t> const& idx ) const
  {
    std::size_t flat = 0;
    for ( auto j : idx )
      flat = flat * resolution + j;
    return cells[flat];
  }
};

inline BoundaryGrid boundary_grid( GateConfig const& config, std::size_t resolution )
{
  config.validate();
  auto const n = config.num_inputs();
  if ( n != 2 && n != 3 )
    throw PreconditionError( "boundary grid export supports 2 or 3 inputs; use hyperplane() above that" );
  if ( resolution < 2 || resolution > 4096 )
    throw PreconditionError( "boundary grid resolution must lie in [2, 4096]" );

  BoundaryGrid grid{ n, resolution, {}, hyperplane( config ) };
  std::size_t total = 1;
  for ( std::size_t i = 0; i < n; ++i )
    total *= resolution;
  grid.cells.resize( total );

  std::vector<std::size_t> idx( n, 0 );
  for ( std::size_t flat = 0; flat < total; ++flat )
  {
    double sum = 0.0;
    for ( std::size_t i = 0; i < n; ++i )
      sum += grid.axis_value( idx[i] ) * grid.plane.g[i];
    grid.cells[flat] = compare( sum, grid.plane.g_t, config.tie_rule ).ca;

    for ( auto i = n; i-- > 0; )
    {
      if ( ++idx[i] < resolution )
        break;
      idx[i] = 0;
    }
  }
  return grid;
}

} // namespace mcmtlg
