#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "device.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "gate.hpp"
#include "simplex.hpp"

namespace mcmtlg
{

inline constexpr std::size_t max_synth_inputs = 10;

struct SynthesisSpec
{
  TruthTable target;
  DeviceModel device = DeviceModel::kohm_profile();
  TieRule tie_rule = TieRule::input_wins;
  double min_margin_rel = 0.05;
};

/// Why a function cannot be realized by a single positive-weight gate.
struct InfeasibilityWitness
{
  enum class Kind
  {
    zero_input_true,    ///< f(0...0) = 1 although no input current flows
    monotonicity,       ///< x <= y componentwise, f(x) = 1, f(y) = 0
    asummable,          ///< two true points and two false points with equal sums
    no_positive_margin  ///< margin LP optimum <= 0
  };

  Kind kind;
  std::vector<InputVector> true_points;
  std::vector<InputVector> false_points;

  std::string describe() const
  {
    auto join = []( std::vector<InputVector> const& v ) {
      std::string s;
      for ( auto const& x : v )
        s += ( s.empty() ? "" : "&" ) + x.to_string();
      return s;
    };
    switch ( kind )
    {
    case Kind::zero_input_true:
      return "f(" + true_points[0].to_string() + ")=1 but the all-zero input carries no current";
    case Kind::monotonicity:
      return "non-monotone: f(" + true_points[0].to_string() + ")=1 but f(" + false_points[0].to_string() +
             ")=0 with " + true_points[0].to_string() + " <= " + false_points[0].to_string();
    case Kind::asummable:
      return "asummable: true " + join( true_points ) + " and false " + join( false_points ) +
             " have equal input sums";
    case Kind::no_positive_margin:
      return "no positive weights separate the true rows from the false rows";
    }
    return {};
  }
};

struct SeparabilityResult
{
  bool feasible = false;
  std::optional<InfeasibilityWitness> witness;
  /// when feasible: input weights with the threshold normalized to 1
  std::vector<double> weights;
};

struct VerifyReport
{
  bool pass = false;
  /// signed relative current margin per row; negative where the row is wrong
  std::vector<double> margins;
  double worst_margin = 0.0;
  std::optional<std::size_t> first_mismatch;
};

/*! \brief Re-evaluates a gate against a target with exact rational arithmetic.

  Conductance sums are formed from the exact values of the stored doubles, so
  only analytically equal sums count as ties. The margin of row x is
  (S(x) - g_T) / g_T for true rows and (g_T - S(x)) / g_T for false rows.
*/
inline VerifyReport verify( GateConfig const& config, TruthTable const& target )
{
  config.validate();
  if ( target.n != config.num_inputs() )
    throw DimensionError( "verify: gate and target input counts differ" );

  std::vector<Rational> g;
  for ( auto r : config.inputs )
    g.push_back( 1 / to_rational( r ) );
  Rational g_t = 0;
  for ( std::size_t j = 0; j < config.thresholds.size(); ++j )
    if ( config.threshold_active.empty() || config.threshold_active[j] )
      g_t += 1 / to_rational( config.thresholds[j] );

  VerifyReport rep;
  rep.pass = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for ( std::size_t k = 0; k < target.rows(); ++k )
  {
    Rational s = 0;
    for ( std::size_t i = 0; i < target.n; ++i )
      if ( ( k >> ( target.n - 1 - i ) ) & 1u )
        s += g[i];
    bool const out = s > g_t || ( s == g_t && config.tie_rule == TieRule::input_wins );
    double margin = g_t == 0 ? ( target[k] ? 1.0 : -1.0 ) : to_double( ( target[k] ? s - g_t : g_t - s ) / g_t );
    if ( out != target[k] )
    {
      margin = -std::abs( margin );
      rep.pass = false;
      if ( !rep.first_mismatch )
        rep.first_mismatch = k;
    }
    rep.margins.push_back( margin );
    rep.worst_margin = std::min( rep.worst_margin, margin );
  }
  return rep;
}

namespace detail
{

inline bool row_has( std::size_t k, std::size_t n, std::size_t i ) { return ( k >> ( n - 1 - i ) ) & 1u; }

/// Maximizes the relative margin over weights w >= 0 with the threshold fixed
/// at 1. Variables: w_1..w_n, m+, m-. Returns (margin, weights).
inline std::pair<double, std::vector<double>> max_margin_unboxed( TruthTable const& tt )
{
  auto const n = tt.n;
  std::vector<lp::Constraint<double>> cons;
  for ( std::size_t k = 0; k < tt.rows(); ++k )
  {
    std::vector<double> a( n + 2, 0.0 );
    for ( std::size_t i = 0; i < n; ++i )
      a[i] = row_has( k, n, i ) ? 1.0 : 0.0;
    if ( tt[k] )
    {
      a[n] = -1.0, a[n + 1] = 1.0; // S - m >= 1
      cons.push_back( { a, lp::Relation::greater_equal, 1.0 } );
    }
    else
    {
      a[n] = 1.0, a[n + 1] = -1.0; // S + m <= 1
      cons.push_back( { a, lp::Relation::less_equal, 1.0 } );
    }
  }
  // m <= 1 keeps the problem bounded even without an all-zero false row
  std::vector<double> cap( n + 2, 0.0 );
  cap[n] = 1.0, cap[n + 1] = -1.0;
  cons.push_back( { cap, lp::Relation::less_equal, 1.0 } );

  std::vector<double> obj( n + 2, 0.0 );
  obj[n] = 1.0, obj[n + 1] = -1.0;
  auto sol = lp::maximize( obj, cons, 1e-11 );
  if ( sol.status != lp::Status::optimal )
    return { -1.0, {} };
  return { sol.objective, std::vector<double>( sol.x.begin(), sol.x.begin() + n ) };
}

/// Exact strict separation check of weights w against threshold 1.
inline bool separates( TruthTable const& tt, std::vector<double> const& w )
{
  std::vector<Rational> wr;
  for ( auto v : w )
    wr.push_back( to_rational( v ) );
  for ( std::size_t k = 0; k < tt.rows(); ++k )
  {
    Rational s = 0;
    for ( std::size_t i = 0; i < tt.n; ++i )
      if ( row_has( k, tt.n, i ) )
        s += wr[i];
    if ( tt[k] ? !( s > 1 ) : !( s < 1 ) )
      return false;
  }
  return true;
}

inline std::optional<InfeasibilityWitness> find_asummable_pair( TruthTable const& tt )
{
  auto const n = tt.n;
  std::vector<std::size_t> trues, falses;
  for ( std::size_t k = 0; k < tt.rows(); ++k )
    ( tt[k] ? trues : falses ).push_back( k );

  // componentwise sum of two rows, digits in {0,1,2}, packed base 3
  auto key = [n]( std::size_t a, std::size_t b ) {
    std::uint64_t v = 0;
    for ( std::size_t i = 0; i < n; ++i )
      v = v * 3 + ( row_has( a, n, i ) ? 1 : 0 ) + ( row_has( b, n, i ) ? 1 : 0 );
    return v;
  };
  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> false_sums;
  for ( std::size_t i = 0; i < falses.size(); ++i )
    for ( std::size_t j = i; j < falses.size(); ++j )
      false_sums.emplace( key( falses[i], falses[j] ), std::pair{ falses[i], falses[j] } );
  for ( std::size_t i = 0; i < trues.size(); ++i )
    for ( std::size_t j = i; j < trues.size(); ++j )
      if ( auto it = false_sums.find( key( trues[i], trues[j] ) ); it != false_sums.end() )
        return InfeasibilityWitness{ InfeasibilityWitness::Kind::asummable,
                                     { InputVector::from_index( trues[i], n ), InputVector::from_index( trues[j], n ) },
                                     { InputVector::from_index( it->second.first, n ),
                                       InputVector::from_index( it->second.second, n ) } };
  return std::nullopt;
}

} // namespace detail

/*! \brief Decides whether a positive-weight threshold gate can realize `target`.

  Fast paths reject f(0) = 1 and non-monotone functions with a concrete
  witness. Otherwise a margin-maximizing LP is solved; a positive optimum
  yields a certificate that is re-checked with exact arithmetic.
*/
inline SeparabilityResult check_separability( TruthTable const& target )
{
  if ( target.n > max_synth_inputs )
    throw PreconditionError( "separability check limited to " + std::to_string( max_synth_inputs ) + " inputs" );
  auto const n = target.n;

  if ( target[0] )
    return { false,
             InfeasibilityWitness{ InfeasibilityWitness::Kind::zero_input_true, { InputVector::from_index( 0, n ) }, {} },
             {} };

  for ( std::size_t k = 0; k < target.rows(); ++k )
    for ( std::size_t i = 0; i < n; ++i )
    {
      auto const bit = std::size_t{ 1 } << ( n - 1 - i );
      if ( !( k & bit ) && target[k] && !target[k | bit] )
        return { false,
                 InfeasibilityWitness{ InfeasibilityWitness::Kind::monotonicity,
                                       { InputVector::from_index( static_cast<std::uint32_t>( k ), n ) },
                                       { InputVector::from_index( static_cast<std::uint32_t>( k | bit ), n ) } },
                 {} };
    }

  auto [margin, w] = detail::max_margin_unboxed( target );
  if ( margin > 1e-9 && detail::separates( target, w ) )
    return { true, std::nullopt, w };

  if ( auto wit = detail::find_asummable_pair( target ) )
    return { false, wit, {} };
  return { false, InfeasibilityWitness{ InfeasibilityWitness::Kind::no_positive_margin, {}, {} }, {} };
}

struct SynthesisResult
{
  bool feasible = false;
  std::optional<InfeasibilityWitness> witness;

  std::vector<double> conductances; ///< g_1..g_n (siemens)
  double threshold_conductance = 0.0;
  GateConfig config;           ///< continuous memristances
  GateConfig quantized_config; ///< snapped to the device grid
  std::vector<int> quantized_levels; ///< level index per element, threshold last
  double achieved_margin = 0.0;
  bool quantized_ok = false;
  double quantized_margin = 0.0;
  std::optional<std::size_t> quantized_failing_row;
};

inline VerifyReport verify( SynthesisResult const& result, TruthTable const& target )
{
  if ( !result.feasible )
    throw PreconditionError( "verify: synthesis result is infeasible" );
  return verify( result.config, target );
}

/// Relative margin above which rounding every element to the nearest grid
/// level cannot flip any row of `config`.
inline double quantization_margin_bound( GateConfig const& config, DeviceModel const& device )
{
  double const half_step = ( device.g_max() - device.g_min() ) / ( 2.0 * ( device.levels() - 1 ) );
  auto const elems = config.num_inputs() + config.thresholds.size();
  return static_cast<double>( elems ) * half_step / config.threshold_conductance();
}

/*! \brief Synthesizes memristances realizing `spec.target` on the CA output.

  Solves, in units of g_max = 1/r_min, the linear program over (w, lambda, m)

    maximize m  s.t.  S_w(x) - 1 >= m  for true rows,
                      1 - S_w(x) >= m  for false rows,
                      rho * lambda <= w_i <= lambda,  1 <= lambda <= 1/rho,

  with rho = r_min / r_max. Here w_i = g_i / g_T and lambda = 1 / g_T, so the
  box constraints on every conductance become linear. The optimum m is the
  largest achievable minimum relative margin inside the device range.
*/
inline SynthesisResult synthesize( SynthesisSpec const& spec )
{
  spec.device.validate();
  if ( spec.target.n < 1 || spec.target.n > max_synth_inputs )
    throw PreconditionError( "synthesis supports 1.." + std::to_string( max_synth_inputs ) + " inputs" );
  if ( !( spec.min_margin_rel >= 0.0 ) )
    throw PreconditionError( "min_margin_rel must be >= 0" );

  SynthesisResult res;
  auto sep = check_separability( spec.target );
  if ( !sep.feasible )
  {
    res.witness = sep.witness;
    return res;
  }

  auto const& tt = spec.target;
  auto const n = tt.n;
  double const rho = spec.device.r_min / spec.device.r_max;
  // variables: w_0..w_{n-1}, lambda, m+, m-
  std::size_t const L = n, MP = n + 1, MM = n + 2, NV = n + 3;
  std::vector<lp::Constraint<double>> cons;
  for ( std::size_t k = 0; k < tt.rows(); ++k )
  {
    std::vector<double> a( NV, 0.0 );
    for ( std::size_t i = 0; i < n; ++i )
      a[i] = detail::row_has( k, n, i ) ? 1.0 : 0.0;
    if ( tt[k] )
    {
      a[MP] = -1.0, a[MM] = 1.0;
      cons.push_back( { a, lp::Relation::greater_equal, 1.0 } );
    }
    else
    {
      a[MP] = 1.0, a[MM] = -1.0;
      cons.push_back( { a, lp::Relation::less_equal, 1.0 } );
    }
  }
  for ( std::size_t i = 0; i < n; ++i )
  {
    std::vector<double> lo( NV, 0.0 ), hi( NV, 0.0 );
    lo[i] = 1.0, lo[L] = -rho;
    hi[i] = 1.0, hi[L] = -1.0;
    cons.push_back( { lo, lp::Relation::greater_equal, 0.0 } );
    cons.push_back( { hi, lp::Relation::less_equal, 0.0 } );
  }
  {
    std::vector<double> a( NV, 0.0 );
    a[L] = 1.0;
    cons.push_back( { a, lp::Relation::greater_equal, 1.0 } );
    cons.push_back( { a, lp::Relation::less_equal, 1.0 / rho } );
    std::vector<double> cap( NV, 0.0 );
    cap[MP] = 1.0, cap[MM] = -1.0;
    cons.push_back( { cap, lp::Relation::less_equal, 1.0 } );
  }
  std::vector<double> obj( NV, 0.0 );
  obj[MP] = 1.0, obj[MM] = -1.0;

  auto sol = lp::maximize( obj, cons, 1e-11 );
  if ( sol.status != lp::Status::optimal || sol.objective <= 0.0 || sol.objective < spec.min_margin_rel )
  {
    double const best = sol.status == lp::Status::optimal ? sol.objective : 0.0;
    std::ostringstream os;
    os << "device range [" << spec.device.r_min << ", " << spec.device.r_max << "] ohm allows at most margin " << best
       << ", required " << spec.min_margin_rel;
    throw MarginError( os.str(), best );
  }

  double const g_max = spec.device.g_max();
  double const lambda = sol.x[L];
  auto to_memristance = [&]( double g_units ) {
    return std::clamp( 1.0 / ( g_units * g_max ), spec.device.r_min, spec.device.r_max );
  };

  res.feasible = true;
  res.config.tie_rule = spec.tie_rule;
  for ( std::size_t i = 0; i < n; ++i )
  {
    res.config.inputs.push_back( to_memristance( sol.x[i] / lambda ) );
    res.conductances.push_back( 1.0 / res.config.inputs.back() );
  }
  res.config.thresholds.push_back( to_memristance( 1.0 / lambda ) );
  res.threshold_conductance = 1.0 / res.config.thresholds.back();
  res.achieved_margin = verify( res.config, tt ).worst_margin;

  res.quantized_config = res.config;
  auto snap = [&]( double& r ) {
    auto q = quantize( r, spec.device );
    res.quantized_levels.push_back( q.index );
    r = q.resistance;
  };
  for ( auto& r : res.quantized_config.inputs )
    snap( r );
  for ( auto& r : res.quantized_config.thresholds )
    snap( r );
  auto const qrep = verify( res.quantized_config, tt );
  res.quantized_ok = qrep.pass;
  res.quantized_margin = qrep.worst_margin;
  res.quantized_failing_row = qrep.first_mismatch;
  return res;
}

/// A synthesis target together with the gate output it should be read from.
struct SynthesisTarget
{
  TruthTable function;    ///< the function wanted at the chosen output
  bool read_from_co;      ///< true: synthesize the complement on CA, read CO
};

/*! \brief Parses a target: a truth-table bitstring (all-ones row first) or one
  of AND, OR, NAND, NOR, XOR, XNOR, CONST0, CONST1, MAJ:k, DICT:i (i 1-based).
  `n` is required for named forms and checked against bitstrings when given.
*/
inline TruthTable parse_target( std::string text, std::optional<std::size_t> n )
{
  for ( auto& c : text )
    c = static_cast<char>( std::toupper( static_cast<unsigned char>( c ) ) );

  if ( !text.empty() && text.find_first_not_of( "01" ) == std::string::npos )
  {
    auto tt = TruthTable::from_bitstring( text );
    if ( n && *n != tt.n )
      throw PreconditionError( "target bitstring has " + std::to_string( tt.n ) + " inputs, expected " +
                               std::to_string( *n ) );
    return tt;
  }
  if ( !n || *n < 1 || *n > static_cast<std::size_t>( max_fan_in ) )
    throw PreconditionError( "named targets need an input count between 1 and 16" );

  auto const rows = std::size_t{ 1 } << *n;
  auto build = [&]( auto pred ) {
    std::vector<std::uint8_t> out( rows );
    for ( std::size_t k = 0; k < rows; ++k )
      out[k] = pred( k, std::popcount( k ) ) ? 1 : 0;
    return TruthTable( *n, std::move( out ) );
  };
  auto const N = static_cast<int>( *n );

  if ( text == "AND" )
    return build( [&]( auto, int w ) { return w == N; } );
  if ( text == "OR" )
    return build( []( auto, int w ) { return w >= 1; } );
  if ( text == "NAND" )
    return build( [&]( auto, int w ) { return w != N; } );
  if ( text == "NOR" )
    return build( []( auto, int w ) { return w == 0; } );
  if ( text == "XOR" )
    return build( []( auto, int w ) { return w % 2 == 1; } );
  if ( text == "XNOR" )
    return build( []( auto, int w ) { return w % 2 == 0; } );
  if ( text == "CONST0" )
    return build( []( auto, int ) { return false; } );
  if ( text == "CONST1" )
    return build( []( auto, int ) { return true; } );

  auto param = [&]( std::string const& prefix ) -> std::optional<int> {
    if ( text.rfind( prefix, 0 ) != 0 )
      return std::nullopt;
    auto const digits = text.substr( prefix.size() );
    if ( digits.empty() || digits.find_first_not_of( "0123456789" ) != std::string::npos || digits.size() > 3 )
      throw PreconditionError( "malformed target '" + text + "'" );
    return std::stoi( digits );
  };
  if ( auto k = param( "MAJ:" ) )
  {
    if ( *k < 1 || *k > N )
      throw PreconditionError( "MAJ:k needs 1 <= k <= n" );
    return build( [&]( auto, int w ) { return w >= *k; } );
  }
  if ( auto i = param( "DICT:" ) )
  {
    if ( *i < 1 || *i > N )
      throw PreconditionError( "DICT:i needs 1 <= i <= n" );
    return build( [&]( std::size_t k, int ) { return detail::row_has( k, *n, *i - 1 ); } );
  }
  throw PreconditionError( "unknown target '" + text + "'" );
}

/// Synthesizes on CA when possible, otherwise tries the complement and reads
/// the result from CO. The returned target records which output to use.
inline std::pair<SynthesisResult, SynthesisTarget> synthesize_either_output( SynthesisSpec spec )
{
  auto const wanted = spec.target;
  auto direct = synthesize( spec );
  if ( direct.feasible )
    return { direct, { wanted, false } };
  spec.target = wanted.complement();
  if ( !check_separability( spec.target ).feasible )
    return { direct, { wanted, false } };
  return { synthesize( spec ), { wanted, true } };
}

} // namespace mcmtlg
