#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gate.hpp"

namespace mcmtlg
{

struct ClockSpec
{
  double period = 2e-3;
  double duty_eq = 0.5; ///< fraction of the period spent equalizing (clock HIGH)
  int n_cycles = 1;
  double sample_dt = 2e-3 / 200;

  void validate() const
  {
    if ( !( period > 0.0 ) )
      throw PreconditionError( "clock: period must be positive" );
    if ( !( duty_eq > 0.0 && duty_eq < 1.0 ) )
      throw PreconditionError( "clock: duty_eq must lie in (0, 1)" );
    if ( n_cycles < 1 )
      throw PreconditionError( "clock: n_cycles must be >= 1" );
    if ( !( sample_dt > 0.0 ) || sample_dt > period / 20.0 )
      throw PreconditionError( "clock: sample_dt must lie in (0, period/20]" );
  }

  double evaluation_window() const { return period * ( 1.0 - duty_eq ); }
};

/// Single-pole latch model: an initial imbalance |dI| * r_sense grows as
/// exp(t / tau) until it saturates at half the supply.
struct TransientParams
{
  double tau = 100e-9;
  double r_sense = 10e3;
  double v_meta_floor = 1e-6;

  void validate() const
  {
    if ( !( tau > 0.0 ) || !( r_sense > 0.0 ) || !( v_meta_floor > 0.0 ) )
      throw PreconditionError( "transient parameters must be positive" );
  }
};

/// Time for the latch to reach the rails; nullopt when the imbalance is below
/// the metastability floor.
inline std::optional<double> settle_time( double delta_i, TransientParams const& params, VoltageLevels const& levels )
{
  double const dv0 = std::abs( delta_i ) * params.r_sense;
  if ( dv0 < params.v_meta_floor )
    return std::nullopt;
  return std::max( 0.0, params.tau * std::log( levels.v_dd / ( 2.0 * dv0 ) ) );
}

/// Input switching threshold of the isolation inverters (below v_dd / 2).
inline double isolation_threshold( VoltageLevels const& levels ) { return 0.25 * levels.v_dd; }

inline double isolation_inverter( double v_in, VoltageLevels const& levels )
{
  return v_in < isolation_threshold( levels ) ? levels.v_high : levels.v_low;
}

struct WaveformSample
{
  double t;
  double clk;
  std::vector<double> in;
  double ca, co, cabar, cobar;
  int cycle;
  bool equalizing;
};

struct WaveformTrace
{
  std::size_t n_inputs = 0;
  std::vector<WaveformSample> samples;
  std::vector<bool> cycle_resolved;
  std::vector<std::optional<double>> cycle_settle_time;

  /// CSV with header t_s,clk_v,in1_v..inN_v,ca_v,co_v,cabar_v,cobar_v,resolved.
  void write_csv( std::ostream& os ) const
  {
    os << "t_s,clk_v";
    for ( std::size_t i = 0; i < n_inputs; ++i )
      os << ",in" << ( i + 1 ) << "_v";
    os << ",ca_v,co_v,cabar_v,cobar_v,resolved\n";

    char buf[32];
    auto put = [&]( double v ) {
      std::snprintf( buf, sizeof buf, "%.9g", v );
      os << buf;
    };
    for ( auto const& s : samples )
    {
      put( s.t );
      os << ',';
      put( s.clk );
      for ( auto v : s.in )
      {
        os << ',';
        put( v );
      }
      for ( double v : { s.ca, s.co, s.cabar, s.cobar } )
      {
        os << ',';
        put( v );
      }
      os << ',' << ( cycle_resolved[s.cycle] ? 1 : 0 ) << '\n';
    }
  }
};

/*! \brief Two-phase clocked simulation of one gate.

  Each clock cycle starts with equalization (clock HIGH): both latch nodes are
  shorted to v_dd / 2. During evaluation (clock LOW) the imbalance set by the
  branch currents diverges exponentially until the winning node reaches v_dd
  and the losing one v_low. Cycles whose currents tie (per the gate's tie
  epsilon), or whose settle time exceeds the evaluation window, stay at
  v_dd / 2 and are flagged unresolved.

  Logical input 1 is emitted as v_low on the input columns (active-low pMOS
  switches).
*/
inline WaveformTrace simulate( GateConfig const& config, std::vector<InputVector> const& sequence, ClockSpec const& clock,
                               TransientParams const& params )
{
  config.validate();
  clock.validate();
  params.validate();
  if ( sequence.size() != static_cast<std::size_t>( clock.n_cycles ) )
    throw DimensionError( "simulate: need exactly one input vector per clock cycle" );

  auto const& lv = config.levels;
  double const mid = 0.5 * lv.v_dd;
  double const t_eq = clock.duty_eq * clock.period;

  WaveformTrace trace;
  trace.n_inputs = config.num_inputs();

  struct CycleState
  {
    GateOutput out;
    double dv0;
    bool resolved;
  };
  std::vector<CycleState> cycles;
  for ( auto const& in : sequence )
  {
    auto const cur = branch_currents( config, in );
    auto const out = compare( cur.i_in, cur.i_th, config.tie_rule );
    double const delta = out.tie ? 0.0 : cur.i_in - cur.i_th;
    auto const ts = settle_time( delta, params, lv );
    bool const resolved = ts && *ts <= clock.evaluation_window();
    trace.cycle_resolved.push_back( resolved );
    trace.cycle_settle_time.push_back( ts );
    cycles.push_back( { out, std::abs( delta ) * params.r_sense, resolved } );
  }

  auto const total = static_cast<long long>( std::llround( clock.n_cycles * clock.period / clock.sample_dt ) );
  trace.samples.reserve( static_cast<std::size_t>( total ) );
  for ( long long k = 0; k < total; ++k )
  {
    double const t = static_cast<double>( k ) * clock.sample_dt;
    int const c = std::min( clock.n_cycles - 1, static_cast<int>( std::floor( t / clock.period ) ) );
    double const u = t - c * clock.period;
    auto const& cs = cycles[c];

    WaveformSample s;
    s.t = t;
    s.cycle = c;
    s.equalizing = u < t_eq;
    s.clk = s.equalizing ? lv.v_high : lv.v_low;
    for ( std::size_t i = 0; i < trace.n_inputs; ++i )
      s.in.push_back( sequence[c][i] ? lv.v_low : lv.v_high );

    s.ca = s.co = mid;
    if ( !s.equalizing && cs.resolved )
    {
      // fraction of the full swing reached so far
      double const frac = std::min( 1.0, cs.dv0 * std::exp( ( u - t_eq ) / params.tau ) / mid );
      double const up = mid + frac * ( lv.v_dd - mid );
      double const down = mid + frac * ( lv.v_low - mid );
      s.ca = cs.out.ca ? up : down;
      s.co = cs.out.ca ? down : up;
    }
    s.cabar = isolation_inverter( s.ca, lv );
    s.cobar = isolation_inverter( s.co, lv );
    trace.samples.push_back( std::move( s ) );
  }
  return trace;
}

} // namespace mcmtlg
