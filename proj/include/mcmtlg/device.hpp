#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mcmtlg
{

/*! \brief Behavioral parameters of a multi-level metal-oxide memristor.

  Programming follows a bounded exponential approach: every pulse whose
  magnitude reaches `v_prog_threshold` moves the resistance a fixed fraction
  `step_fraction` of the remaining distance toward the corresponding rail
  (r_min for positive pulses, r_max for negative ones). Sub-threshold biases
  never change state, which is what makes +0.5 V verify reads safe.
*/
struct DeviceModel
{
  double r_min = 10e3;
  double r_max = 100e3;
  int bits = 5;
  double v_prog_threshold = 1.0;
  double v_set = 2.0;
  double v_reset = -2.0;
  double step_fraction = 0.1;
  /// relative standard deviation of the per-pulse step, 0 = deterministic
  double noise_sigma_rel = 0.0;
  std::uint64_t seed = 1;

  void validate() const
  {
    if ( !( r_min > 0.0 ) || !( r_min < r_max ) )
      throw PreconditionError( "device: require 0 < r_min < r_max" );
    if ( bits < 1 || bits > 7 )
      throw PreconditionError( "device: bits must lie in [1, 7]" );
    if ( !( v_prog_threshold > 0.0 ) || !( v_prog_threshold < v_set ) )
      throw PreconditionError( "device: require 0 < v_prog_threshold < v_set" );
    if ( !( v_reset <= -v_prog_threshold ) )
      throw PreconditionError( "device: v_reset must reach -v_prog_threshold" );
    if ( !( step_fraction > 0.0 ) || !( step_fraction < 1.0 ) )
      throw PreconditionError( "device: step_fraction must lie in (0, 1)" );
    if ( !( noise_sigma_rel >= 0.0 ) )
      throw PreconditionError( "device: noise_sigma_rel must be >= 0" );
  }

  bool operator==( DeviceModel const& ) const = default;

  int levels() const { return 1 << bits; }
  double g_min() const { return 1.0 / r_max; }
  double g_max() const { return 1.0 / r_min; }
  bool contains( double r ) const { return r >= r_min && r <= r_max; }

  /// kΩ-range profile matching the hardware experiments.
  static DeviceModel kohm_profile() { return DeviceModel{}; }

  /// MΩ-range profile used for emulator sweeps.
  static DeviceModel mohm_profile()
  {
    DeviceModel m;
    m.r_min = 1e6;
    m.r_max = 10e6;
    return m;
  }
};

class MemristorState
{
public:
  explicit MemristorState( DeviceModel model ) : MemristorState( model, model.r_max ) {}

  MemristorState( DeviceModel model, double resistance ) : model_( model ), resistance_( resistance )
  {
    model_.validate();
    if ( !model_.contains( resistance ) )
      throw PreconditionError( "memristor: resistance outside [r_min, r_max]" );
  }

  double resistance() const { return resistance_; }
  DeviceModel const& model() const { return model_; }

  /// Same device at another resistance (must be in range).
  MemristorState with_resistance( double r ) const { return MemristorState( model_, r ); }

  bool operator==( MemristorState const& other ) const = default;

private:
  DeviceModel model_;
  double resistance_;
};

struct PulseSpec
{
  double amplitude;
  double width = 1e-6;
};

/// Non-destructive read. Throws ReadDisturbError for biases that would program.
inline double read_current( MemristorState const& state, double v )
{
  if ( std::abs( v ) >= state.model().v_prog_threshold )
    throw ReadDisturbError( "read bias " + std::to_string( v ) + " V reaches the programming threshold" );
  return v / state.resistance();
}

/// Applies one programming pulse. When `rng` is given and the model carries
/// programming noise, the step fraction is perturbed by N(0, sigma_rel).
inline MemristorState apply_pulse( MemristorState const& state, PulseSpec const& pulse, std::mt19937_64* rng = nullptr )
{
  if ( !( pulse.width > 0.0 ) )
    throw PreconditionError( "pulse width must be positive" );

  auto const& m = state.model();
  if ( std::abs( pulse.amplitude ) < m.v_prog_threshold )
    return state;

  double step = m.step_fraction;
  if ( rng && m.noise_sigma_rel > 0.0 )
  {
    std::normal_distribution<double> dist( 0.0, m.noise_sigma_rel );
    step *= 1.0 + dist( *rng );
    step = std::clamp( step, 0.0, 1.0 );
  }

  double const r = state.resistance();
  double next = pulse.amplitude > 0.0 ? r - step * ( r - m.r_min ) : r + step * ( m.r_max - r );
  return state.with_resistance( std::clamp( next, m.r_min, m.r_max ) );
}

struct QuantizedLevel
{
  int index;
  double resistance;

  bool operator==( QuantizedLevel const& ) const = default;
};

/// Resistance of grid level `k`. Levels are uniform in conductance; level 0 is
/// r_max and the top level is r_min.
inline double level_resistance( DeviceModel const& model, int k )
{
  int const top = model.levels() - 1;
  if ( k < 0 || k > top )
    throw PreconditionError( "level index out of range" );
  if ( k == 0 )
    return model.r_max;
  if ( k == top )
    return model.r_min;
  double const g = model.g_min() + ( model.g_max() - model.g_min() ) * k / top;
  return 1.0 / g;
}

inline QuantizedLevel quantize( double target, DeviceModel const& model )
{
  model.validate();
  if ( !model.contains( target ) )
    throw PreconditionError( "quantize: target outside [r_min, r_max]" );

  int const top = model.levels() - 1;
  double const step = ( model.g_max() - model.g_min() ) / top;
  double const pos = ( 1.0 / target - model.g_min() ) / step;

  // candidates floor/ceil, compared in conductance; ties resolve downwards
  int lo = std::clamp( static_cast<int>( std::floor( pos ) ), 0, top );
  int hi = std::min( lo + 1, top );
  double const g = 1.0 / target;
  double const dlo = std::abs( g - 1.0 / level_resistance( model, lo ) );
  double const dhi = std::abs( g - 1.0 / level_resistance( model, hi ) );
  int const k = dhi < dlo ? hi : lo;
  return { k, level_resistance( model, k ) };
}

enum class PulseKind
{
  set,
  reset
};

namespace detail
{

struct Interval
{
  double lo, hi;
  bool empty() const { return lo > hi; }
  bool contains( double x ) const { return x >= lo && x <= hi; }
  double distance( double x ) const { return x < lo ? lo - x : ( x > hi ? x - hi : 0.0 ); }
};

/*! Plans a pulse sequence from normalized state `x` into `band`.

  In normalized coordinates x = (R - r_min) / (r_max - r_min) a set pulse is
  x -> (1-s) x and a reset pulse is x -> (1-s) x + s. The target band is pulled
  back through whichever inverse map keeps it closest to the current state;
  each pull-back widens the band by 1/(1-s), so the band eventually swallows
  the current state. The recorded maps, reversed, form the forward plan.
*/
inline std::optional<std::vector<PulseKind>> plan_pulses( double x, Interval band, double s, int max_len )
{
  std::vector<PulseKind> backwards;
  double const k = 1.0 - s;
  while ( !band.contains( x ) )
  {
    if ( static_cast<int>( backwards.size() ) >= max_len )
      return std::nullopt;
    Interval via_set{ std::max( 0.0, band.lo / k ), std::min( 1.0, band.hi / k ) };
    Interval via_reset{ std::max( 0.0, ( band.lo - s ) / k ), std::min( 1.0, ( band.hi - s ) / k ) };

    bool use_set;
    if ( via_set.empty() )
      use_set = false;
    else if ( via_reset.empty() )
      use_set = true;
    else
    {
      double const ds = via_set.distance( x ), dr = via_reset.distance( x );
      use_set = ds < dr || ( ds == dr && ( via_set.hi - via_set.lo ) >= ( via_reset.hi - via_reset.lo ) );
    }
    band = use_set ? via_set : via_reset;
    backwards.push_back( use_set ? PulseKind::set : PulseKind::reset );
  }
  return std::vector<PulseKind>( backwards.rbegin(), backwards.rend() );
}

} // namespace detail

struct ProgramOutcome
{
  MemristorState state;
  int pulses = 0;
  int reads = 0;
  double measured_resistance = 0.0;
};

/// Closed-loop program-and-verify, emulating a bench programming instrument.
/// Each pulse is followed by a verify read; the plan is recomputed whenever
/// the measured state deviates from the prediction (programming noise).
inline ProgramOutcome program_to_target( MemristorState const& start, double target, double tol_rel, int max_pulses,
                                         std::mt19937_64* rng = nullptr )
{
  auto const& m = start.model();
  if ( !m.contains( target ) )
    throw PreconditionError( "program: target outside [r_min, r_max]" );
  if ( !( tol_rel > 0.0 ) )
    throw PreconditionError( "program: tolerance must be positive" );

  std::optional<std::mt19937_64> own_rng;
  if ( !rng && m.noise_sigma_rel > 0.0 )
    rng = &own_rng.emplace( m.seed );

  double const v_read = std::min( 0.5, 0.5 * m.v_prog_threshold );
  double const span = m.r_max - m.r_min;
  double const lo = std::max( m.r_min, target * ( 1.0 - tol_rel ) );
  double const hi = std::min( m.r_max, target * ( 1.0 + tol_rel ) );
  // keep a sliver of slack against rounding in the normalized coordinates
  double const slack = 1e-9 * ( hi - lo );
  detail::Interval const band{ ( lo + slack - m.r_min ) / span, ( hi - slack - m.r_min ) / span };

  ProgramOutcome out{ start };
  auto measure = [&]() {
    ++out.reads;
    out.measured_resistance = v_read / read_current( out.state, v_read );
    return out.measured_resistance;
  };
  auto in_band = [&]( double r ) { return std::abs( r - target ) <= tol_rel * target; };

  double r = measure();
  std::vector<PulseKind> plan;
  std::size_t next = 0;
  double predicted = r;

  while ( !in_band( r ) )
  {
    if ( next == plan.size() || std::abs( r - predicted ) > 1e-12 * span )
    {
      auto p = detail::plan_pulses( ( r - m.r_min ) / span, band, m.step_fraction, max_pulses - out.pulses );
      if ( !p )
        throw ProgramTimeoutError( "program: no convergence within " + std::to_string( max_pulses ) + " pulses",
                                   out.pulses );
      plan = std::move( *p );
      next = 0;
      if ( plan.empty() )
        break; // in the shrunk band but not the nominal one cannot happen; guard anyway
    }
    if ( out.pulses >= max_pulses )
      throw ProgramTimeoutError( "program: no convergence within " + std::to_string( max_pulses ) + " pulses",
                                 out.pulses );

    auto const kind = plan[next++];
    double const s = m.step_fraction;
    predicted = kind == PulseKind::set ? r - s * ( r - m.r_min ) : r + s * ( m.r_max - r );
    out.state = apply_pulse( out.state, PulseSpec{ kind == PulseKind::set ? m.v_set : m.v_reset }, rng );
    ++out.pulses;
    r = measure();
  }

  if ( !in_band( measure() ) )
    throw ProgramTimeoutError( "program: final verify read outside tolerance", out.pulses );
  return out;
}

} // namespace mcmtlg
