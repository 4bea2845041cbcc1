#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "device.hpp"
#include "errors.hpp"
#include "gate.hpp"
#include "netlist.hpp"
#include "transient.hpp"

namespace mcmtlg::io
{

/// Parses "33k", "60.5k", "3M", "2.5e6" into ohms. `offset` shifts reported columns.
inline double parse_resistance( std::string const& text, std::size_t offset = 0 )
{
  std::size_t b = 0, e = text.size();
  while ( b < e && std::isspace( static_cast<unsigned char>( text[b] ) ) )
    ++b;
  while ( e > b && std::isspace( static_cast<unsigned char>( text[e - 1] ) ) )
    --e;
  if ( b == e )
    throw ParseError( "empty resistance value at column " + std::to_string( offset + b + 1 ), 0, offset + b + 1 );

  std::string body = text.substr( b, e - b );
  double mult = 1.0;
  if ( char last = body.back(); last == 'k' || last == 'K' )
    mult = 1e3, body.pop_back();
  else if ( last == 'M' )
    mult = 1e6, body.pop_back();
  else if ( last == 'G' )
    mult = 1e9, body.pop_back();

  char* end = nullptr;
  double const v = std::strtod( body.c_str(), &end );
  if ( body.empty() || end != body.c_str() + body.size() )
  {
    auto const col = offset + b + static_cast<std::size_t>( end - body.c_str() ) + 1;
    throw ParseError( "malformed resistance '" + text.substr( b, e - b ) + "' at column " + std::to_string( col ), 0,
                      col );
  }
  if ( !( v > 0.0 ) || !std::isfinite( v ) )
    throw ParseError( "resistance must be positive at column " + std::to_string( offset + b + 1 ), 0, offset + b + 1 );
  return v * mult;
}

struct Weights
{
  std::vector<double> inputs;
  std::vector<double> thresholds;
};

/// "M1,...,Mn;TH1,...,THm" with optional k/M suffixes.
inline Weights parse_weights( std::string const& text )
{
  auto const semi = text.find( ';' );
  if ( semi == std::string::npos )
    throw ParseError( "weights need ';' between input and threshold memristances", 0, text.size() + 1 );
  if ( text.find( ';', semi + 1 ) != std::string::npos )
    throw ParseError( "weights contain more than one ';' (column " + std::to_string( text.find( ';', semi + 1 ) + 1 ) +
                          ")",
                      0, text.find( ';', semi + 1 ) + 1 );

  auto split = [&]( std::size_t from, std::size_t to ) {
    std::vector<double> out;
    std::size_t start = from;
    for ( std::size_t i = from; i <= to; ++i )
      if ( i == to || text[i] == ',' )
      {
        out.push_back( parse_resistance( text.substr( start, i - start ), start ) );
        start = i + 1;
      }
    return out;
  };
  return { split( 0, semi ), split( semi + 1, text.size() ) };
}

inline std::string format_weights( GateConfig const& c )
{
  std::string s;
  char buf[40];
  auto put = [&]( std::vector<double> const& v ) {
    for ( std::size_t i = 0; i < v.size(); ++i )
    {
      std::snprintf( buf, sizeof buf, "%.17g", v[i] );
      s += ( i ? "," : "" ) + std::string( buf );
    }
  };
  put( c.inputs );
  s += ";";
  put( c.thresholds );
  return s;
}

/// Logical bits "011" -> InputVector; anything but 0/1 is a parse error.
inline InputVector parse_bits( std::string const& text )
{
  std::vector<std::uint8_t> bits;
  for ( std::size_t i = 0; i < text.size(); ++i )
  {
    if ( text[i] != '0' && text[i] != '1' )
      throw ParseError( "input bits may only contain 0 and 1 (column " + std::to_string( i + 1 ) + ")", 0, i + 1 );
    bits.push_back( text[i] == '1' );
  }
  if ( bits.empty() )
    throw ParseError( "empty input vector" );
  return InputVector( std::move( bits ) );
}

/// Scientific notation with `digits` significant digits and no exponent padding: 2.1577e-5.
inline std::string format_sci( double v, int digits = 5 )
{
  char buf[48];
  std::snprintf( buf, sizeof buf, "%.*e", digits - 1, v );
  std::string s = buf;
  auto const epos = s.find( 'e' );
  if ( epos == std::string::npos )
    return s;
  std::string mant = s.substr( 0, epos );
  int const ex = std::atoi( s.c_str() + epos + 1 );
  return mant + "e" + std::to_string( ex );
}

inline TieRule parse_tie_rule( std::string const& s )
{
  std::string t;
  for ( char c : s )
    if ( c != '_' && c != '-' )
      t.push_back( static_cast<char>( std::tolower( static_cast<unsigned char>( c ) ) ) );
  if ( t == "inputwins" )
    return TieRule::input_wins;
  if ( t == "thresholdwins" )
    return TieRule::threshold_wins;
  throw ParseError( "tie_rule must be InputWins or ThresholdWins, got '" + s + "'" );
}

/*! \brief Everything a CLI invocation can be configured with.

  File format (INI, every section and key optional, unknown ones rejected):

      [device]     profile = kohm | mohm, r_min_ohm, r_max_ohm, bits,
                   v_prog_threshold_v, v_set_v, v_reset_v, step_fraction,
                   noise_sigma_rel, seed
      [levels]     v_dd_v, v_high_v, v_low_v
      [gate]       weights = "M1,...,Mn;TH1,...", tie_rule = InputWins | ThresholdWins
      [transient]  tau_s, r_sense_ohm, v_meta_floor_v
      [clock]      period_s, duty_eq, sample_dt_s
*/
struct ProjectConfig
{
  DeviceModel device = DeviceModel::kohm_profile();
  VoltageLevels levels{};
  TieRule tie_rule = TieRule::input_wins;
  std::optional<Weights> weights;
  TransientParams transient{};
  ClockSpec clock{};

  void validate() const
  {
    device.validate();
    levels.validate( device.v_prog_threshold );
    transient.validate();
    auto c = clock;
    c.n_cycles = 1;
    c.validate();
  }
};

namespace detail
{

inline std::map<std::string, std::set<std::string>> const& config_schema()
{
  static std::map<std::string, std::set<std::string>> const schema{
      { "device",
        { "profile", "r_min_ohm", "r_max_ohm", "bits", "v_prog_threshold_v", "v_set_v", "v_reset_v", "step_fraction",
          "noise_sigma_rel", "seed" } },
      { "levels", { "v_dd_v", "v_high_v", "v_low_v" } },
      { "gate", { "weights", "tie_rule" } },
      { "transient", { "tau_s", "r_sense_ohm", "v_meta_floor_v" } },
      { "clock", { "period_s", "duty_eq", "sample_dt_s" } },
  };
  return schema;
}

inline std::string unquote( std::string s )
{
  if ( s.size() >= 2 && ( ( s.front() == '"' && s.back() == '"' ) || ( s.front() == '\'' && s.back() == '\'' ) ) )
    return s.substr( 1, s.size() - 2 );
  return s;
}

inline double number( std::string const& key, std::string const& v )
{
  char* end = nullptr;
  double const d = std::strtod( v.c_str(), &end );
  if ( v.empty() || end != v.c_str() + v.size() || !std::isfinite( d ) )
    throw ParseError( "config key '" + key + "': expected a number, got '" + v + "'" );
  return d;
}

} // namespace detail

inline ProjectConfig parse_config( std::istream& is )
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try
  {
    pt::read_ini( is, tree );
  }
  catch ( pt::ini_parser_error const& e )
  {
    throw ParseError( "config line " + std::to_string( e.line() ) + ": " + e.message(), e.line() );
  }

  ProjectConfig cfg;
  auto const& schema = detail::config_schema();
  for ( auto const& [section, body] : tree )
  {
    auto it = schema.find( section );
    if ( it == schema.end() )
    {
      if ( body.empty() )
        throw ParseError( "config key '" + section + "' outside any section" );
      throw ParseError( "unknown config section [" + section + "]" );
    }
    for ( auto const& [key, node] : body )
      if ( !it->second.count( key ) )
        throw ParseError( "unknown config key '" + key + "' in [" + section + "]" );
  }

  auto get = [&]( std::string const& path ) -> std::optional<std::string> {
    if ( auto v = tree.get_optional<std::string>( pt::ptree::path_type( path, '.' ) ) )
      return detail::unquote( *v );
    return std::nullopt;
  };
  auto num = [&]( std::string const& path, double& dst ) {
    if ( auto v = get( path ) )
      dst = detail::number( path, *v );
  };
  auto ohm = [&]( std::string const& path, double& dst ) {
    if ( auto v = get( path ) )
    {
      try
      {
        dst = parse_resistance( *v );
      }
      catch ( ParseError const& e )
      {
        throw ParseError( "config key '" + path + "': " + e.what() );
      }
    }
  };

  if ( auto p = get( "device.profile" ) )
  {
    if ( *p == "kohm" )
      cfg.device = DeviceModel::kohm_profile();
    else if ( *p == "mohm" )
      cfg.device = DeviceModel::mohm_profile();
    else
      throw ParseError( "config key 'device.profile' must be kohm or mohm" );
  }
  ohm( "device.r_min_ohm", cfg.device.r_min );
  ohm( "device.r_max_ohm", cfg.device.r_max );
  if ( auto v = get( "device.bits" ) )
    cfg.device.bits = static_cast<int>( detail::number( "device.bits", *v ) );
  num( "device.v_prog_threshold_v", cfg.device.v_prog_threshold );
  num( "device.v_set_v", cfg.device.v_set );
  num( "device.v_reset_v", cfg.device.v_reset );
  num( "device.step_fraction", cfg.device.step_fraction );
  num( "device.noise_sigma_rel", cfg.device.noise_sigma_rel );
  if ( auto v = get( "device.seed" ) )
    cfg.device.seed = static_cast<std::uint64_t>( detail::number( "device.seed", *v ) );

  num( "levels.v_dd_v", cfg.levels.v_dd );
  num( "levels.v_high_v", cfg.levels.v_high );
  num( "levels.v_low_v", cfg.levels.v_low );

  if ( auto w = get( "gate.weights" ) )
    cfg.weights = parse_weights( *w );
  if ( auto t = get( "gate.tie_rule" ) )
    cfg.tie_rule = parse_tie_rule( *t );

  num( "transient.tau_s", cfg.transient.tau );
  ohm( "transient.r_sense_ohm", cfg.transient.r_sense );
  num( "transient.v_meta_floor_v", cfg.transient.v_meta_floor );

  num( "clock.period_s", cfg.clock.period );
  num( "clock.duty_eq", cfg.clock.duty_eq );
  bool const explicit_dt = get( "clock.sample_dt_s" ).has_value();
  num( "clock.sample_dt_s", cfg.clock.sample_dt );
  if ( !explicit_dt )
    cfg.clock.sample_dt = cfg.clock.period / 200.0;

  try
  {
    cfg.validate();
  }
  catch ( PreconditionError const& e )
  {
    throw ParseError( std::string( "config: " ) + e.what() );
  }
  return cfg;
}

inline ProjectConfig load_config( std::string const& path )
{
  std::ifstream is( path );
  if ( !is )
    throw ParseError( "cannot open config file '" + path + "'" );
  return parse_config( is );
}

/// Gate file as written by `synth --out`; readable with `--config`.
inline std::string write_gate_config( GateConfig const& c )
{
  std::ostringstream os;
  char buf[40];
  auto put = [&]( double v ) {
    std::snprintf( buf, sizeof buf, "%.17g", v );
    return std::string( buf );
  };
  os << "[levels]\n"
     << "v_dd_v = " << put( c.levels.v_dd ) << "\n"
     << "v_high_v = " << put( c.levels.v_high ) << "\n"
     << "v_low_v = " << put( c.levels.v_low ) << "\n\n"
     << "[gate]\n"
     << "weights = \"" << format_weights( c ) << "\"\n"
     << "tie_rule = " << to_string( c.tie_rule ) << "\n";
  return os.str();
}

/// Gate described by a config: explicit weights win over the [gate] section.
inline GateConfig make_gate( ProjectConfig const& cfg, std::optional<Weights> const& override_weights )
{
  auto const& w = override_weights ? override_weights : cfg.weights;
  if ( !w )
    throw ParseError( "no gate weights given (use --weights or a [gate] section)" );
  GateConfig g{ w->inputs, w->thresholds, cfg.levels, cfg.tie_rule, {} };
  try
  {
    g.validate();
  }
  catch ( PreconditionError const& e )
  {
    throw ParseError( e.what() );
  }
  return g;
}

/*! \brief Netlist files (JSON).

      {
        "inputs": 2,                      // optional; defaults to the highest in<k> used
        "gates": [ { "name": "A", "inputs": ["33.8k", "18.3k"], "thresholds": ["41.6k"],
                     "tie_rule": "InputWins" } ],
        "wires": [ { "from": "in1", "to": "A.1" }, { "from": "A.CA", "to": "C.1" } ],
        "outputs": [ "C.CA" ]
      }

  Slots and primary inputs are numbered from 1. Memristances are numbers
  (ohms) or suffixed strings. Errors carry the JSON pointer of the field.
*/
inline Netlist parse_netlist( std::string const& text, VoltageLevels const& levels = {} )
{
  using nlohmann::json;
  json doc;
  try
  {
    doc = json::parse( text );
  }
  catch ( json::parse_error const& e )
  {
    std::size_t line = 1, col = 1;
    for ( std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i )
      text[i] == '\n' ? ( ++line, col = 1 ) : ++col;
    throw ParseError( "netlist line " + std::to_string( line ) + ", column " + std::to_string( col ) + ": " + e.what(),
                      line, col );
  }

  auto fail = []( std::string const& where, std::string const& what ) -> ParseError {
    return ParseError( "netlist " + where + ": " + what );
  };
  if ( !doc.is_object() )
    throw fail( "/", "top level must be an object" );
  for ( auto const& [k, v] : doc.items() )
    if ( k != "inputs" && k != "gates" && k != "wires" && k != "outputs" )
      throw fail( "/" + k, "unknown key" );

  auto resistance = [&]( json const& v, std::string const& where ) {
    if ( v.is_number() )
    {
      double const d = v.get<double>();
      if ( !( d > 0.0 ) )
        throw fail( where, "memristance must be positive" );
      return d;
    }
    if ( v.is_string() )
    {
      try
      {
        return parse_resistance( v.get<std::string>() );
      }
      catch ( ParseError const& e )
      {
        throw fail( where, e.what() );
      }
    }
    throw fail( where, "memristance must be a number or a string" );
  };
  auto list = [&]( json const& v, std::string const& where ) {
    if ( !v.is_array() )
      throw fail( where, "expected an array" );
    std::vector<double> out;
    for ( std::size_t i = 0; i < v.size(); ++i )
      out.push_back( resistance( v[i], where + "/" + std::to_string( i ) ) );
    return out;
  };

  Netlist net;
  std::map<std::string, std::size_t> by_name;
  if ( !doc.contains( "gates" ) || !doc["gates"].is_array() )
    throw fail( "/gates", "required array missing" );
  for ( std::size_t g = 0; g < doc["gates"].size(); ++g )
  {
    auto const& jg = doc["gates"][g];
    auto const where = "/gates/" + std::to_string( g );
    if ( !jg.is_object() )
      throw fail( where, "expected an object" );
    for ( auto const& [k, v] : jg.items() )
      if ( k != "name" && k != "inputs" && k != "thresholds" && k != "tie_rule" )
        throw fail( where + "/" + k, "unknown key" );
    if ( !jg.contains( "name" ) || !jg["name"].is_string() )
      throw fail( where + "/name", "gate name (string) required" );
    auto name = jg["name"].get<std::string>();
    if ( name.empty() || name.find( '.' ) != std::string::npos || ( name.rfind( "in", 0 ) == 0 && name.size() > 2 &&
                                                                    std::isdigit( static_cast<unsigned char>( name[2] ) ) ) )
      throw fail( where + "/name", "gate name must be non-empty, without '.', and not of the form in<k>" );
    if ( by_name.count( name ) )
      throw fail( where + "/name", "duplicate gate name '" + name + "'" );
    if ( !jg.contains( "inputs" ) )
      throw fail( where + "/inputs", "required" );
    if ( !jg.contains( "thresholds" ) )
      throw fail( where + "/thresholds", "required" );

    GateConfig cfg{ list( jg["inputs"], where + "/inputs" ), list( jg["thresholds"], where + "/thresholds" ), levels,
                    TieRule::input_wins, {} };
    if ( jg.contains( "tie_rule" ) )
    {
      if ( !jg["tie_rule"].is_string() )
        throw fail( where + "/tie_rule", "expected a string" );
      try
      {
        cfg.tie_rule = parse_tie_rule( jg["tie_rule"].get<std::string>() );
      }
      catch ( ParseError const& e )
      {
        throw fail( where + "/tie_rule", e.what() );
      }
    }
    by_name[name] = net.gates.size();
    net.gates.push_back( { name, cfg } );
  }

  auto index_after = []( std::string const& s, std::size_t pos ) -> std::optional<std::size_t> {
    if ( pos >= s.size() || s.size() - pos > 4 )
      return std::nullopt;
    for ( std::size_t i = pos; i < s.size(); ++i )
      if ( !std::isdigit( static_cast<unsigned char>( s[i] ) ) )
        return std::nullopt;
    return static_cast<std::size_t>( std::stoul( s.substr( pos ) ) );
  };
  auto gate_ref = [&]( std::string const& s, std::string const& where ) -> std::pair<std::size_t, std::string> {
    auto const dot = s.find( '.' );
    if ( dot == std::string::npos )
      throw fail( where, "expected <gate>.<port>, got '" + s + "'" );
    auto it = by_name.find( s.substr( 0, dot ) );
    if ( it == by_name.end() )
      throw fail( where, "unknown gate '" + s.substr( 0, dot ) + "'" );
    return { it->second, s.substr( dot + 1 ) };
  };
  auto tap_ref = [&]( std::string const& s, std::string const& where ) {
    auto [g, port] = gate_ref( s, where );
    if ( port == "CA" )
      return GateTap{ g, Tap::ca };
    if ( port == "CO" )
      return GateTap{ g, Tap::co };
    throw fail( where, "tap must be CA or CO, got '" + port + "'" );
  };

  std::size_t max_primary = 0;
  if ( doc.contains( "wires" ) )
  {
    if ( !doc["wires"].is_array() )
      throw fail( "/wires", "expected an array" );
    for ( std::size_t w = 0; w < doc["wires"].size(); ++w )
    {
      auto const& jw = doc["wires"][w];
      auto const where = "/wires/" + std::to_string( w );
      if ( !jw.is_object() || !jw.contains( "from" ) || !jw.contains( "to" ) || !jw["from"].is_string() ||
           !jw["to"].is_string() )
        throw fail( where, "wire needs string fields 'from' and 'to'" );
      for ( auto const& [k, v] : jw.items() )
        if ( k != "from" && k != "to" )
          throw fail( where + "/" + k, "unknown key" );

      auto const from = jw["from"].get<std::string>();
      WireSource src;
      if ( from.rfind( "in", 0 ) == 0 && from.find( '.' ) == std::string::npos )
      {
        auto k = index_after( from, 2 );
        if ( !k || *k == 0 )
          throw fail( where + "/from", "primary inputs are in1, in2, ..." );
        src = PrimaryInput{ *k - 1 };
        max_primary = std::max( max_primary, *k );
      }
      else
        src = tap_ref( from, where + "/from" );

      auto [g, port] = gate_ref( jw["to"].get<std::string>(), where + "/to" );
      auto slot = index_after( port, 0 );
      if ( !slot || *slot == 0 )
        throw fail( where + "/to", "destination slot must be a number from 1" );
      net.wires.push_back( { src, g, *slot - 1 } );
    }
  }

  if ( doc.contains( "inputs" ) )
  {
    if ( !doc["inputs"].is_number_unsigned() )
      throw fail( "/inputs", "expected a non-negative integer" );
    net.primary_inputs = doc["inputs"].get<std::size_t>();
  }
  else
    net.primary_inputs = max_primary;

  if ( doc.contains( "outputs" ) )
  {
    if ( !doc["outputs"].is_array() )
      throw fail( "/outputs", "expected an array" );
    for ( std::size_t o = 0; o < doc["outputs"].size(); ++o )
    {
      auto const where = "/outputs/" + std::to_string( o );
      if ( !doc["outputs"][o].is_string() )
        throw fail( where, "expected \"<gate>.CA\" or \"<gate>.CO\"" );
      net.primary_outputs.push_back( tap_ref( doc["outputs"][o].get<std::string>(), where ) );
    }
  }
  return net;
}

/// Reads, parses and validates; structural problems raise NetlistError.
inline Netlist parse_netlist_file( std::string const& path, VoltageLevels const& levels = {} )
{
  std::ifstream is( path );
  if ( !is )
    throw ParseError( "cannot open netlist file '" + path + "'" );
  std::stringstream ss;
  ss << is.rdbuf();
  auto net = parse_netlist( ss.str(), levels );
  if ( auto rep = validate( net ); !rep )
    throw NetlistError( std::move( rep ) );
  return net;
}

} // namespace mcmtlg::io
