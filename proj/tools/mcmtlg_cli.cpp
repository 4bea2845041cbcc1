// Command-line front end for the threshold-gate simulator.
//
// Exit codes: 0 ok, 2 usage / parse error, 3 model error (dimension
// mismatch, infeasible target, unresolved latch, out-of-range value).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mcmtlg/io.hpp>
#include <mcmtlg/mcmtlg.hpp>

using namespace mcmtlg;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_model = 3;

struct Common
{
  std::string config_path;
  std::string weights;
  std::string tie_rule;
};

io::ProjectConfig load( Common const& c )
{
  auto cfg = c.config_path.empty() ? io::ProjectConfig{} : io::load_config( c.config_path );
  if ( !c.tie_rule.empty() )
    cfg.tie_rule = io::parse_tie_rule( c.tie_rule );
  return cfg;
}

GateConfig gate_from( Common const& c, io::ProjectConfig const& cfg )
{
  std::optional<io::Weights> w;
  if ( !c.weights.empty() )
    w = io::parse_weights( c.weights );
  return io::make_gate( cfg, w );
}

std::string fmt9( double v )
{
  char buf[40];
  std::snprintf( buf, sizeof buf, "%.9g", v );
  return buf;
}

std::ostream& open_out( std::string const& path, std::ofstream& file )
{
  if ( path.empty() || path == "-" )
    return std::cout;
  file.open( path );
  if ( !file )
    throw ParseError( "cannot write '" + path + "'" );
  return file;
}

int cmd_eval( Common const& c, std::string const& bits )
{
  auto const cfg = load( c );
  auto const gate = gate_from( c, cfg );
  auto const in = io::parse_bits( bits );
  auto const cur = branch_currents( gate, in );
  auto const out = compare( cur.i_in, cur.i_th, gate.tie_rule );
  std::cout << "CA=" << out.ca << " CO=" << out.co << " Iin=" << io::format_sci( cur.i_in )
            << " Ith=" << io::format_sci( cur.i_th ) << ( out.tie ? " tie=1" : "" ) << "\n";
  return exit_ok;
}

int cmd_truth( Common const& c )
{
  auto const cfg = load( c );
  auto const gate = gate_from( c, cfg );
  auto const tt = truth_table( gate );
  for ( std::size_t i = 0; i < tt.n; ++i )
    std::cout << "x" << ( i + 1 ) << " ";
  std::cout << "| CA CO\n";
  for ( std::uint32_t k = 0; k < tt.rows(); ++k )
  {
    auto const in = InputVector::from_index( k, tt.n );
    for ( std::size_t i = 0; i < tt.n; ++i )
      std::cout << in[i] << std::string( std::to_string( i + 1 ).size() + 1, ' ' );
    std::cout << "| " << tt[k] << "  " << !tt[k] << "\n";
  }
  std::cout << "table=" << tt.to_bitstring() << "\n";
  std::cout << "class=" << to_string( classify( tt ), tt.n ) << "\n";
  return exit_ok;
}

int cmd_boundary( Common const& c, std::size_t res, std::string const& out_path )
{
  auto const cfg = load( c );
  auto const gate = gate_from( c, cfg );
  auto const grid = boundary_grid( gate, res );
  auto const tt = truth_table( gate );

  std::ofstream file;
  auto& os = open_out( out_path, file );
  for ( std::size_t i = 0; i < grid.n; ++i )
    os << "a" << ( i + 1 ) << ",";
  os << "class\n";
  std::vector<std::size_t> idx( grid.n, 0 );
  for ( std::size_t flat = 0; flat < grid.cells.size(); ++flat )
  {
    for ( auto j : idx )
      os << fmt9( grid.axis_value( j ) ) << ",";
    os << int( grid.cells[flat] ) << "\n";
    for ( auto i = grid.n; i-- > 0; )
    {
      if ( ++idx[i] < grid.resolution )
        break;
      idx[i] = 0;
    }
  }

  std::ostringstream meta;
  meta << "hyperplane: ";
  for ( auto g : grid.plane.g )
    meta << fmt9( g ) << ",";
  meta << fmt9( grid.plane.g_t ) << "\n";
  meta << "class: " << to_string( classify( tt ), tt.n ) << "\n";
  meta << "tie_rule: " << to_string( gate.tie_rule ) << "\n";
  meta << "note: cells with sum(a_i/M_i) equal to sum(1/TH_j) follow the tie rule; corner classes come from the "
          "conductance inequality, not from any external labelling\n";

  if ( out_path.empty() || out_path == "-" )
    std::cerr << meta.str();
  else
  {
    std::ofstream side( out_path + ".hyperplane" );
    side << meta.str();
    std::cout << meta.str();
  }
  return exit_ok;
}

int cmd_wave( Common const& c, std::string const& seq, std::string const& out_path )
{
  auto cfg = load( c );
  auto const gate = gate_from( c, cfg );
  std::vector<InputVector> inputs;
  std::stringstream ss( seq );
  for ( std::string item; std::getline( ss, item, ',' ); )
    inputs.push_back( io::parse_bits( item ) );
  if ( inputs.empty() )
    throw ParseError( "--inputs needs at least one input vector" );
  for ( auto const& in : inputs )
    if ( in.size() != gate.num_inputs() )
      throw DimensionError( "input vector '" + in.to_string() + "' does not match the gate's " +
                            std::to_string( gate.num_inputs() ) + " inputs" );

  auto clock = cfg.clock;
  clock.n_cycles = static_cast<int>( inputs.size() );
  auto const trace = simulate( gate, inputs, clock, cfg.transient );

  std::ofstream file;
  trace.write_csv( open_out( out_path, file ) );

  bool all = true;
  for ( std::size_t k = 0; k < inputs.size(); ++k )
  {
    auto const ev = evaluate( gate, inputs[k] );
    std::cerr << "cycle " << k << " in=" << inputs[k].to_string() << " CA=" << ev.ca << " CO=" << ev.co
              << " resolved=" << trace.cycle_resolved[k];
    if ( auto t = trace.cycle_settle_time[k] )
      std::cerr << " settle_s=" << io::format_sci( *t );
    std::cerr << "\n";
    all = all && trace.cycle_resolved[k];
  }
  if ( !all )
  {
    std::cerr << "error: latch left unresolved in at least one cycle\n";
    return exit_model;
  }
  return exit_ok;
}

int cmd_synth( Common const& c, std::string const& target, std::optional<std::size_t> n, std::optional<double> margin,
               std::string const& out_path )
{
  auto const cfg = load( c );
  SynthesisSpec spec;
  spec.device = cfg.device;
  spec.tie_rule = cfg.tie_rule;
  if ( margin )
    spec.min_margin_rel = *margin;
  try
  {
    spec.target = parse_target( target, n );
  }
  catch ( PreconditionError const& e )
  {
    throw ParseError( e.what() );
  }

  auto const [res, tgt] = synthesize_either_output( spec );
  auto const& tt = tgt.function;
  std::cout << "target=" << tt.to_bitstring() << " class=" << to_string( classify( tt ), tt.n ) << "\n";
  std::cout << "feasible=" << res.feasible << "\n";
  if ( !res.feasible )
  {
    std::cout << "witness: " << res.witness->describe() << "\n";
    std::cerr << "error: target is not realizable by a single threshold gate\n";
    return exit_model;
  }

  auto join = [&]( std::vector<double> const& v ) {
    std::string s;
    for ( std::size_t i = 0; i < v.size(); ++i )
      s += ( i ? "," : "" ) + fmt9( v[i] );
    return s;
  };
  std::cout << "output=" << ( tgt.read_from_co ? "CO" : "CA" ) << "\n";
  std::cout << "conductances_S=" << join( res.conductances ) << ";" << fmt9( res.threshold_conductance ) << "\n";
  std::cout << "memristances_ohm=" << join( res.config.inputs ) << ";" << join( res.config.thresholds ) << "\n";
  std::cout << "margin=" << fmt9( res.achieved_margin ) << "\n";
  std::cout << "quantized_ohm=" << join( res.quantized_config.inputs ) << ";" << join( res.quantized_config.thresholds )
            << "\n";
  std::cout << "quantized_levels=";
  for ( std::size_t i = 0; i < res.quantized_levels.size(); ++i )
    std::cout << ( i ? "," : "" ) << res.quantized_levels[i];
  std::cout << "\n";
  std::cout << "quantized_ok=" << res.quantized_ok << "\n";
  std::cout << "quantized_margin=" << fmt9( res.quantized_margin ) << "\n";
  if ( res.quantized_failing_row )
    std::cout << "quantized_failing_row="
              << InputVector::from_index( static_cast<std::uint32_t>( *res.quantized_failing_row ), tt.n ).to_string()
              << "\n";

  if ( !out_path.empty() )
  {
    auto const& written = res.quantized_ok ? res.quantized_config : res.config;
    std::ofstream os( out_path );
    if ( !os )
      throw ParseError( "cannot write '" + out_path + "'" );
    os << io::write_gate_config( written );
    std::cout << "wrote=" << out_path << " (" << ( res.quantized_ok ? "quantized" : "continuous" ) << ")\n";
  }
  return exit_ok;
}

int cmd_program( Common const& c, std::string const& target_text, std::string const& start_text, double tol,
                 int max_pulses )
{
  auto const cfg = load( c );
  double const target = io::parse_resistance( target_text );
  MemristorState start( cfg.device );
  if ( !start_text.empty() )
    start = MemristorState( cfg.device, io::parse_resistance( start_text ) );
  auto const out = program_to_target( start, target, tol, max_pulses );
  auto const q = quantize( out.state.resistance(), cfg.device );
  std::cout << "pulses=" << out.pulses << " reads=" << out.reads << " R=" << fmt9( out.state.resistance() )
            << " target=" << fmt9( target ) << " rel_err=" << io::format_sci( out.state.resistance() / target - 1.0 )
            << " nearest_level=" << q.index << "\n";
  return exit_ok;
}

int cmd_net( Common const& c, std::string const& path )
{
  auto const cfg = load( c );
  auto const net = io::parse_netlist_file( path, cfg.levels );
  auto const tables = network_truth_table( net );
  for ( std::size_t o = 0; o < tables.size(); ++o )
  {
    auto const& tap = net.primary_outputs[o];
    std::cout << net.gate_name( tap.gate ) << "." << to_string( tap.tap ) << " table=" << tables[o].to_bitstring()
              << " class=" << to_string( classify( tables[o] ), tables[o].n ) << "\n";
  }
  return exit_ok;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Memristive current-mode threshold gate simulator" };
  app.require_subcommand( 1 );

  Common common;
  auto add_common = [&]( CLI::App* sub, bool weights ) {
    sub->add_option( "--config", common.config_path, "INI project config" );
    sub->add_option( "--tie-rule", common.tie_rule, "InputWins or ThresholdWins" );
    if ( weights )
      sub->add_option( "--weights", common.weights, "\"M1,...,Mn;TH1,...\" with k/M suffixes" );
  };

  std::string bits, seq, out, target, start;
  std::size_t res = 101;
  std::optional<std::size_t> n;
  std::optional<double> margin;
  double tol = 0.01;
  int max_pulses = 200;

  auto* eval = app.add_subcommand( "eval", "evaluate one input vector" );
  add_common( eval, true );
  eval->add_option( "--input", bits, "logical input bits, x1 first" )->required();

  auto* truth = app.add_subcommand( "truth", "print the truth table and its class" );
  add_common( truth, true );

  auto* boundary = app.add_subcommand( "boundary", "decision-boundary grid as CSV" );
  add_common( boundary, true );
  boundary->add_option( "--res", res, "grid points per axis" );
  boundary->add_option( "--out", out, "CSV path (default stdout)" );

  auto* wave = app.add_subcommand( "wave", "two-phase transient waveform as CSV" );
  add_common( wave, true );
  wave->add_option( "--inputs", seq, "comma-separated input vectors, one per clock cycle" )->required();
  wave->add_option( "--out", out, "CSV path (default stdout)" );

  auto* synth = app.add_subcommand( "synth", "synthesize memristances for a target function" );
  add_common( synth, false );
  synth->add_option( "--target", target, "bitstring (all-ones row first) or AND|OR|NAND|NOR|XOR|XNOR|MAJ:k|DICT:i" )
      ->required();
  synth->add_option( "--n", n, "input count for named targets" );
  synth->add_option( "--min-margin", margin, "required relative current margin" );
  synth->add_option( "--out", out, "write the gate as a config file" );

  auto* program = app.add_subcommand( "program", "closed-loop program a device to a resistance" );
  add_common( program, false );
  program->add_option( "--target", target, "target resistance, e.g. 33k" )->required();
  program->add_option( "--start", start, "initial resistance (default r_max)" );
  program->add_option( "--tol", tol, "relative tolerance" );
  program->add_option( "--max-pulses", max_pulses, "pulse budget" );

  std::string net_file;
  auto* net = app.add_subcommand( "net", "truth tables of a gate netlist" );
  add_common( net, false );
  net->add_option( "--file", net_file, "netlist JSON" )->required();

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::CallForHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::ParseError const& e )
  {
    app.exit( e );
    return exit_parse;
  }

  try
  {
    if ( *eval )
      return cmd_eval( common, bits );
    if ( *truth )
      return cmd_truth( common );
    if ( *boundary )
      return cmd_boundary( common, res, out );
    if ( *wave )
      return cmd_wave( common, seq, out );
    if ( *synth )
      return cmd_synth( common, target, n, margin, out );
    if ( *program )
      return cmd_program( common, target, start, tol, max_pulses );
    if ( *net )
      return cmd_net( common, net_file );
  }
  catch ( ParseError const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  }
  catch ( ModelError const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_model;
  }
  return exit_parse;
}
