#include <catch_amalgamated.hpp>

#include <sstream>

#include <mcmtlg/io.hpp>
#include <mcmtlg/synth.hpp>

using namespace mcmtlg;
using namespace mcmtlg::io;

namespace
{

std::size_t error_column( std::string const& text )
{
  try
  {
    parse_weights( text );
  }
  catch ( ParseError const& e )
  {
    return e.column;
  }
  return 0;
}

ProjectConfig config( std::string const& text )
{
  std::istringstream is( text );
  return parse_config( is );
}

} // namespace

TEST_CASE( "resistance and weight strings", "[io]" )
{
  CHECK( parse_resistance( "33k" ) == 33e3 );
  CHECK( parse_resistance( " 60.5K " ) == 60.5e3 );
  CHECK( parse_resistance( "3M" ) == 3e6 );
  CHECK( parse_resistance( "2.5e6" ) == 2.5e6 );
  CHECK_THROWS_AS( parse_resistance( "-1k" ), ParseError );
  CHECK_THROWS_AS( parse_resistance( "" ), ParseError );

  auto w = parse_weights( "60.5k,60k;33k" );
  CHECK( w.inputs == std::vector<double>{ 60.5e3, 60e3 } );
  CHECK( w.thresholds == std::vector<double>{ 33e3 } );

  CHECK( error_column( "60.5k,6x0k;33k" ) == 8 );
  CHECK( error_column( "60.5k,60k;33k;1k" ) == 14 );
  CHECK( error_column( "60.5k,60k" ) == 10 );
  CHECK( error_column( "60.5k,,60k;1k" ) == 7 );

  GateConfig g{ w.inputs, w.thresholds, {}, TieRule::input_wins, {} };
  auto const again = parse_weights( format_weights( g ) );
  CHECK( again.inputs == w.inputs );
  CHECK( again.thresholds == w.thresholds );
}

TEST_CASE( "bit vectors and tie rules", "[io]" )
{
  CHECK( parse_bits( "011" ) == InputVector( { 0, 1, 1 } ) );
  CHECK_THROWS_AS( parse_bits( "01a" ), ParseError );
  CHECK_THROWS_AS( parse_bits( "" ), ParseError );
  CHECK( parse_tie_rule( "InputWins" ) == TieRule::input_wins );
  CHECK( parse_tie_rule( "threshold_wins" ) == TieRule::threshold_wins );
  CHECK_THROWS_AS( parse_tie_rule( "coin" ), ParseError );
}

TEST_CASE( "scientific formatting", "[io]" )
{
  CHECK( format_sci( 2.1577134986225895e-05 ) == "2.1577e-5" );
  CHECK( format_sci( 1.9696969696969697e-05 ) == "1.9697e-5" );
  CHECK( format_sci( 0.0 ) == "0.0000e0" );
  CHECK( format_sci( 1234.5 ) == "1.2345e3" );
}

TEST_CASE( "INI configuration", "[io]" )
{
  auto const c = config( "[device]\nprofile = mohm\nbits = 4\n"
                         "[gate]\nweights = \"3M,3M;2.5M\"\ntie_rule = ThresholdWins\n"
                         "[clock]\nperiod_s = 1e-3\n" );
  CHECK( c.device.r_min == 1e6 );
  CHECK( c.device.bits == 4 );
  CHECK( c.tie_rule == TieRule::threshold_wins );
  REQUIRE( c.weights );
  CHECK( c.weights->thresholds == std::vector<double>{ 2.5e6 } );
  CHECK( c.clock.sample_dt == Catch::Approx( 1e-3 / 200 ) );

  auto const gate = make_gate( c, std::nullopt );
  CHECK( truth_table( gate ).to_bitstring() == "1000" );
  auto const over = make_gate( c, parse_weights( "3M,3M;5M" ) );
  CHECK( truth_table( over ).to_bitstring() == "1110" );

  CHECK( config( "" ).device == DeviceModel::kohm_profile() );
  CHECK_THROWS_AS( config( "[device]\ncolour = red\n" ), ParseError );
  CHECK_THROWS_AS( config( "[wiring]\nx = 1\n" ), ParseError );
  CHECK_THROWS_AS( config( "[device]\nr_min_ohm = 200k\n" ), ParseError );
  CHECK_THROWS_AS( config( "[levels]\nv_dd_v = abc\n" ), ParseError );
  CHECK_THROWS_AS( make_gate( config( "" ), std::nullopt ), ParseError );
}

TEST_CASE( "synthesized configs round-trip through the INI reader", "[io]" )
{
  auto const target = parse_target( "MAJ:2", 3 );
  auto const r = synthesize( { target } );
  REQUIRE( r.feasible );
  auto const text = write_gate_config( r.quantized_config );
  auto const gate = make_gate( config( text ), std::nullopt );
  CHECK( gate.inputs == r.quantized_config.inputs );
  CHECK( gate.thresholds == r.quantized_config.thresholds );
  CHECK( truth_table( gate ) == target );
}

TEST_CASE( "netlist JSON", "[io]" )
{
  std::string const xor_text = R"({
    "gates": [
      { "name": "A", "inputs": ["33.8k", "18.3k"], "thresholds": ["41.6k"] },
      { "name": "B", "inputs": [60500, 60000], "thresholds": ["33k"] },
      { "name": "C", "inputs": ["60.5k", "60k"], "thresholds": ["33k"], "tie_rule": "InputWins" }
    ],
    "wires": [
      { "from": "in1", "to": "A.1" }, { "from": "in2", "to": "A.2" },
      { "from": "in1", "to": "B.1" }, { "from": "in2", "to": "B.2" },
      { "from": "A.CA", "to": "C.1" }, { "from": "B.CO", "to": "C.2" }
    ],
    "outputs": ["C.CA"]
  })";
  auto const net = parse_netlist( xor_text );
  CHECK( net.primary_inputs == 2 );
  CHECK( net.gates.size() == 3 );
  CHECK( net.wires[5].to_slot == 1 );
  CHECK( network_truth_table( net )[0].to_bitstring() == "0110" );

  try
  {
    parse_netlist( "{\n  \"gates\": [\n    { \"name\": \"A\" ,, }\n  ]\n}" );
    FAIL( "expected a parse error" );
  }
  catch ( ParseError const& e )
  {
    CHECK( e.line == 3 );
    CHECK( e.column > 0 );
  }

  auto message = []( std::string const& text ) -> std::string {
    try
    {
      parse_netlist( text );
    }
    catch ( ParseError const& e )
    {
      return e.what();
    }
    return {};
  };
  CHECK( message( R"({"gates": [{"name": "A", "inputs": ["1q"], "thresholds": ["1k"]}]})" )
             .find( "/gates/0/inputs/0" ) != std::string::npos );
  CHECK( message( R"({"gates": [], "wires": [{"from": "in1", "to": "Z.1"}]})" ).find( "unknown gate 'Z'" ) !=
         std::string::npos );
  CHECK( message( R"({"gates": [{"name": "A", "inputs": ["1k"], "thresholds": ["1k"]}], "outputs": ["A.XX"]})" )
             .find( "/outputs/0" ) != std::string::npos );
  CHECK( message( R"({"gates": [], "extra": 1})" ).find( "/extra" ) != std::string::npos );
  CHECK( message( R"({"gates": [{"name": "A", "inputs": ["1k"], "thresholds": ["1k"]},
                               {"name": "A", "inputs": ["1k"], "thresholds": ["1k"]}]})" )
             .find( "duplicate" ) != std::string::npos );
}
