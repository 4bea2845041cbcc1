#include <catch_amalgamated.hpp>

#include <random>

#include <mcmtlg/synth.hpp>

#include "oracle.hpp"

using namespace mcmtlg;
using Catch::Approx;

namespace
{

TruthTable table_from_index( std::size_t n, std::uint64_t bits )
{
  std::vector<std::uint8_t> v( std::size_t{ 1 } << n );
  for ( std::size_t k = 0; k < v.size(); ++k )
    v[k] = ( bits >> k ) & 1u;
  return TruthTable( n, std::move( v ) );
}

bool monotone( std::vector<std::uint8_t> const& tt, std::size_t n )
{
  for ( std::size_t k = 0; k < tt.size(); ++k )
    for ( std::size_t b = 0; b < n; ++b )
      if ( tt[k] > tt[k | ( std::size_t{ 1 } << b )] )
        return false;
  return true;
}

} // namespace

TEST_CASE( "check_separability examples", "[synth]" )
{
  auto x = check_separability( TruthTable::from_bitstring( "0110" ) );
  REQUIRE_FALSE( x.feasible );
  REQUIRE( x.witness );
  CHECK( x.witness->kind == InfeasibilityWitness::Kind::monotonicity );
  CHECK( x.witness->false_points[0] == InputVector( { 1, 1 } ) );
  CHECK( x.witness->describe().find( "11" ) != std::string::npos );

  CHECK( check_separability( TruthTable::from_bitstring( "1000" ) ).feasible );

  auto one = check_separability( TruthTable::from_bitstring( "1111" ) );
  REQUIRE_FALSE( one.feasible );
  CHECK( one.witness->kind == InfeasibilityWitness::Kind::zero_input_true );

  // x1x2 | x3x4 is monotone but not a threshold function
  auto two_pairs = parse_target( "OR", 4 );
  for ( std::size_t k = 0; k < 16; ++k )
    two_pairs.outputs[k] = ( ( k & 0b1100 ) == 0b1100 ) || ( ( k & 0b0011 ) == 0b0011 );
  auto tp = check_separability( two_pairs );
  REQUIRE_FALSE( tp.feasible );
  CHECK( tp.witness->kind == InfeasibilityWitness::Kind::asummable );
}

TEST_CASE( "separability agrees with integer-weight enumeration for n <= 4", "[synth][oracle]" )
{
  for ( std::size_t n = 1; n <= 3; ++n )
    for ( std::uint64_t f = 0; f < ( 1ull << ( 1u << n ) ); ++f )
    {
      auto const tt = table_from_index( n, f );
      INFO( "n=" << n << " table=" << tt.to_bitstring() );
      CHECK( check_separability( tt ).feasible == oracle::integer_threshold_realizable( tt.outputs, n, 3 ) );
    }

  // n = 4: only monotone tables can pass; enumerate those against the oracle
  int threshold_count = 0;
  for ( std::uint64_t f = 0; f < ( 1ull << 16 ); ++f )
  {
    auto const tt = table_from_index( 4, f );
    if ( !monotone( tt.outputs, 4 ) )
    {
      CHECK_FALSE( check_separability( tt ).feasible );
      continue;
    }
    bool const expect = oracle::integer_threshold_realizable( tt.outputs, 4, 3 );
    CHECK( check_separability( tt ).feasible == expect );
    threshold_count += expect;
  }
  // positive threshold functions of 4 variables with f(0) = 0: 150 monotone
  // threshold functions minus the constant one
  CHECK( threshold_count == 149 );
}

TEST_CASE( "n = 2 completeness", "[synth]" )
{
  std::vector<std::string> feasible;
  for ( std::uint64_t f = 0; f < 16; ++f )
  {
    auto const tt = table_from_index( 2, f );
    SynthesisSpec spec{ tt };
    auto const r = synthesize( spec );
    if ( r.feasible )
    {
      feasible.push_back( tt.to_bitstring() );
      CHECK( verify( r, tt ).pass );
      CHECK( r.quantized_ok );
    }
    else
      CHECK( r.witness.has_value() );
  }
  CHECK( feasible == std::vector<std::string>{ "0000", "1000", "1010", "1100", "1110" } );
}

TEST_CASE( "AND synthesis obeys the memristance inequalities", "[synth]" )
{
  SynthesisSpec spec{ TruthTable::from_bitstring( "1000" ) };
  auto r = synthesize( spec );
  REQUIRE( r.feasible );
  auto const& m = r.config.inputs;
  double const th = r.config.thresholds[0];
  CHECK( m[0] > th );
  CHECK( m[1] > th );
  CHECK( m[0] * m[1] / ( m[0] + m[1] ) < th );
  CHECK( truth_table( r.config ) == spec.target );
  CHECK( truth_table( r.quantized_config ) == spec.target );
  CHECK( r.achieved_margin >= 0.05 );
  for ( double v : m )
    CHECK( spec.device.contains( v ) );
  CHECK( spec.device.contains( th ) );
}

TEST_CASE( "MAJ-2 of 3 synthesizes and matches brute force", "[synth]" )
{
  auto const tt = parse_target( "MAJ:2", 3 );
  auto r = synthesize( { tt } );
  REQUIRE( r.feasible );
  CHECK( oracle::truth_table( r.config.inputs, r.config.thresholds, true ) == tt.outputs );
  CHECK( oracle::truth_table( r.quantized_config.inputs, r.quantized_config.thresholds, true ) == tt.outputs );
}

TEST_CASE( "XOR is rejected, narrow ranges raise", "[synth]" )
{
  auto r = synthesize( { parse_target( "XOR", 2 ) } );
  CHECK_FALSE( r.feasible );
  REQUIRE( r.witness );

  SynthesisSpec greedy{ parse_target( "AND", 2 ) };
  greedy.min_margin_rel = 0.9;
  CHECK_THROWS_AS( synthesize( greedy ), MarginError );

  // AND needs g_T between one and two input conductances; fine in a 2x range
  SynthesisSpec tight{ parse_target( "AND", 2 ) };
  tight.device.r_min = 50e3;
  tight.device.r_max = 100e3;
  tight.min_margin_rel = 0.0;
  CHECK( synthesize( tight ).feasible );

  // MAJ-3 needs g_T above two input conductances; a 90k..100k device cannot host that
  SynthesisSpec maj{ parse_target( "MAJ:3", 10 ) };
  maj.device.r_min = 90e3;
  CHECK_THROWS_AS( synthesize( maj ), MarginError );
}

TEST_CASE( "verify reports exact margins", "[synth]" )
{
  GateConfig and_cfg{ { 60.5e3, 60e3 }, { 33e3 }, {}, TieRule::input_wins, {} };
  auto rep = verify( and_cfg, TruthTable::from_bitstring( "1000" ) );
  CHECK( rep.pass );
  // (21.577 - 19.697) / 19.697 with exact rationals
  CHECK( rep.worst_margin == Approx( 0.09545454545454546 ).epsilon( 1e-12 ) );
  CHECK( rep.margins[0] == 1.0 );

  GateConfig or_cfg{ { 33.8e3, 18.3e3 }, { 41.6e3 }, {}, TieRule::input_wins, {} };
  CHECK( verify( or_cfg, TruthTable::from_bitstring( "1110" ) ).pass );

  auto bad = verify( and_cfg, TruthTable::from_bitstring( "1110" ) );
  CHECK_FALSE( bad.pass );
  CHECK( bad.first_mismatch == std::size_t{ 1 } );
  CHECK( bad.worst_margin < 0 );

  // an exact tie is decided by the tie rule
  GateConfig tie{ { 2e6, 2e6, 2e6 }, { 1e6 }, {}, TieRule::input_wins, {} };
  CHECK( verify( tie, parse_target( "MAJ:2", 3 ) ).pass );
  tie.tie_rule = TieRule::threshold_wins;
  CHECK( verify( tie, parse_target( "AND", 3 ) ).pass );
}

TEST_CASE( "synthesis properties on random threshold functions", "[synth][property]" )
{
  std::mt19937_64 rng( 2024 );
  std::uniform_int_distribution<int> wdist( 1, 6 );
  std::uniform_int_distribution<int> ndist( 1, 5 );
  std::uniform_int_distribution<int> bdist( 3, 7 );
  std::uniform_real_distribution<double> lam( 0.01, 100.0 );

  int checked_bound = 0;
  for ( int trial = 0; trial < 300; ++trial )
  {
    auto const n = static_cast<std::size_t>( ndist( rng ) );
    std::vector<int> w( n );
    int total = 0;
    for ( auto& x : w )
      total += x = wdist( rng );
    int const t = std::uniform_int_distribution<int>( 1, total + 1 )( rng );
    std::vector<std::uint8_t> out( std::size_t{ 1 } << n );
    for ( std::size_t k = 0; k < out.size(); ++k )
    {
      int s = 0;
      for ( std::size_t i = 0; i < n; ++i )
        if ( ( k >> ( n - 1 - i ) ) & 1u )
          s += w[i];
      out[k] = s >= t;
    }
    TruthTable const tt( n, out );

    SynthesisSpec spec{ tt };
    spec.device.bits = bdist( rng );
    spec.min_margin_rel = 0.0;
    SynthesisResult r;
    try
    {
      r = synthesize( spec );
    }
    catch ( MarginError const& )
    {
      continue; // weight ratios beyond the 10x device range
    }
    REQUIRE( r.feasible );

    // soundness
    auto const rep = verify( r, tt );
    REQUIRE( rep.pass );

    // margin scale invariance
    auto const scaled = verify( r.config.scaled( lam( rng ) ), tt );
    CHECK( scaled.pass );
    CHECK( scaled.worst_margin == Approx( rep.worst_margin ).epsilon( 1e-9 ) );

    // quantization safety
    if ( rep.worst_margin > quantization_margin_bound( r.config, spec.device ) )
    {
      ++checked_bound;
      CHECK( r.quantized_ok );
    }
  }
  CHECK( checked_bound > 50 );
}

TEST_CASE( "named and bitstring targets", "[synth]" )
{
  CHECK( parse_target( "and", 2 ).to_bitstring() == "1000" );
  CHECK( parse_target( "OR", 2 ).to_bitstring() == "1110" );
  CHECK( parse_target( "NAND", 2 ).to_bitstring() == "0111" );
  CHECK( parse_target( "NOR", 2 ).to_bitstring() == "0001" );
  CHECK( parse_target( "XOR", 2 ).to_bitstring() == "0110" );
  CHECK( parse_target( "MAJ:2", 3 ).to_bitstring() == "11101000" );
  CHECK( parse_target( "DICT:1", 2 ).to_bitstring() == "1100" );
  CHECK( parse_target( "DICT:2", 2 ).to_bitstring() == "1010" );
  CHECK( parse_target( "0110", std::nullopt ).n == 2 );
  CHECK_THROWS_AS( parse_target( "0110", 3 ), PreconditionError );
  CHECK_THROWS_AS( parse_target( "AND", std::nullopt ), PreconditionError );
  CHECK_THROWS_AS( parse_target( "MAJ:4", 3 ), PreconditionError );
  CHECK_THROWS_AS( parse_target( "FOO", 2 ), PreconditionError );
}

TEST_CASE( "complement targets are read from CO", "[synth]" )
{
  auto [r, tgt] = synthesize_either_output( { parse_target( "NAND", 2 ) } );
  REQUIRE( r.feasible );
  CHECK( tgt.read_from_co );
  CHECK( truth_table( r.config ).complement() == parse_target( "NAND", 2 ) );

  auto [x, xt] = synthesize_either_output( { parse_target( "XNOR", 2 ) } );
  CHECK_FALSE( x.feasible );
}

TEST_CASE( "ten-input synthesis", "[synth]" )
{
  auto r = synthesize( { parse_target( "MAJ:5", 10 ) } );
  REQUIRE( r.feasible );
  CHECK( verify( r, parse_target( "MAJ:5", 10 ) ).pass );
  CHECK_THROWS_AS( check_separability( TruthTable( 11, std::vector<std::uint8_t>( 2048 ) ) ), PreconditionError );
}
