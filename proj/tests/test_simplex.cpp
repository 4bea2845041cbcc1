#include <catch_amalgamated.hpp>

#include <mcmtlg/exact.hpp>
#include <mcmtlg/simplex.hpp>

using namespace mcmtlg;
using namespace mcmtlg::lp;
using Catch::Approx;

TEST_CASE( "textbook maximization", "[simplex]" )
{
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
  auto sol = maximize<double>( { 3, 5 },
                               { { { 1, 0 }, Relation::less_equal, 4 },
                                 { { 0, 2 }, Relation::less_equal, 12 },
                                 { { 3, 2 }, Relation::less_equal, 18 } },
                               1e-12 );
  REQUIRE( sol.status == Status::optimal );
  CHECK( sol.objective == Approx( 36 ) );
  CHECK( sol.x[0] == Approx( 2 ) );
  CHECK( sol.x[1] == Approx( 6 ) );
}

TEST_CASE( "phase one with >= and = rows, exact arithmetic", "[simplex]" )
{
  // max x + y  s.t. x + y >= 2, x - y = 1, x <= 3  -> x = 3, y = 2
  auto sol = maximize<Rational>( { 1, 1 },
                                 { { { 1, 1 }, Relation::greater_equal, 2 },
                                   { { 1, -1 }, Relation::equal, 1 },
                                   { { 1, 0 }, Relation::less_equal, 3 } } );
  REQUIRE( sol.status == Status::optimal );
  CHECK( sol.objective == 5 );
  CHECK( sol.x[0] == 3 );
  CHECK( sol.x[1] == 2 );

  // negative right-hand side gets normalized: -x <= -1  <=>  x >= 1; min x -> 1
  auto neg = maximize<Rational>( { -1 }, { { { -1 }, Relation::less_equal, -1 } } );
  REQUIRE( neg.status == Status::optimal );
  CHECK( neg.x[0] == 1 );
}

TEST_CASE( "infeasible and unbounded programs", "[simplex]" )
{
  auto inf = maximize<double>( { 1 },
                               { { { 1 }, Relation::less_equal, 1 }, { { 1 }, Relation::greater_equal, 2 } }, 1e-12 );
  CHECK( inf.status == Status::infeasible );

  auto unb = maximize<double>( { 1, 0 }, { { { -1, 1 }, Relation::less_equal, 1 } }, 1e-12 );
  CHECK( unb.status == Status::unbounded );
}

TEST_CASE( "degenerate program terminates under Bland's rule", "[simplex]" )
{
  // classic cycling example (Beale)
  auto sol = maximize<Rational>( { Rational( 3, 4 ), -150, Rational( 1, 50 ), -6 },
                                 { { { Rational( 1, 4 ), -60, Rational( -1, 25 ), 9 }, Relation::less_equal, 0 },
                                   { { Rational( 1, 2 ), -90, Rational( -1, 50 ), 3 }, Relation::less_equal, 0 },
                                   { { 0, 0, 1, 0 }, Relation::less_equal, 1 } } );
  REQUIRE( sol.status == Status::optimal );
  CHECK( sol.objective == Rational( 1, 20 ) );
}
