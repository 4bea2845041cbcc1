#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace mcmtlg::lp
{

enum class Relation
{
  less_equal,
  greater_equal,
  equal
};

template<typename Scalar>
struct Constraint
{
  std::vector<Scalar> coeffs;
  Relation rel;
  Scalar rhs;
};

enum class Status
{
  optimal,
  infeasible,
  unbounded
};

template<typename Scalar>
struct Solution
{
  Status status;
  Scalar objective{};
  std::vector<Scalar> x;
};

/*! \brief Dense two-phase tableau simplex.

  Maximizes c.x subject to the given constraints and x >= 0. Bland's rule is
  used throughout, so the method terminates on degenerate problems. With an
  exact scalar (rationals) pass `eps = 0`.
*/
template<typename Scalar>
class Simplex
{
public:
  Simplex( std::vector<Scalar> objective, std::vector<Constraint<Scalar>> constraints, Scalar eps )
      : c_( std::move( objective ) ), eps_( eps )
  {
    nvars_ = c_.size();
    rows_ = constraints.size();

    std::size_t nslack = 0, nart = 0;
    for ( auto& con : constraints )
    {
      if ( con.rhs < Scalar( 0 ) )
      {
        for ( auto& a : con.coeffs )
          a = -a;
        con.rhs = -con.rhs;
        if ( con.rel == Relation::less_equal )
          con.rel = Relation::greater_equal;
        else if ( con.rel == Relation::greater_equal )
          con.rel = Relation::less_equal;
      }
      if ( con.rel != Relation::equal )
        ++nslack;
      if ( con.rel != Relation::less_equal )
        ++nart;
    }

    art_begin_ = nvars_ + nslack;
    cols_ = art_begin_ + nart;
    tab_.assign( rows_ + 1, std::vector<Scalar>( cols_ + 1, Scalar( 0 ) ) );
    basis_.assign( rows_, 0 );

    std::size_t s = nvars_, a = art_begin_;
    for ( std::size_t r = 0; r < rows_; ++r )
    {
      auto const& con = constraints[r];
      for ( std::size_t j = 0; j < nvars_; ++j )
        tab_[r][j] = con.coeffs[j];
      tab_[r][cols_] = con.rhs;
      switch ( con.rel )
      {
      case Relation::less_equal:
        tab_[r][s] = Scalar( 1 );
        basis_[r] = s++;
        break;
      case Relation::greater_equal:
        tab_[r][s++] = Scalar( -1 );
        tab_[r][a] = Scalar( 1 );
        basis_[r] = a++;
        break;
      case Relation::equal:
        tab_[r][a] = Scalar( 1 );
        basis_[r] = a++;
        break;
      }
    }
  }

  Solution<Scalar> solve()
  {
    // phase 1: maximize -(sum of artificials)
    if ( cols_ > art_begin_ )
    {
      std::vector<Scalar> phase1( cols_, Scalar( 0 ) );
      for ( std::size_t j = art_begin_; j < cols_; ++j )
        phase1[j] = Scalar( -1 );
      set_objective( phase1 );
      run( cols_ );
      if ( tab_[rows_][cols_] < -eps_ )
        return { Status::infeasible, {}, {} };
      drive_out_artificials();
    }

    std::vector<Scalar> phase2( cols_, Scalar( 0 ) );
    for ( std::size_t j = 0; j < nvars_; ++j )
      phase2[j] = c_[j];
    set_objective( phase2 );
    if ( !run( art_begin_ ) )
      return { Status::unbounded, {}, {} };

    Solution<Scalar> sol{ Status::optimal, tab_[rows_][cols_], std::vector<Scalar>( nvars_, Scalar( 0 ) ) };
    for ( std::size_t r = 0; r < rows_; ++r )
      if ( basis_[r] < nvars_ )
        sol.x[basis_[r]] = tab_[r][cols_];
    return sol;
  }

private:
  // objective row stores reduced costs as (z_j - c_j); value in the last column
  void set_objective( std::vector<Scalar> const& c )
  {
    auto& z = tab_[rows_];
    for ( std::size_t j = 0; j <= cols_; ++j )
      z[j] = j < cols_ ? -c[j] : Scalar( 0 );
    for ( std::size_t r = 0; r < rows_; ++r )
    {
      Scalar const cb = c[basis_[r]];
      if ( cb == Scalar( 0 ) )
        continue;
      for ( std::size_t j = 0; j <= cols_; ++j )
        z[j] += cb * tab_[r][j];
    }
  }

  /// Pivots until optimal; only columns below `limit` may enter. Returns false if unbounded.
  bool run( std::size_t limit )
  {
    for ( ;; )
    {
      std::size_t enter = limit;
      for ( std::size_t j = 0; j < limit; ++j )
        if ( tab_[rows_][j] < -eps_ )
        {
          enter = j;
          break;
        }
      if ( enter == limit )
        return true;

      std::size_t leave = rows_;
      Scalar best{};
      for ( std::size_t r = 0; r < rows_; ++r )
      {
        if ( !( tab_[r][enter] > eps_ ) )
          continue;
        Scalar ratio = tab_[r][cols_] / tab_[r][enter];
        if ( leave == rows_ || ratio < best || ( ratio == best && basis_[r] < basis_[leave] ) )
        {
          leave = r;
          best = ratio;
        }
      }
      if ( leave == rows_ )
        return false;
      pivot( leave, enter );
    }
  }

  void pivot( std::size_t r, std::size_t c )
  {
    Scalar const p = tab_[r][c];
    for ( auto& v : tab_[r] )
      v /= p;
    for ( std::size_t i = 0; i <= rows_; ++i )
    {
      if ( i == r )
        continue;
      Scalar const f = tab_[i][c];
      if ( f == Scalar( 0 ) )
        continue;
      for ( std::size_t j = 0; j <= cols_; ++j )
        tab_[i][j] -= f * tab_[r][j];
    }
    basis_[r] = c;
  }

  void drive_out_artificials()
  {
    for ( std::size_t r = 0; r < rows_; ++r )
    {
      if ( basis_[r] < art_begin_ )
        continue;
      for ( std::size_t j = 0; j < art_begin_; ++j )
        if ( tab_[r][j] > eps_ || tab_[r][j] < -eps_ )
        {
          pivot( r, j );
          break;
        }
      // a row left with an artificial basic at zero is redundant; it stays
      // harmless because artificial columns never re-enter in phase 2
    }
  }

  std::vector<Scalar> c_;
  Scalar eps_;
  std::size_t nvars_{}, rows_{}, cols_{}, art_begin_{};
  std::vector<std::vector<Scalar>> tab_;
  std::vector<std::size_t> basis_;
};

template<typename Scalar>
Solution<Scalar> maximize( std::vector<Scalar> objective, std::vector<Constraint<Scalar>> constraints,
                           Scalar eps = Scalar( 0 ) )
{
  return Simplex<Scalar>( std::move( objective ), std::move( constraints ), eps ).solve();
}

} // namespace mcmtlg::lp
