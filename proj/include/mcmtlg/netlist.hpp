#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "gate.hpp"

namespace mcmtlg
{

enum class Tap
{
  ca,
  co
};

inline std::string to_string( Tap t ) { return t == Tap::ca ? "CA" : "CO"; }

struct GateTap
{
  std::size_t gate;
  Tap tap;
  bool operator==( GateTap const& ) const = default;
};

/// Index of a primary input (0-based).
struct PrimaryInput
{
  std::size_t index;
  bool operator==( PrimaryInput const& ) const = default;
};

using WireSource = std::variant<PrimaryInput, GateTap>;

struct Wire
{
  WireSource from;
  std::size_t to_gate;
  std::size_t to_slot; ///< 0-based input slot of the destination gate
};

struct NamedGate
{
  std::string name;
  GateConfig config;
};

/*! \brief Feedforward network of threshold gates.

  Outputs are restored to full logic levels between stages (isolation
  inverters), so a downstream gate simply sees the upstream logic value.
*/
struct Netlist
{
  std::vector<NamedGate> gates;
  std::vector<Wire> wires;
  std::size_t primary_inputs = 0;
  std::vector<GateTap> primary_outputs;

  std::string gate_name( std::size_t g ) const
  {
    return g < gates.size() && !gates[g].name.empty() ? gates[g].name : "#" + std::to_string( g );
  }
};

struct Diagnostic
{
  enum class Kind
  {
    cycle,
    unwired_input,
    multiply_driven,
    bad_gate,
    bad_slot,
    bad_primary_input,
    bad_output,
    invalid_gate
  };

  Kind kind;
  std::vector<std::size_t> gates; ///< offending gate(s); the whole cycle for Kind::cycle
  std::optional<std::size_t> slot;
  std::string message;
};

class ValidationReport
{
public:
  bool ok() const { return diagnostics.empty(); }
  explicit operator bool() const { return ok(); }

  bool has( Diagnostic::Kind k ) const
  {
    return std::any_of( diagnostics.begin(), diagnostics.end(), [k]( auto const& d ) { return d.kind == k; } );
  }

  std::string to_string() const
  {
    std::string s;
    for ( auto const& d : diagnostics )
      s += ( s.empty() ? "" : "\n" ) + d.message;
    return s;
  }

  std::vector<Diagnostic> diagnostics;
  std::vector<std::size_t> order; ///< a topological order when ok()
};

class NetlistError : public ModelError
{
public:
  explicit NetlistError( ValidationReport rep ) : ModelError( rep.to_string() ), report( std::move( rep ) ) {}
  ValidationReport report;
};

inline ValidationReport validate( Netlist const& net )
{
  ValidationReport rep;
  auto add = [&]( Diagnostic::Kind k, std::vector<std::size_t> gates, std::optional<std::size_t> slot,
                  std::string msg ) { rep.diagnostics.push_back( { k, std::move( gates ), slot, std::move( msg ) } ); };

  auto const G = net.gates.size();
  for ( std::size_t g = 0; g < G; ++g )
  {
    try
    {
      net.gates[g].config.validate();
    }
    catch ( ModelError const& e )
    {
      add( Diagnostic::Kind::invalid_gate, { g }, std::nullopt, "gate " + net.gate_name( g ) + ": " + e.what() );
    }
  }

  // driver count per (gate, slot) plus the gate -> gate dependency edges
  std::vector<std::vector<int>> drivers( G );
  for ( std::size_t g = 0; g < G; ++g )
    drivers[g].assign( net.gates[g].config.num_inputs(), 0 );
  std::vector<std::vector<std::size_t>> succ( G );
  std::vector<std::size_t> indeg( G, 0 );

  for ( auto const& w : net.wires )
  {
    if ( w.to_gate >= G )
    {
      add( Diagnostic::Kind::bad_gate, {}, std::nullopt,
           "wire targets unknown gate " + std::to_string( w.to_gate ) );
      continue;
    }
    if ( w.to_slot >= drivers[w.to_gate].size() )
    {
      add( Diagnostic::Kind::bad_slot, { w.to_gate }, w.to_slot,
           "gate " + net.gate_name( w.to_gate ) + " has no input slot " + std::to_string( w.to_slot + 1 ) );
      continue;
    }
    if ( auto const* p = std::get_if<PrimaryInput>( &w.from ) )
    {
      if ( p->index >= net.primary_inputs )
      {
        add( Diagnostic::Kind::bad_primary_input, { w.to_gate }, w.to_slot,
             "primary input in" + std::to_string( p->index + 1 ) + " does not exist" );
        continue;
      }
    }
    else
    {
      auto const& src = std::get<GateTap>( w.from );
      if ( src.gate >= G )
      {
        add( Diagnostic::Kind::bad_gate, { w.to_gate }, w.to_slot,
             "wire into " + net.gate_name( w.to_gate ) + " comes from unknown gate " + std::to_string( src.gate ) );
        continue;
      }
      succ[src.gate].push_back( w.to_gate );
      ++indeg[w.to_gate];
    }
    ++drivers[w.to_gate][w.to_slot];
  }

  for ( std::size_t g = 0; g < G; ++g )
    for ( std::size_t s = 0; s < drivers[g].size(); ++s )
    {
      if ( drivers[g][s] == 0 )
        add( Diagnostic::Kind::unwired_input, { g }, s,
             "gate " + net.gate_name( g ) + " input slot " + std::to_string( s + 1 ) + " is not driven" );
      else if ( drivers[g][s] > 1 )
        add( Diagnostic::Kind::multiply_driven, { g }, s,
             "gate " + net.gate_name( g ) + " input slot " + std::to_string( s + 1 ) + " has " +
                 std::to_string( drivers[g][s] ) + " drivers" );
    }

  for ( auto const& o : net.primary_outputs )
    if ( o.gate >= G )
      add( Diagnostic::Kind::bad_output, {}, std::nullopt, "output refers to unknown gate " + std::to_string( o.gate ) );

  // Kahn's algorithm, lowest index first so the order is deterministic
  auto deg = indeg;
  std::vector<bool> done( G, false );
  for ( std::size_t step = 0; step < G; ++step )
  {
    std::size_t pick = G;
    for ( std::size_t g = 0; g < G; ++g )
      if ( !done[g] && deg[g] == 0 )
      {
        pick = g;
        break;
      }
    if ( pick == G )
      break;
    done[pick] = true;
    rep.order.push_back( pick );
    for ( auto t : succ[pick] )
      --deg[t];
  }
  if ( rep.order.size() != G )
  {
    std::vector<std::size_t> stuck;
    std::string names;
    for ( std::size_t g = 0; g < G; ++g )
      if ( !done[g] )
      {
        stuck.push_back( g );
        names += ( names.empty() ? "" : ", " ) + net.gate_name( g );
      }
    add( Diagnostic::Kind::cycle, stuck, std::nullopt, "combinational cycle through gates " + names );
  }
  if ( !rep.ok() )
    rep.order.clear();
  return rep;
}

namespace detail
{

inline std::vector<std::uint8_t> run_network( Netlist const& net, InputVector const& inputs,
                                              std::vector<std::size_t> const& order )
{
  std::vector<std::vector<std::uint8_t>> slot_values( net.gates.size() );
  for ( std::size_t g = 0; g < net.gates.size(); ++g )
    slot_values[g].assign( net.gates[g].config.num_inputs(), 0 );
  std::vector<GateOutput> outs( net.gates.size() );
  std::vector<bool> evaluated( net.gates.size(), false );

  for ( auto g : order )
  {
    for ( auto const& w : net.wires )
    {
      if ( w.to_gate != g )
        continue;
      if ( auto const* p = std::get_if<PrimaryInput>( &w.from ) )
        slot_values[g][w.to_slot] = inputs[p->index];
      else
      {
        auto const& src = std::get<GateTap>( w.from );
        if ( !evaluated[src.gate] )
          throw PreconditionError( "evaluation order is not topological" );
        slot_values[g][w.to_slot] = static_cast<std::uint8_t>( src.tap == Tap::ca ? outs[src.gate].ca : outs[src.gate].co );
      }
    }
    outs[g] = evaluate( net.gates[g].config, InputVector( slot_values[g] ) );
    evaluated[g] = true;
  }

  std::vector<std::uint8_t> result;
  for ( auto const& o : net.primary_outputs )
    result.push_back( static_cast<std::uint8_t>( o.tap == Tap::ca ? outs[o.gate].ca : outs[o.gate].co ) );
  return result;
}

} // namespace detail

/// Evaluates the network; throws NetlistError when validation fails.
inline std::vector<std::uint8_t> evaluate_network( Netlist const& net, InputVector const& inputs )
{
  auto rep = validate( net );
  if ( !rep )
    throw NetlistError( std::move( rep ) );
  if ( inputs.size() != net.primary_inputs )
    throw DimensionError( "network has " + std::to_string( net.primary_inputs ) + " primary inputs, got " +
                          std::to_string( inputs.size() ) );
  return detail::run_network( net, inputs, rep.order );
}

/// Same as above with a caller-chosen gate order, which must be topological.
inline std::vector<std::uint8_t> evaluate_network( Netlist const& net, InputVector const& inputs,
                                                   std::vector<std::size_t> const& order )
{
  auto rep = validate( net );
  if ( !rep )
    throw NetlistError( std::move( rep ) );
  if ( inputs.size() != net.primary_inputs )
    throw DimensionError( "network primary input count mismatch" );
  auto sorted = order;
  std::sort( sorted.begin(), sorted.end() );
  bool perm = sorted.size() == net.gates.size();
  for ( std::size_t g = 0; perm && g < sorted.size(); ++g )
    perm = sorted[g] == g;
  if ( !perm )
    throw PreconditionError( "evaluation order must be a permutation of the gates" );
  return detail::run_network( net, inputs, order );
}

/// One truth table per primary output.
inline std::vector<TruthTable> network_truth_table( Netlist const& net )
{
  if ( net.primary_inputs > static_cast<std::size_t>( max_fan_in ) )
    throw PreconditionError( "network truth table limited to " + std::to_string( max_fan_in ) + " primary inputs" );
  auto rep = validate( net );
  if ( !rep )
    throw NetlistError( std::move( rep ) );

  auto const rows = std::size_t{ 1 } << net.primary_inputs;
  std::vector<std::vector<std::uint8_t>> cols( net.primary_outputs.size(), std::vector<std::uint8_t>( rows ) );
  for ( std::size_t k = 0; k < rows; ++k )
  {
    auto const out = detail::run_network(
        net, InputVector::from_index( static_cast<std::uint32_t>( k ), net.primary_inputs ), rep.order );
    for ( std::size_t o = 0; o < out.size(); ++o )
      cols[o][k] = out[o];
  }
  std::vector<TruthTable> tables;
  for ( auto& c : cols )
    tables.emplace_back( net.primary_inputs, std::move( c ) );
  return tables;
}

} // namespace mcmtlg
