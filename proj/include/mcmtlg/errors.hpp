#pragma once

#include <stdexcept>
#include <string>

namespace mcmtlg
{

/// Base for every error raised by the simulation models (as opposed to
/// malformed user input). The CLI maps these to exit code 3.
class ModelError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a model value was violated (out-of-range resistance,
/// bad resolution, invalid clock...).
class PreconditionError : public ModelError
{
public:
  using ModelError::ModelError;
};

class DimensionError : public ModelError
{
public:
  using ModelError::ModelError;
};

/// A read bias large enough to program the device.
class ReadDisturbError : public ModelError
{
public:
  using ModelError::ModelError;
};

class ProgramTimeoutError : public ModelError
{
public:
  ProgramTimeoutError( std::string const& what, int pulses )
      : ModelError( what ), pulses_applied( pulses )
  {
  }

  int pulses_applied;
};

/// Raised by synthesis when the function is separable but the device range
/// cannot host the requested margin.
class MarginError : public ModelError
{
public:
  MarginError( std::string const& what, double best_margin )
      : ModelError( what ), best_margin( best_margin )
  {
  }

  double best_margin;
};

/// Malformed user input: weight strings, config files, netlists. The CLI
/// maps these to exit code 2.
class ParseError : public std::runtime_error
{
public:
  ParseError( std::string const& what, std::size_t line = 0, std::size_t column = 0 )
      : std::runtime_error( what ), line( line ), column( column )
  {
  }

  std::size_t line;
  std::size_t column;
};

} // namespace mcmtlg
