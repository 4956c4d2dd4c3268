#pragma once

#include <stdexcept>
#include <string>

namespace pcbf {

/// Dimension or wiring mismatch between a system, a barrier and a state.
class ConfigurationError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter is outside its admissible range (e.g. a non-positive gain).
class ParameterError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Caller misuse such as an empty sample list.
class UsageError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// NaN or infinity produced or consumed where a finite value is required.
class NumericalDomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// The two-sided constraint is empty while the input direction is nonzero.
class InfeasibleSlabError : public std::runtime_error
{
public:
  InfeasibleSlabError(const std::string & what, double lower, double upper)
      : std::runtime_error(what), lower_(lower), upper_(upper)
  {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

private:
  double lower_;
  double upper_;
};

/// The initial condition is not strictly inside both barrier sets.
class InteriorError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pcbf
