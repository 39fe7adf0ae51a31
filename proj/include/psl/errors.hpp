#pragma once

#include <stdexcept>
#include <string>

namespace psl {

/// Base for failures of a numerical procedure (as opposed to bad input).
class NumericalError : public std::runtime_error {
public:
  NumericalError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

class NonConvergence : public NumericalError {
public:
  explicit NonConvergence(const std::string& what) : NumericalError("NonConvergence", what) {}
};

class PoleOutsideRange : public NumericalError {
public:
  explicit PoleOutsideRange(const std::string& what) : NumericalError("PoleOutsideRange", what) {}
};

class InsufficientSpan : public NumericalError {
public:
  explicit InsufficientSpan(const std::string& what) : NumericalError("InsufficientSpan", what) {}
};

class PhaseUnwrapFailure : public NumericalError {
public:
  explicit PhaseUnwrapFailure(const std::string& what)
      : NumericalError("PhaseUnwrapFailure", what) {}
};

class ZeroMomentum : public NumericalError {
public:
  explicit ZeroMomentum(const std::string& what) : NumericalError("ZeroMomentum", what) {}
};

class DegenerateFit : public NumericalError {
public:
  explicit DegenerateFit(const std::string& what) : NumericalError("DegenerateFit", what) {}
};

class DivergentMass : public NumericalError {
public:
  explicit DivergentMass(const std::string& what) : NumericalError("DivergentMass", what) {}
};

/// Invalid input. `field` is a dotted path into the config, e.g. "state.rho.bumps[0].w".
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

} // namespace psl
