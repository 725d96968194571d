#pragma once

#include <stdexcept>
#include <string>

namespace ensemblekit {

// Base of every error raised by the library. `code()` is a short stable
// identifier that ends up in result tables.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

struct NormViolation : Error {
  explicit NormViolation(const std::string& what) : Error("norm_violation", what) {}
};

struct LocalityViolation : Error {
  explicit LocalityViolation(const std::string& what) : Error("locality_violation", what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error("numerical", what) {}
};

struct InvalidState : Error {
  explicit InvalidState(const std::string& what) : Error("invalid_state", what) {}
};

class EmptyWindow : public Error {
 public:
  EmptyWindow(const std::string& what, double nearest_energy)
      : Error("empty_window", what), nearest_energy_(nearest_energy) {}

  double nearest_energy() const noexcept { return nearest_energy_; }

 private:
  double nearest_energy_;
};

struct SubstateConstructionFailure : Error {
  explicit SubstateConstructionFailure(const std::string& what)
      : Error("substate_construction_failure", what) {}
};

struct KappaTooLarge : Error {
  explicit KappaTooLarge(const std::string& what) : Error("kappa_too_large", what) {}
};

struct DegenerateSpectrum : Error {
  explicit DegenerateSpectrum(const std::string& what) : Error("degenerate_spectrum", what) {}
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("config", field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace ensemblekit
