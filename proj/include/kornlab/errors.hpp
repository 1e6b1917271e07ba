#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kornlab {

/// Base for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Invalid or unknown configuration input. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : Error("config", what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error("geometry", what) {}
};

class ShellIntersectionError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class UnsupportedSurfaceError : public Error {
 public:
  explicit UnsupportedSurfaceError(const std::string& what)
      : Error("unsupported-surface", what) {}
};

class ResolutionError : public Error {
 public:
  explicit ResolutionError(const std::string& what) : Error("resolution", what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

/// B of a pencil is not positive definite.
class FormError : public Error {
 public:
  explicit FormError(const std::string& what) : Error("form", what) {}
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error("solver", what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

/// The near-kernel of a pencil is not separated from the rest of the spectrum.
class AmbiguousKernelError : public Error {
 public:
  AmbiguousKernelError(const std::string& what, std::vector<double> spectrum)
      : Error("ambiguous-kernel", what), spectrum_(std::move(spectrum)) {}
  const std::vector<double>& spectrum() const noexcept { return spectrum_; }

 private:
  std::vector<double> spectrum_;
};

}  // namespace kornlab
