#pragma once

#include <stdexcept>
#include <string>

namespace siddmd {

// Base of every error raised by the library. The kind() tag is stable and
// used by the CLI for machine-readable error lines.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error("invalid-input", what) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what) : Error("insufficient-data", what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error("dimension-mismatch", what) {}
};

// Row-space constraint row(X) ⊆ row(Y) violated.
class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& what) : Error("infeasible", what) {}
};

// Eigendecomposition is numerically defective; modal forms are undefined.
class NotDiagonalizable : public Error {
 public:
  explicit NotDiagonalizable(const std::string& what) : Error("not-diagonalizable", what) {}
};

class ObservabilityError : public Error {
 public:
  explicit ObservabilityError(const std::string& what) : Error("observability", what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error("numerical", what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace siddmd
