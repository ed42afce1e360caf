#ifndef GRIDMIN_ERRORS_HPP
#define GRIDMIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridmin {

// Error taxonomy shared by the library and the CLI exit codes.
enum class ErrorCode : int {
  InputError = 2,
  Saturation = 3,
  DegenerateSpectrum = 4,
  IterationCap = 5,
  Numerical = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Malformed or inconsistent input (file schema, dimension mismatch, ...).
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg)
      : Error(ErrorCode::InputError, msg) {}
};

// A phase-angle difference left the open interval (-1, 1) in sine terms.
class SaturationError : public Error {
 public:
  SaturationError(int edge, double value, const std::string& msg)
      : Error(ErrorCode::Saturation, msg), edge_(edge), value_(value) {}
  int edge() const { return edge_; }       // 0-based offending edge
  double value() const { return value_; }  // the saturated sine value

 private:
  int edge_;
  double value_;
};

// Clustered eigenvalues make eigenvector finite differences ill-posed.
class DegenerateSpectrumError : public Error {
 public:
  explicit DegenerateSpectrumError(const std::string& msg)
      : Error(ErrorCode::DegenerateSpectrum, msg) {}
};

class IterationCapError : public Error {
 public:
  explicit IterationCapError(const std::string& msg)
      : Error(ErrorCode::IterationCap, msg) {}
};

// Solver contract violations (non-Hurwitz matrix, residual too large, ...).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg)
      : Error(ErrorCode::Numerical, msg) {}
};

}  // namespace gridmin

#endif  // GRIDMIN_ERRORS_HPP
