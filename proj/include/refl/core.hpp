#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace refl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  DegenerateNorm,
  IndexOutOfRange,
  UndefinedDegenerate,
  UnknownPreset,
  BadParams,
  SingularX,
  ZeroState,
  BadLength,
  NoConvergence,
  NotConverged,
  EigensolverStall,
  TooLarge,
  AssertionFailed,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; the code
// identifies which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace refl
