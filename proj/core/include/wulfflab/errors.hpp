#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wulfflab {

enum class ErrorKind {
  NonUnitInput,
  DerivativeFailure,
  ConvexityViolation,
  ZeroT,
  RankDeficient,
  DegenerateTranslation,
  ZeroCurvature,
  LeafDrift,
  NotIsoparametric,
  AntipodeNotFound,
  NonConvergence,
  InvalidArgument,
  Parse,
};

std::string_view to_string(ErrorKind kind);

// Input-shaped failures (bad arguments, bad documents) versus numerical ones.
// The CLI maps the first group to exit code 2 and the second to 3.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wulfflab
