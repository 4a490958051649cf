#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace antiroll {

using Vec = Eigen::VectorXd;
using Vec10 = Eigen::Matrix<double, 10, 1>;

enum class ErrorCode {
  invalid_state,
  degenerate_speed,
  tire_singularity,
  roll_singularity,
  geometric_singularity,
  invalid_parameter,
  invalid_weight,
  step_failure,
  integration_failure,
  dimension_mismatch,
  build_error,
  config_error,
  undefined_index,
  solver_failure,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception; `code()` identifies the failure class so callers
/// (solver line search, CLI exit codes) can react without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace antiroll
