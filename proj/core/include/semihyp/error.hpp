#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semihyp {

enum class ErrorCode {
  dimension,
  domain,
  singular,
  format,
  not_root_of_unity,
  not_semi_hyperbolic,
  quasi_absence_violated,
  resonance_obstruction,
  degenerate_axis,
  precondition,
  averaging_degenerate,
  convergence,
  aperture_exceeded,
  homotopy_degenerated,
  parameter,
  out_of_domain,
  numerical,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code; the
/// command-line tool maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace semihyp
