#include "semihyp/error.hpp"

namespace semihyp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::domain: return "domain";
    case ErrorCode::singular: return "singular";
    case ErrorCode::format: return "format";
    case ErrorCode::not_root_of_unity: return "not root of unity";
    case ErrorCode::not_semi_hyperbolic: return "not semi-hyperbolic";
    case ErrorCode::quasi_absence_violated: return "quasi-absence violated";
    case ErrorCode::resonance_obstruction: return "resonance obstruction";
    case ErrorCode::degenerate_axis: return "degenerate axis";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::averaging_degenerate: return "averaging degenerate";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::aperture_exceeded: return "aperture exceeded";
    case ErrorCode::homotopy_degenerated: return "homotopy degenerated";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::out_of_domain: return "out of domain";
    case ErrorCode::numerical: return "numerical";
  }
  return "unknown";
}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace semihyp
