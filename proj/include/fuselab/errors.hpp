#pragma once

#include <stdexcept>
#include <string>

namespace fuselab {

/// Error taxonomy shared by the whole library. Each condition a caller can
/// act on gets its own code; messages carry the witnessing labels.
enum class Errc {
  unknown_label,
  unknown_rule,
  non_positive_multiplicity,
  unit_law_violation,
  involution_not_involutive,
  ball_overflow,
  not_finite,
  reducible,
  parameter_out_of_range,
  not_a_group,
  unit_action_violation,
  negative_multiplicity,
  disconnected,
  dimension_not_rational,
  zero_element,
  negative_coefficient,
  not_symmetric_element,
  weight_not_positive,
  inequality_fails,
  no_convergence,
  syntax_error,
  unknown_key,
  duplicate_rule,
  multiplicity_not_positive_integer,
  unknown_catalog_entry,
  io_error,
  usage_error,
  internal_inconsistency,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::unknown_rule: return "UnknownRule";
    case Errc::non_positive_multiplicity: return "NonPositiveMultiplicity";
    case Errc::unit_law_violation: return "UnitLawViolation";
    case Errc::involution_not_involutive: return "InvolutionNotInvolutive";
    case Errc::ball_overflow: return "BallOverflow";
    case Errc::not_finite: return "NotFinite";
    case Errc::reducible: return "Reducible";
    case Errc::parameter_out_of_range: return "ParameterOutOfRange";
    case Errc::not_a_group: return "NotAGroup";
    case Errc::unit_action_violation: return "UnitActionViolation";
    case Errc::negative_multiplicity: return "NegativeMultiplicity";
    case Errc::disconnected: return "Disconnected";
    case Errc::dimension_not_rational: return "DimensionNotRational";
    case Errc::zero_element: return "ZeroElement";
    case Errc::negative_coefficient: return "NegativeCoefficient";
    case Errc::not_symmetric_element: return "NotSymmetricElement";
    case Errc::weight_not_positive: return "WeightNotPositive";
    case Errc::inequality_fails: return "InequalityFails";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unknown_key: return "UnknownKey";
    case Errc::duplicate_rule: return "DuplicateRule";
    case Errc::multiplicity_not_positive_integer: return "MultiplicityNotPositiveInteger";
    case Errc::unknown_catalog_entry: return "UnknownCatalogEntry";
    case Errc::io_error: return "IoError";
    case Errc::usage_error: return "UsageError";
    case Errc::internal_inconsistency: return "InternalInconsistency";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fuselab
