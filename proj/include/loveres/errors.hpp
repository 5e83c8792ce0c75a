#pragma once

#include <stdexcept>
#include <string>

namespace loveres {

// Base for every failure raised by the library. `stage` is filled in by the
// pipeline drivers (invert, cli) so a caught error says where it came from.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string stage = {})
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string s) { stage_ = std::move(s); }

 private:
  std::string stage_;
};

#define LOVERES_ERROR(Name)                              \
  class Name : public Error {                            \
   public:                                               \
    using Error::Error;                                  \
  }

LOVERES_ERROR(DomainError);            // input outside the admissible set
LOVERES_ERROR(InvariantError);         // structural invariant broken (tail, grid)
LOVERES_ERROR(ConfigError);            // malformed configuration
LOVERES_ERROR(OverflowGuardError);     // |Im k| x_I beyond double range
LOVERES_ERROR(BoundaryDegeneracyError);
LOVERES_ERROR(ClassViolationError);    // data outside the Jost / scattering class
LOVERES_ERROR(InconsistencyError);     // two routes to the same quantity disagree
LOVERES_ERROR(DegenerateDataError);    // ill-conditioned Marchenko system
LOVERES_ERROR(CalibrationError);
LOVERES_ERROR(SymmetryError);
LOVERES_ERROR(SingularRecoveryError);
LOVERES_ERROR(CompletenessError);

#undef LOVERES_ERROR

}  // namespace loveres
