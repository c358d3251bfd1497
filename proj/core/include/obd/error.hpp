#ifndef OBD_ERROR_HPP
#define OBD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace obd {

// One exception type for every precondition failure in the library.
// Report-style operations (validation, criterion checks) do not throw;
// they return structured verdicts instead.
enum class Errc {
  InvalidArgument,
  PeriodViolation,
  HypothesisViolation,
  NotIndependent,
  Ungenerated,
  NotCovered,
  NotMinimal,
  AllMax,
  NonCofinal,
  OrdinalOutOfRange,
  LevelOutOfRange,
  ParseError,
  MalformedCertificate,
  PostconditionFailure,
  AssumptionDrift,
  Overflow,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::PeriodViolation: return "PeriodViolation";
    case Errc::HypothesisViolation: return "HypothesisViolation";
    case Errc::NotIndependent: return "NotIndependent";
    case Errc::Ungenerated: return "Ungenerated";
    case Errc::NotCovered: return "NotCovered";
    case Errc::NotMinimal: return "NotMinimal";
    case Errc::AllMax: return "AllMax";
    case Errc::NonCofinal: return "NonCofinal";
    case Errc::OrdinalOutOfRange: return "OrdinalOutOfRange";
    case Errc::LevelOutOfRange: return "LevelOutOfRange";
    case Errc::ParseError: return "ParseError";
    case Errc::MalformedCertificate: return "MalformedCertificate";
    case Errc::PostconditionFailure: return "PostconditionFailure";
    case Errc::AssumptionDrift: return "AssumptionDrift";
    case Errc::Overflow: return "Overflow";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace obd

#endif
