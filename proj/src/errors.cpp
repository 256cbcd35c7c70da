#include "shockform/errors.hpp"

namespace shock {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::ValidityExceeded: return "ValidityExceeded";
    case Errc::SignatureLost: return "SignatureLost";
    case Errc::DegenerateTimeComponent: return "DegenerateTimeComponent";
    case Errc::SingularMetric: return "SingularMetric";
    case Errc::DegenerateCharacteristic: return "DegenerateCharacteristic";
    case Errc::NonpositiveMu: return "NonpositiveMu";
    case Errc::FrameDegenerate: return "FrameDegenerate";
    case Errc::NoShockPredicted: return "NoShockPredicted";
    case Errc::FluidValidity: return "FluidValidity";
    case Errc::RootBracketFailure: return "RootBracketFailure";
    case Errc::CFLViolation: return "CFLViolation";
    case Errc::PhysicalityViolated: return "PhysicalityViolated";
    case Errc::HierarchyUnsatisfied: return "HierarchyUnsatisfied";
    case Errc::SupportViolation: return "SupportViolation";
    case Errc::InterpolationOutOfDomain: return "InterpolationOutOfDomain";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace shock
