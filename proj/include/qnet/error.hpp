#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnet {

enum class ErrorKind {
  DimensionMismatch,
  VariantMismatch,
  SingularCovariance,
  InvalidWeight,
  NotInvertibleHere,
  NonPositiveDensity,
  MissingInput,
  FusionUndefined,
  InvalidSite,
  MissingTrueCov,
  MissingRegion,
  InvalidNetwork,
  ParseError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::VariantMismatch: return "VariantMismatch";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::InvalidWeight: return "InvalidWeight";
    case ErrorKind::NotInvertibleHere: return "NotInvertibleHere";
    case ErrorKind::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorKind::MissingInput: return "MissingInput";
    case ErrorKind::FusionUndefined: return "FusionUndefined";
    case ErrorKind::InvalidSite: return "InvalidSite";
    case ErrorKind::MissingTrueCov: return "MissingTrueCov";
    case ErrorKind::MissingRegion: return "MissingRegion";
    case ErrorKind::InvalidNetwork: return "InvalidNetwork";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is the stable, matchable part;
/// the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qnet
