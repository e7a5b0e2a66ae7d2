#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphconc {

enum class Errc {
  NonFinite,
  ConvergenceFailure,
  DimensionMismatch,
  Overflow,
  InvalidParameter,
  DomainError,
  NotPSD,
  NormTooLarge,
  ZeroDegree,
  LoopsUnsupported,
  TooLarge,
  QuadratureFailure,
  Unsupported,
  HypothesisViolated,
  SingularResolvent,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::Overflow: return "Overflow";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::DomainError: return "DomainError";
    case Errc::NotPSD: return "NotPSD";
    case Errc::NormTooLarge: return "NormTooLarge";
    case Errc::ZeroDegree: return "ZeroDegree";
    case Errc::LoopsUnsupported: return "LoopsUnsupported";
    case Errc::TooLarge: return "TooLarge";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::Unsupported: return "Unsupported";
    case Errc::HypothesisViolated: return "HypothesisViolated";
    case Errc::SingularResolvent: return "SingularResolvent";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace graphconc
