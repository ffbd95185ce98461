#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptspectra {

enum class ErrorCode {
  NonSquare,
  ShapeMismatch,
  IterationLimitExceeded,
  NotHermitian,
  NotPositiveDefinite,
  Singular,
  DimensionMismatch,
  NonRealCouplings,
  UnknownPreset,
  DegenerateD,
  AtPole,
  RootAtPole,
  ResidualCheckFailed,
  ComplexSpectrum,
  DegenerateSpectrum,
  ZeroSubdiagonal,
  NotHessenberg,
  InconsistentSystem,
  NoSignChange,
  NotDegenerate,
  SeedNotPositive,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IterationLimitExceeded: return "IterationLimitExceeded";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonRealCouplings: return "NonRealCouplings";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::DegenerateD: return "DegenerateD";
    case ErrorCode::AtPole: return "AtPole";
    case ErrorCode::RootAtPole: return "RootAtPole";
    case ErrorCode::ResidualCheckFailed: return "ResidualCheckFailed";
    case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::ZeroSubdiagonal: return "ZeroSubdiagonal";
    case ErrorCode::NotHessenberg: return "NotHessenberg";
    case ErrorCode::InconsistentSystem: return "InconsistentSystem";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NotDegenerate: return "NotDegenerate";
    case ErrorCode::SeedNotPositive: return "SeedNotPositive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can report a stable name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ptspectra
