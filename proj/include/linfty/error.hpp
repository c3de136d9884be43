#pragma once

#include <stdexcept>
#include <string>

namespace linfty {

enum class ErrorCode {
  EmptyInterior,
  BadShape,
  OutsideDomain,
  UnsupportedShape,
  IoError,
  FormatError,
  EmptySeedSet,
  CrossCheckFailure,
  NoConvergence,
  BadP,
  StadiumDomain,
  ZeroFunction,
  SignedMeasure,
  UnbalancedMass,
  SolverFailure,
  ZeroDual,
  NotNormalized,
  InvalidArgument,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::EmptySeedSet: return "EmptySeedSet";
    case ErrorCode::CrossCheckFailure: return "CrossCheckFailure";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadP: return "BadP";
    case ErrorCode::StadiumDomain: return "StadiumDomain";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::SignedMeasure: return "SignedMeasure";
    case ErrorCode::UnbalancedMass: return "UnbalancedMass";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ZeroDual: return "ZeroDual";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace linfty
