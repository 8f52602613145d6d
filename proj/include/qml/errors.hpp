#pragma once

#include <stdexcept>
#include <string>

namespace qml {

enum class ErrorCode {
  NotHermitian,
  DomainError,
  NotPSD,
  NotPD,
  DimMismatch,
  ShapeError,
  ThetaOutOfRange,
  KappaNonpositive,
  TailMassTooLarge,
  NonFiniteValue,
  ChoiNotPSD,
  NotTPCP,
  NotStochastic,
  ParamError,
  DimTooLarge,
  SupportViolation,
  InvariantViolation,
  NotMarkov,
  Overflow,
  BadTrace,
  Schema,
  Io,
};

// stable machine-readable names, printed by the CLI on exit 2
inline const char* code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotHermitian: return "NOT_HERMITIAN";
    case ErrorCode::DomainError: return "DOMAIN_ERROR";
    case ErrorCode::NotPSD: return "NOT_PSD";
    case ErrorCode::NotPD: return "NOT_PD";
    case ErrorCode::DimMismatch: return "DIM_MISMATCH";
    case ErrorCode::ShapeError: return "SHAPE_ERROR";
    case ErrorCode::ThetaOutOfRange: return "THETA_OUT_OF_RANGE";
    case ErrorCode::KappaNonpositive: return "KAPPA_NONPOSITIVE";
    case ErrorCode::TailMassTooLarge: return "TAIL_MASS_TOO_LARGE";
    case ErrorCode::NonFiniteValue: return "NON_FINITE_VALUE";
    case ErrorCode::ChoiNotPSD: return "CHOI_NOT_PSD";
    case ErrorCode::NotTPCP: return "NOT_TPCP";
    case ErrorCode::NotStochastic: return "NOT_STOCHASTIC";
    case ErrorCode::ParamError: return "PARAM_ERROR";
    case ErrorCode::DimTooLarge: return "DIM_TOO_LARGE";
    case ErrorCode::SupportViolation: return "SUPPORT_VIOLATION";
    case ErrorCode::InvariantViolation: return "INVARIANT_VIOLATION";
    case ErrorCode::NotMarkov: return "NOT_MARKOV";
    case ErrorCode::Overflow: return "OVERFLOW";
    case ErrorCode::BadTrace: return "BAD_TRACE";
    case ErrorCode::Schema: return "SCHEMA";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode c, const std::string& what)
      : std::runtime_error(std::string(code_name(c)) + ": " + what), code_(c) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qml
