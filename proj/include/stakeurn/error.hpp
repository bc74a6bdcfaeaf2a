#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stakeurn {

enum class ErrorCode {
  EmptyStakeSet,
  NegativeStake,
  ZeroTotalStake,
  DimensionMismatch,
  BudgetMismatch,
  InvalidDimension,
  NonpositiveBudget,
  RowSumMismatch,
  NegativeEntry,
  NotSquare,
  UnbalancedMatrix,
  DegenerateDenominator,
  SupercriticalUnsupported,
  DegenerateBeta,
  InsufficientSamples,
  InvalidArgument,
  ResourceLimit,
  ConfigMismatch,
  OverlappingRanges,
  ParseError,
  SchemaError,
  EmptyHistogram,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyStakeSet: return "EmptyStakeSet";
    case ErrorCode::NegativeStake: return "NegativeStake";
    case ErrorCode::ZeroTotalStake: return "ZeroTotalStake";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BudgetMismatch: return "BudgetMismatch";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::NonpositiveBudget: return "NonpositiveBudget";
    case ErrorCode::RowSumMismatch: return "RowSumMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::UnbalancedMatrix: return "UnbalancedMatrix";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::SupercriticalUnsupported: return "SupercriticalUnsupported";
    case ErrorCode::DegenerateBeta: return "DegenerateBeta";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::OverlappingRanges: return "OverlappingRanges";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::EmptyHistogram: return "EmptyHistogram";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stakeurn
