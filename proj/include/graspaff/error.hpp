#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graspaff {

enum class ErrorCode {
  // validation failures: malformed or inconsistent input (exit code 2)
  AllZero,
  NegativeEntry,
  DimensionMismatch,
  NotNormalized,
  SchemaViolation,
  UnknownLabel,
  DuplicateImageId,
  InvalidTaxonomy,
  InvalidModel,
  UnknownPreset,
  MissingInput,
  PriorZeroOnSupport,
  // data failures: input is well formed but cannot satisfy the request (exit code 3)
  EmptyManifest,
  EmptyDatabase,
  ObjectNotFound,
  InsufficientImages,
  UnknownImageId,
  MissingDistribution,
  MismatchedTrialCount,
  IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes that indicate malformed input rather than missing data.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace graspaff
