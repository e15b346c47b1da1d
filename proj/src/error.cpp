#include "graspaff/error.hpp"

namespace graspaff {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DuplicateImageId: return "DuplicateImageId";
    case ErrorCode::InvalidTaxonomy: return "InvalidTaxonomy";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::PriorZeroOnSupport: return "PriorZeroOnSupport";
    case ErrorCode::EmptyManifest: return "EmptyManifest";
    case ErrorCode::EmptyDatabase: return "EmptyDatabase";
    case ErrorCode::ObjectNotFound: return "ObjectNotFound";
    case ErrorCode::InsufficientImages: return "InsufficientImages";
    case ErrorCode::UnknownImageId: return "UnknownImageId";
    case ErrorCode::MissingDistribution: return "MissingDistribution";
    case ErrorCode::MismatchedTrialCount: return "MismatchedTrialCount";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  return static_cast<int>(code) <= static_cast<int>(ErrorCode::PriorZeroOnSupport);
}

}  // namespace graspaff
