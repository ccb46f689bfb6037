#include "layertext/error.hpp"

namespace layertext {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptData: return "CorruptData";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidScript: return "InvalidScript";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyDetections: return "EmptyDetections";
    case ErrorCode::AllBoxesOutOfBounds: return "AllBoxesOutOfBounds";
    case ErrorCode::TooFewPixels: return "TooFewPixels";
    case ErrorCode::MaskCoversImage: return "MaskCoversImage";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::MissingMask: return "MissingMask";
    case ErrorCode::OversizedLayer: return "OversizedLayer";
    case ErrorCode::ProviderLaunchFailure: return "ProviderLaunchFailure";
    case ErrorCode::ProviderNonZeroExit: return "ProviderNonZeroExit";
    case ErrorCode::ProviderBadOutput: return "ProviderBadOutput";
  }
  return "Unknown";
}

bool is_provider_error(ErrorCode code) {
  return code == ErrorCode::ProviderLaunchFailure || code == ErrorCode::ProviderNonZeroExit ||
         code == ErrorCode::ProviderBadOutput;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error Error::with_stage(const std::string& stage) const {
  if (!stage_.empty()) return *this;
  Error tagged(code_, "[" + stage + "] " + std::string(what()).substr(to_string(code_).size() + 2));
  tagged.stage_ = stage;
  return tagged;
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace layertext
