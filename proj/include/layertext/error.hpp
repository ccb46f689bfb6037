#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace layertext {

enum class ErrorCode {
  // I/O and decoding
  FileNotFound,
  UnsupportedFormat,
  CorruptData,
  IoError,
  // argument / data validation
  InvalidArgument,
  InvalidScript,
  DimensionMismatch,
  EmptyDetections,
  AllBoxesOutOfBounds,
  TooFewPixels,
  MaskCoversImage,
  NonPositiveScale,
  DegenerateQuad,
  SingularSystem,
  SingularTransform,
  NonPositiveGamma,
  EmptyMask,
  EmptyReference,
  NotNormalized,
  ZeroVariance,
  MissingMask,
  OversizedLayer,
  // external providers
  ProviderLaunchFailure,
  ProviderNonZeroExit,
  ProviderBadOutput,
};

std::string_view to_string(ErrorCode code);

/// True for the three provider failure codes (CLI exit status 3).
bool is_provider_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  /// Pipeline stage that raised the error, empty outside the pipeline.
  const std::string& stage() const noexcept { return stage_; }

  /// Copy of this error tagged with `stage`; the message gains a "[stage] " prefix.
  Error with_stage(const std::string& stage) const;

 private:
  ErrorCode code_;
  std::string stage_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace layertext
