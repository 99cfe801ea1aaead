// Copyright 2026 The genmetrics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace genmetrics {

enum class ErrorCode {
  // Configuration.
  kConfigParseError,
  kInvalidConfig,
  // Input data and formats.
  kIoFailure,
  kMissingColumn,
  kDuplicateSampleId,
  kBadLabelValue,
  kBadValue,
  kBadMagic,
  kVersionUnsupported,
  kTruncatedFile,
  kIdCountMismatch,
  kDecodeFailure,
  kZeroDimension,
  kNonFiniteInput,
  kNonFiniteValue,
  kTooFewSamples,
  kTooFewPoints,
  kDimensionMismatch,
  kShapeMismatch,
  kSubsetTooLarge,
  kZeroVector,
  kEmptyInput,
  kEmptyTable,
  kIdAlignmentError,
  kLengthMismatch,
  // Numerical failures.
  kSqrtFailure,
  kZeroVariance,
};

enum class ErrorCategory { kConfig, kData, kNumerical };

constexpr std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigParseError: return "ConfigParseError";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDuplicateSampleId: return "DuplicateSampleId";
    case ErrorCode::kBadLabelValue: return "BadLabelValue";
    case ErrorCode::kBadValue: return "BadValue";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kIdCountMismatch: return "IdCountMismatch";
    case ErrorCode::kDecodeFailure: return "DecodeFailure";
    case ErrorCode::kZeroDimension: return "ZeroDimension";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kSubsetTooLarge: return "SubsetTooLarge";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kIdAlignmentError: return "IdAlignmentError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSqrtFailure: return "SqrtFailure";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
  }
  return "Unknown";
}

constexpr ErrorCategory CategoryOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigParseError:
    case ErrorCode::kInvalidConfig:
      return ErrorCategory::kConfig;
    case ErrorCode::kSqrtFailure:
    case ErrorCode::kZeroVariance:
      return ErrorCategory::kNumerical;
    default:
      return ErrorCategory::kData;
  }
}

// Every failure raised by the library. `context` carries a location such as
// "scores.csv:17" when one is known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string context = {})
      : std::runtime_error(Format(code, message, context)),
        code_(code),
        message_(std::move(message)),
        context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return CategoryOf(code_); }
  const std::string& message() const noexcept { return message_; }
  const std::string& context() const noexcept { return context_; }

  // Returns a copy with `where` prepended to the context.
  Error WithContext(const std::string& where) const {
    return Error(code_, message_,
                 context_.empty() ? where : where + ": " + context_);
  }

 private:
  static std::string Format(ErrorCode code, const std::string& message,
                            const std::string& context) {
    std::string out(ErrorCodeName(code));
    out += ": ";
    out += message;
    if (!context.empty()) out += " (" + context + ")";
    return out;
  }

  ErrorCode code_;
  std::string message_;
  std::string context_;
};

}  // namespace genmetrics
