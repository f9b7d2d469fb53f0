// Copyright 2026 The vsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VSUM_ERROR_HPP_
#define VSUM_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace vsum {

enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  // media_io
  kSourceUnreachable,
  kNotAVideo,
  kZeroFrames,
  kDecodeFailure,
  kTranscoderFailure,
  kEmptySelection,
  // file ingestion
  kParseError,
  kPartitionError,
  kLengthMismatch,
  kRangeError,
  kCountMismatch,
  // geometry / evaluation
  kImpossibleAspect,
  kFrameCountMismatch,
  // service
  kUnknownPreset,
  kInvalidSpec,
  kUnsupportedSource,
  kNotFound,
  kNotReady,
  kGone,
  kCancelled,
};

inline std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSourceUnreachable: return "SourceUnreachable";
    case ErrorCode::kNotAVideo: return "NotAVideo";
    case ErrorCode::kZeroFrames: return "ZeroFrames";
    case ErrorCode::kDecodeFailure: return "DecodeFailure";
    case ErrorCode::kTranscoderFailure: return "TranscoderFailure";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kPartitionError: return "PartitionError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kImpossibleAspect: return "ImpossibleAspect";
    case ErrorCode::kFrameCountMismatch: return "FrameCountMismatch";
    case ErrorCode::kUnknownPreset: return "UnknownPreset";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kUnsupportedSource: return "UnsupportedSource";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kNotReady: return "NotReady";
    case ErrorCode::kGone: return "Gone";
    case ErrorCode::kCancelled: return "Cancelled";
  }
  return "Unknown";
}

// The single exception type thrown by the library. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ToString(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace vsum

#endif  // VSUM_ERROR_HPP_
