// Copyright (c) the freqid authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqid {

enum class ErrorCode {
  kFileNotFound,
  kUnsupportedFormat,
  kCorruptData,
  kIoError,
  kInvalidKernelSize,
  kInvalidSigma,
  kInvalidRadius,
  kInvalidArgument,
  kOracleSizeExceeded,
  kDimMismatch,
  kImageTooSmall,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptData: return "CorruptData";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidKernelSize: return "InvalidKernelSize";
    case ErrorCode::kInvalidSigma: return "InvalidSigma";
    case ErrorCode::kInvalidRadius: return "InvalidRadius";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kOracleSizeExceeded: return "OracleSizeExceeded";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by the filesystem or file contents.
  bool is_io() const noexcept {
    return code_ == ErrorCode::kFileNotFound || code_ == ErrorCode::kUnsupportedFormat ||
           code_ == ErrorCode::kCorruptData || code_ == ErrorCode::kIoError;
  }

 private:
  ErrorCode code_;
};

}  // namespace freqid
