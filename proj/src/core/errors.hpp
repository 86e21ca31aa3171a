/* Copyright 2026 The MaskText Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MASKTEXT_CORE_ERRORS_HPP_
#define MASKTEXT_CORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace masktext {

// Numeric values are part of the C ABI (see masktext.h); append only.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kConfig = 2,
  kMissingFile = 3,
  kPaletteGap = 4,
  kDecode = 5,
  kEmptyMask = 6,
  kShapeMismatch = 7,
  kClassOutOfRange = 8,
  kParseFailure = 9,
  kNonPositiveTau = 10,
  kNonFiniteGradient = 11,
  kEmptyConfusion = 12,
  kIo = 13,
  kDegenerate = 14,
  kInternal = 15,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class PaletteGapError : public Error {
 public:
  PaletteGapError(unsigned value, const std::string& where)
      : Error(ErrorCode::kPaletteGap,
              "mask value " + std::to_string(value) +
                  " has no palette entry (" + where + ")"),
        value_(value) {}
  unsigned value() const { return value_; }

 private:
  unsigned value_;
};

class ParseFailure : public Error {
 public:
  ParseFailure(std::size_t position, const std::string& sentence)
      : Error(ErrorCode::kParseFailure,
              "sentence matches no template (stopped at offset " +
                  std::to_string(position) + "): \"" + sentence + "\""),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace masktext

#endif  // MASKTEXT_CORE_ERRORS_HPP_
