// include/asrtk/error.h
// Copyright 2026 The asrtk authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ASRTK_ERROR_H_
#define ASRTK_ERROR_H_

#include <stdexcept>
#include <string>

namespace asrtk {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed file contents (bad WAV header, bad JSONL, bad checkpoint).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string &msg) : Error(msg) {}
};

// Structurally valid file in an encoding we do not handle.
class CodecError : public Error {
 public:
  explicit CodecError(const std::string &msg) : Error(msg) {}
};

// Invalid experiment/tool configuration. CLI exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &msg) : Error(msg) {}
};

// Missing or unusable input data. CLI exit code 3.
class DataError : public Error {
 public:
  explicit DataError(const std::string &msg) : Error(msg) {}
};

// Precondition violation on an operation (empty signal, rate mismatch,
// dimension mismatch, out-of-range argument).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string &msg) : Error(msg) {}
};

// Checkpoint transfer between incompatible architectures.
class TransferError : public Error {
 public:
  explicit TransferError(const std::string &msg) : Error(msg) {}
};

// NaN/Inf detected during numeric computation.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string &msg) : Error(msg) {}
};

}  // namespace asrtk

#endif  // ASRTK_ERROR_H_
