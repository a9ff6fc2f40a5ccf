// core/include/mvae/error.hpp

// Copyright 2026  The mvae Authors

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

#ifndef MVAE_ERROR_HPP_
#define MVAE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mvae {

// Base class for every error raised by the library. The subclasses map onto
// the process exit codes used by the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or incompatible dimensions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable/unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was read but its content does not validate (bad magic, truncation,
// inconsistent shapes).
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Network evaluation produced NaN/Inf.
class CorruptWeightsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class ExitCode : int { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

// Maps an exception to the tool exit code taxonomy.
ExitCode ExitCodeFor(const std::exception& e) noexcept;

}  // namespace mvae

#endif  // MVAE_ERROR_HPP_
