// core/src/error.cpp

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

#include "mvae/error.hpp"

#include <filesystem>
#include <ios>

namespace mvae {

ExitCode ExitCodeFor(const std::exception& e) noexcept {
  if (dynamic_cast<const IoError*>(&e) != nullptr) return ExitCode::kIo;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e) != nullptr) return ExitCode::kIo;
  if (dynamic_cast<const std::ios_base::failure*>(&e) != nullptr) return ExitCode::kIo;
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) return ExitCode::kNumerical;
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return ExitCode::kConfig;
  return ExitCode::kNumerical;
}

}  // namespace mvae
