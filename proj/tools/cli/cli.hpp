// tools/cli/cli.hpp

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

#ifndef MVAE_TOOLS_CLI_HPP_
#define MVAE_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace mvae::cli {

// Runs one invocation of the tool; args excludes the program name. Returns
// the process exit code (0 ok, 2 config, 3 I/O, 4 numerical).
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvae::cli

#endif  // MVAE_TOOLS_CLI_HPP_
