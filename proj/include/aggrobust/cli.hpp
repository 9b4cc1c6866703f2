// Copyright 2026 The aggrobust Authors
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

#include <iosfwd>
#include <string>
#include <vector>

namespace aggrobust {

/// Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

/// Runs one command line (args[0] is the program name). `color` enables
/// ANSI highlighting of error prefixes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            bool color = false);

}  // namespace aggrobust
