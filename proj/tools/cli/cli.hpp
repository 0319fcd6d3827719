//------------------------------------------------------------------------------
//
//   Copyright 2026 The uidscan Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uidscan::cli {

/// Runs the command line `args` (without the program name). Summaries go to
/// `out`, warnings and errors to `err`. Returns the process exit code: 0 iff
/// the requested artifact was fully written.
int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

}  // namespace uidscan::cli
