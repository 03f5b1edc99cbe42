// Copyright 2026 The ecst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>

namespace ecst::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitCheckFailed = 1;   // a verification check failed
inline constexpr int kExitExhausted = 2;     // teleport ran out of attempts
inline constexpr int kExitUsage = 64;        // bad flags or config
inline constexpr int kExitInternal = 70;     // model violation / internal error

// Runs the command line given by argv; output streams are injectable so
// tests can capture them.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecst::cli
