// Copyright 2026 The ulfsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ULFSYNTH_TOOLS_COMMANDS_H_
#define ULFSYNTH_TOOLS_COMMANDS_H_

#include <string>
#include <vector>

namespace ulfsynth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

// Default directory searched for --config files given by relative path, and
// for ulfsynth.toml when --config is absent.
inline constexpr char kConfigDirEnv[] = "ULFSYNTH_CONFIG_DIR";

// Entry point without the program name; returns the process exit code.
int Run(const std::vector<std::string>& args);

}  // namespace ulfsynth::cli

#endif  // ULFSYNTH_TOOLS_COMMANDS_H_
