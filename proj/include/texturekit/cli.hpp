#pragma once

#include <string>
#include <vector>

namespace texturekit {

// Exit codes: 0 ok, 2 usage, 3 I/O, 4 data validation, 5 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitValidation = 4;
inline constexpr int kExitNumeric = 5;

/// Runs one CLI invocation; args excludes the program name.
int dispatch(const std::vector<std::string>& args);

}  // namespace texturekit
