#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmsm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitCompute = 3;
inline constexpr int kExitIo = 4;

/// Entry point of the `lmsm` tool. `args` excludes the program name.
/// Subcommands: simulate, field, converge, scale-check, render.
/// `--config FILE` supplies flat key=value defaults (keys are long flag names
/// without dashes; explicit flags win). Errors produce one JSON line on `err`:
///   {"error":"<kind>","exit":<code>,"message":"..."}
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat key=value file: '#' comments and blank lines ignored. Throws ParameterError / IoError.
std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::string& path);

}  // namespace lmsm
