#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace surfup::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { ok = 0, input_error = 1, config_error = 2 };

/// Dispatches `upsample`, `eval` or `bench`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Each command takes its flags without the subcommand name.
int cmd_upsample(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_eval(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace surfup::cli
