#pragma once

#include <string>
#include <vector>

namespace bdmrf {

// Entry point behind the `bdmrf` executable; exposed so tests can invoke
// subcommands in-process. Returns the process exit code.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace bdmrf
