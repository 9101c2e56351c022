// cli.hpp — command-line front end; returns process exit codes.
#pragma once

#include <string>
#include <vector>

namespace bridgewalk {

// Subcommands: kernels, bridge, experiment, lamplighter, volume.
// Exit codes: 0 ok, 2 usage/config, 3 budget/period, 1 other errors.
// Every error path prints a single line `ERROR <code>: message` to stderr.
int run_command(const std::vector<std::string>& args);

}  // namespace bridgewalk
