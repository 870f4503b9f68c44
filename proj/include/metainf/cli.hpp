#pragma once

#include <ostream>
#include <span>
#include <string>

namespace metainf {

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInfeasible = 1,  // parameters violate the identification assumption
  kExitConfig = 2,      // unreadable or invalid config, bad flags
  kExitNumerical = 3,   // solver or quadrature failure
  kExitIo = 4,          // output directory or file could not be written
};

// Runs one command. `args` excludes the program name:
//   {run|bound|identify|compare|validate} --config PATH [--out DIR]
//   [--override KEY=VALUE]... [--threads N] [--record-decisions]
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace metainf
