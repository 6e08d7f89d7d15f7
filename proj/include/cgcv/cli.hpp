#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cgcv {

/// Entry point of the `cgcv` tool. Subcommands: simulate, fixedpoint, fit,
/// generate. Returns 0 on success, 1 on usage or config errors, 2 on
/// runtime errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace cgcv
