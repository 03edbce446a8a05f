#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace folin {

/// Runs one `folin` command in-process. args[0] is the program name.
/// Returns the process exit code: 0 ok, 1 input error, 2 infeasible/fail,
/// 3 ill-conditioned or numerical failure, 4 failure during a simulation run.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace folin
