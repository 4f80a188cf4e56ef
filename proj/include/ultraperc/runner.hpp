#pragma once

#include <string>
#include <vector>

namespace ultraperc::cli {

// Parses command-line arguments (program name excluded), runs the selected
// subcommand, emits CSV or JSON.  Returns the process exit code: 0 success,
// 2 configuration or regime error, 3 infeasible scale.
int run(const std::vector<std::string>& args);

}  // namespace ultraperc::cli
