#pragma once

#include <string>
#include <vector>

namespace pqcorr {

// Runs one subcommand and returns the process exit code:
// 0 ok, 1 usage/config error, 2 data error, 3 numeric failure.
int dispatch(const std::vector<std::string>& args);

}  // namespace pqcorr
