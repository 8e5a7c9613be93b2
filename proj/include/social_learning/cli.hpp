#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace social_learning {

// Exit codes: 0 success, 1 a run or check failed, 2 usage or config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace social_learning
