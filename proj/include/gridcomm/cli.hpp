#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridcomm {

/// Entry point of the gridcomm tool. `args` excludes the program name.
/// Returns the process exit status; failures print one line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridcomm
