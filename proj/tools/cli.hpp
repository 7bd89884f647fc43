#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ltmn::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kData = 2;
inline constexpr int kNumeric = 3;

// `args` excludes the program name. Results go to `out`; diagnostics, the
// resolved configuration and progress go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ltmn::cli
