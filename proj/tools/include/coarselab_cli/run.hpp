#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coarse::cli {

/// Execute one subcommand. Artifacts are written atomically under --out,
/// with the effective configuration echoed next to them; a one-line summary
/// goes to `out`. Exit codes: 0 success, 2 inconclusive refutation,
/// 3 budget exceeded, 64 usage error, 70 internal invariant failure (with a
/// diagnostic dump on stderr).
int run_command(const std::vector<std::string>& argv, std::ostream& out);
int run_command(const std::vector<std::string>& argv);  // summary to stdout

}  // namespace coarse::cli
