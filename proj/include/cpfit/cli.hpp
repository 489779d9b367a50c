#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cpfit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitEstimation = 4;

/// Runs one subcommand (pmf, spectrum, fit, gof, simulate). `args` excludes
/// the program name. Reports go to `out` unless --out is given; failures
/// print a single diagnostic line to `err` and return a nonzero exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpfit::cli
