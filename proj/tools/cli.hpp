#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace fibdisc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInfeasible = 3;

/// Inclusive range "a..b" or a single integer "a".
std::pair<int, int> parse_range(const std::string& text);

/// "inf" or a real number.
double parse_p(const std::string& text);

/// Entry point without the program name: args = {"points", "--n", "4"}.
/// Diagnostics go to err as a single line; results go to out unless -o is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fibdisc::cli
