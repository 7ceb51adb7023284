#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dg::cli {

// Exit codes.
inline constexpr int kOk = 0;        // aligned, halts, closure ok, contradicted
inline constexpr int kNegative = 1;  // misaligned, diverges, closure violation
inline constexpr int kUndecided = 2; // trivial judge, resource exceeded, verifier divergence
inline constexpr int kUsage = 3;     // bad flags, unreadable or malformed input

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dg::cli
