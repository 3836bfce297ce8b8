#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace yamabe::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Runs one command line (args[0] is the program name). Results go to --out
/// when given, otherwise to `out`; failures are printed to `out` as
/// {"error": code, "detail": text} and give exit status 2.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace yamabe::cli
