#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace refl::cli {

inline constexpr const char* kToolName = "reflmps";
inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

/// Runs one verb. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One line per verb.
std::string synopsis();

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& data);

/// Evenly spaced grid from lo to hi inclusive; empty when lo > hi.
std::vector<double> parameter_grid(double lo, double hi, double step);

}  // namespace refl::cli
