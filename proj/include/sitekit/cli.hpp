#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sitekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kToolVersion = "sitekit 0.1.0";

// Runs one invocation; `args` excludes the program name. Diagnostics go to
// `err` prefixed "error:".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace sitekit::cli
