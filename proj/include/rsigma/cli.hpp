#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsigma::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;         // domain or precision failure
inline constexpr int kExitVerifyFailed = 2;  // a verification suite failed
inline constexpr int kExitUsage = 64;        // unknown flag or bad value

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kPrimeCacheEnv = "RSIGMA_PRIME_CACHE";

// Runs one command line (without the program name). Results go to `out`
// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rsigma::cli
