#pragma once

// The qpl command-line surface. dispatch() is the whole program minus
// process plumbing, so tests can drive it with captured streams and a
// synthetic environment.

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qpl::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
EnvLookup process_env();

/// Fixed environment, for tests.
EnvLookup fixed_env(std::map<std::string, std::string> vars);

/// args excludes the program name. Primary output goes to `out`, diagnostics
/// to `err`; files and the manifest go to the configured output directory.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const EnvLookup& env = process_env());

}  // namespace qpl::cli
