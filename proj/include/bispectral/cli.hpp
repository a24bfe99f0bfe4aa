#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bispectral::cli {

/// Environment variable that overrides the default output directory.
inline constexpr const char* kOutputDirEnv = "BISPEC_OUTPUT_DIR";

/// Runs one `bispec` command. `args` excludes the program name. Returns the
/// process exit code: 0 on success, 2 on usage errors, 1 on other failures.
/// Every failure writes exactly one diagnostic line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bispectral::cli
