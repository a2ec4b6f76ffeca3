#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lidaraug::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kIoError = 2 };

/// Runs one command line (program name first). Diagnostics go to `err`.
int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace lidaraug::cli
