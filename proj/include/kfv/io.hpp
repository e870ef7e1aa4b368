#pragma once

#include <string>

namespace kfv {

/// Shortest round-trip-safe decimal form, 17 significant digits.
std::string fmt17(double x);

/// Write-to-temp then atomic rename; failed writes leave no partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Exit codes of the command-line interface.
enum ExitCode {
    kExitOk = 0,
    kExitConfig = 2,
    kExitCfl = 3,
    kExitAudit = 4,
    kExitIo = 5,
};

} // namespace kfv
