#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kfv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MeshError : Error { using Error::Error; };
struct KernelError : Error { using Error::Error; };
struct StateError : Error { using Error::Error; };
struct EocError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

/// Carries every schema violation found in a config, not just the first.
struct ConfigError : Error {
    explicit ConfigError(std::vector<std::string> v);
    std::vector<std::string> violations;
};

struct CflError : Error {
    CflError(long step_index, const std::string& what);
    long step;
};

struct AuditError : Error {
    AuditError(std::string invariant_name, long step_index, const std::string& what);
    std::string invariant;
    long step;
};

} // namespace kfv
