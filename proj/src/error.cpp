#include "kfv/error.hpp"

#include <sstream>

namespace kfv {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::ostringstream ss;
    ss << "config has " << v.size() << " violation(s):";
    for (const auto& s : v) {
        ss << "\n  - " << s;
    }
    return ss.str();
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> v)
    : Error(join_violations(v)), violations(std::move(v)) {}

CflError::CflError(long step_index, const std::string& what)
    : Error("CFL violation at step " + std::to_string(step_index) + ": " + what),
      step(step_index) {}

AuditError::AuditError(std::string invariant_name, long step_index, const std::string& what)
    : Error("invariant '" + invariant_name + "' failed at step " +
            std::to_string(step_index) + ": " + what),
      invariant(std::move(invariant_name)),
      step(step_index) {}

} // namespace kfv
