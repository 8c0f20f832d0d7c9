#include "wmtrack/errors.hpp"

namespace wmtrack {

namespace {
std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration";
    for (const auto& s : v) out += "; " + s;
    return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> v) : Error(join(v)), violations(std::move(v)) {}

}  // namespace wmtrack
