#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wmtrack {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define WMTRACK_ERROR(Name)                                            \
    struct Name : Error {                                              \
        using Error::Error;                                            \
        const char* kind() const noexcept override { return #Name; }   \
    }

WMTRACK_ERROR(DomainError);
WMTRACK_ERROR(DimensionError);
WMTRACK_ERROR(OutsideLockingRange);
WMTRACK_ERROR(PeakNotFound);
WMTRACK_ERROR(EmptyBand);
WMTRACK_ERROR(DegenerateInput);
WMTRACK_ERROR(FormatError);

#undef WMTRACK_ERROR

// carries every violated invariant, not just the first one
struct ConfigError : Error {
    std::vector<std::string> violations;
    explicit ConfigError(std::vector<std::string> v);
    const char* kind() const noexcept override { return "ConfigError"; }
};

}  // namespace wmtrack
