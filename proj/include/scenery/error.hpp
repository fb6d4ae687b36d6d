#pragma once

#include <stdexcept>
#include <string>

namespace scenery {

enum class Errc {
    invalid_argument,
    quadrature_nonconvergence,
    unsupported_skew,
    unknown_name,
    not_lattice,
    budget_exceeded,
    truncation_mass_too_large,
    bridge_rejection_exhausted,
    invalid_p0,
    insufficient_points,
};

const char* to_string(Errc code) noexcept;

// Runtime failure raised by every module; the code is stable and machine readable.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace scenery
