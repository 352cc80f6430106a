#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ktau {

enum class ErrorKind {
    Syntax,
    UnknownIdentifier,
    UnknownFunction,
    DivisionByZero,
    NonFinite,
    Domain,
    Unsupported,
    SampleTooSmall,
    Ties,
    ZeroVariance,
    Budget,
    Csv,
    InvalidArgument,
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::UnknownIdentifier: return "unknown-identifier";
        case ErrorKind::UnknownFunction: return "unknown-function";
        case ErrorKind::DivisionByZero: return "division-by-zero";
        case ErrorKind::NonFinite: return "non-finite";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::SampleTooSmall: return "sample-too-small";
        case ErrorKind::Ties: return "ties";
        case ErrorKind::ZeroVariance: return "zero-variance";
        case ErrorKind::Budget: return "budget";
        case ErrorKind::Csv: return "csv";
        case ErrorKind::InvalidArgument: return "invalid-argument";
    }
    return "unknown";
}

/// Library-wide exception. `position` is a 0-based character offset for
/// parse errors, or a 1-based sequence index for parameter-domain errors;
/// npos when not applicable.
class Error : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Error(ErrorKind kind, const std::string& what, std::size_t position = npos)
        : std::runtime_error(what), kind_(kind), position_(position) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    ErrorKind kind_;
    std::size_t position_;
};

}  // namespace ktau
