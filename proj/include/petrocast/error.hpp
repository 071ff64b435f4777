#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace petrocast {

enum class ErrorKind {
    InvalidArgument,
    Domain,
    Degenerate,
    InsufficientData,
    Range,
    NotFound,
    Discontinuity,
    Parse,
    InvalidStart,
    Differentiation,
    SingularForecast,
    FitFailed,
    Io,
};

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

std::string_view to_string(ErrorKind kind) noexcept;

}  // namespace petrocast
