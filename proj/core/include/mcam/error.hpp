#pragma once

#include <stdexcept>
#include <string>

namespace mcam {

/// Error taxonomy shared by all modules. The CLI maps kinds to exit codes
/// (Contract -> 2, Bounds/Format -> 3, Numeric/Degenerate -> 4).
enum class ErrorKind {
    Contract,    // precondition or configuration violated by the caller
    Bounds,      // index out of range
    Format,      // malformed input file
    Numeric,     // solver failure, non-convergence
    Degenerate,  // input valid but carries no usable signal (e.g. all-zero tensor)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Contract: return "contract";
        case ErrorKind::Bounds: return "bounds";
        case ErrorKind::Format: return "format";
        case ErrorKind::Numeric: return "numeric";
        case ErrorKind::Degenerate: return "degenerate";
    }
    return "unknown";
}

}  // namespace mcam
