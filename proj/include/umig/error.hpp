#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace umig {

/// Base class of every error raised by the library. The CLI maps it to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// A finding produced by one of the model validators.
struct Diagnostic {
    enum class Severity { Error, Warning };

    Severity severity = Severity::Error;
    std::string code;
    std::string path;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Throws Error listing every error-severity diagnostic, if any.
void throw_if_errors(const std::vector<Diagnostic>& diagnostics, const std::string& context);

std::string to_string(const Diagnostic& d);

}  // namespace umig
