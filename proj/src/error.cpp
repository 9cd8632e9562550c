#include "umig/error.hpp"

#include <algorithm>

namespace umig {

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::Error;
    });
}

void throw_if_errors(const std::vector<Diagnostic>& diagnostics, const std::string& context) {
    std::string text;
    for (const auto& d : diagnostics) {
        if (d.severity != Diagnostic::Severity::Error) continue;
        text += "\n  " + to_string(d);
    }
    if (!text.empty()) throw Error(context + ": invalid model" + text);
}

std::string to_string(const Diagnostic& d) {
    std::string s = d.severity == Diagnostic::Severity::Error ? "error" : "warning";
    s += " [" + d.code + "] " + d.path + ": " + d.message;
    return s;
}

}  // namespace umig
