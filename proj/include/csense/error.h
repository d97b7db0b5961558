#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace csense {

/// One validation finding: where it was found and what is wrong.
struct Diagnostic {
    std::string where;    ///< file or field path, e.g. "zones[2].area"
    std::string message;  ///< names the violated invariant

    std::string str() const { return where.empty() ? message : where + ": " + message; }
};

/// Malformed input document (syntax level). `what()` carries line/position info.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structurally valid document that violates a declared invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Diagnostic> diags)
        : std::runtime_error(join(diags)), diagnostics_(std::move(diags)) {}
    explicit ValidationError(Diagnostic d) : ValidationError(std::vector<Diagnostic>{std::move(d)}) {}

    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    static std::string join(const std::vector<Diagnostic>& ds) {
        std::string s;
        for (const auto& d : ds) {
            if (!s.empty()) s += "; ";
            s += d.str();
        }
        return s.empty() ? std::string("validation failed") : s;
    }
    std::vector<Diagnostic> diagnostics_;
};

/// Argument outside an operation's stated domain (e.g. non-positive goal).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace csense
