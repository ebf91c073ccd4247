#pragma once

#include <stdexcept>
#include <string>

namespace rpl {

/// Base class for every error raised by the workbench libraries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the placeholder preprocessor for `$NAME` tokens it does not know.
class UnknownPlaceholder : public Error {
public:
    explicit UnknownPlaceholder(std::string name, int line)
        : Error("unknown placeholder $" + name + " at line " + std::to_string(line)),
          name_(std::move(name)), line_(line) {}

    const std::string& name() const noexcept { return name_; }
    int line() const noexcept { return line_; }

private:
    std::string name_;
    int line_;
};

enum class AnalysisErrorKind { UnboundedLoop, UnsupportedRecursion, BudgetExceeded, Unsupported };

inline const char* to_string(AnalysisErrorKind k)
{
    switch (k) {
    case AnalysisErrorKind::UnboundedLoop: return "UnboundedLoop";
    case AnalysisErrorKind::UnsupportedRecursion: return "UnsupportedRecursion";
    case AnalysisErrorKind::BudgetExceeded: return "BudgetExceeded";
    case AnalysisErrorKind::Unsupported: return "Unsupported";
    }
    return "?";
}

/// Raised by the peak and time analyses when a program falls outside what
/// they can bound.
class AnalysisError : public Error {
public:
    AnalysisError(AnalysisErrorKind kind, const std::string& message, int line = 0)
        : Error(message), kind_(kind), line_(line) {}
    AnalysisErrorKind kind() const noexcept { return kind_; }
    int line() const noexcept { return line_; }

private:
    AnalysisErrorKind kind_;
    int line_;
};

} // namespace rpl
