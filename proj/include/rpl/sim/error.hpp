#pragma once

#include "rpl/lang/error.hpp"

#include <optional>

namespace rpl::sim {

enum class SimErrorKind { Deadlock, UnsatisfiableHold, Runtime, Timeout, Program };

const char* to_string(SimErrorKind k);

class SimulationError : public Error {
public:
    SimulationError(SimErrorKind kind, const std::string& message, int line = 0)
        : Error(message), kind_(kind), line_(line) {}

    SimErrorKind kind() const noexcept { return kind_; }
    /// Source line of the offending statement, 0 when not tied to one.
    int line() const noexcept { return line_; }
    /// Index of the failing run inside simulate_many.
    std::optional<int> run_index() const noexcept { return run_index_; }

    SimulationError with_run(int index) const
    {
        SimulationError e = *this;
        e.run_index_ = index;
        return e;
    }

private:
    SimErrorKind kind_;
    int line_;
    std::optional<int> run_index_;
};

} // namespace rpl::sim
