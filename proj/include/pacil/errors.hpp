#pragma once

#include <stdexcept>
#include <string>

namespace pacil {

/// Base class for every error the library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A term references a variable the assignment does not bind.
struct MissingVariableError : Error {
    explicit MissingVariableError(std::string name)
        : Error("variable not bound by assignment: " + name), variable(std::move(name)) {}
    std::string variable;
};

/// A != atom reached a procedure that only handles conjunctions of
/// {<=, <, =}; callers must case-split it first.
struct UnexpectedNeqError : Error {
    UnexpectedNeqError() : Error("unexpected != atom; expand it before the feasibility check") {}
};

struct SizeLimitError : Error {
    using Error::Error;
};

struct OutOfRangeError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(int line_number, const std::string& reason)
        : Error("line " + std::to_string(line_number) + ": " + reason), line(line_number) {}
    int line;
};

struct InfeasibleProblemError : Error {
    using Error::Error;
};

/// Rejection sampling hit the acceptance-rate floor (< 1e-4).
struct RejectionBudgetError : Error {
    using Error::Error;
};

struct InvalidConfigError : Error {
    using Error::Error;
};

struct EmptySampleListError : Error {
    EmptySampleListError() : Error("sample list is empty") {}
};

/// The bound-doubling loop ran past the magnitude cap without the verdict
/// changing: the samples never pin the objective on that side.
struct UnboundedError : Error {
    enum class Direction { above, below };
    explicit UnboundedError(Direction d)
        : Error(d == Direction::above ? "objective not bounded above by the data"
                                      : "objective not bounded below by the data"),
          direction(d) {}
    Direction direction;
};

}  // namespace pacil
