#pragma once

#include <stdexcept>
#include <string>

namespace pm {

/// Malformed or inconsistent input (bad labels, dimension mismatch, wrong degrees).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold for the given input.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Cohomology requested in a degree the truncation bound does not determine.
class TruncationError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A structural invariant failed after construction. Signals a bug or a
/// deliberately broken fixture, never bad user input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ParseError : public InputError {
public:
    ParseError(int line, int column, const std::string& what)
        : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

} // namespace pm
