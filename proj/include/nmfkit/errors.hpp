#pragma once

#include <stdexcept>
#include <string>

namespace nmfkit {

// Mismatched matrix/vector dimensions.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Bad user input: infeasible data, out-of-range parameters, malformed specs.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical breakdown: non-finite objective, singular system after all retries.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, long iteration = -1)
        : std::runtime_error(what), iteration_(iteration) {}

    // Iteration at which the failure was detected, -1 if not applicable.
    long iteration() const { return iteration_; }

private:
    long iteration_;
};

// Unreadable or malformed input file; offset is best-effort (line for text formats).
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nmfkit
