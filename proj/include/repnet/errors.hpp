#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace repnet {

// Base class for all library errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates an operation's contract.
class invalid_parameter_error : public error {
public:
    using error::error;
};

// The request is valid but exceeds the exhaustive-search guards.
class capacity_error : public error {
public:
    using error::error;
};

// A randomized construction exhausted its retry budget.
class generation_failure_error : public error {
public:
    using error::error;
};

// File could not be read or written.
class io_error : public error {
public:
    using error::error;
};

// Malformed textual input; byte_offset points at the offending byte.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t byte_offset)
        : error(what + " (byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Least-squares fit requested on points that do not determine a line.
class degenerate_regression_error : public error {
public:
    using error::error;
};

}  // namespace repnet
